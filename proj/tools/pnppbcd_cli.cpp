// pnppbcd: synthesize scenes, run detectors, score detection maps.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 data error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "pnppbcd/detector.hpp"
#include "pnppbcd/io.hpp"
#include "pnppbcd/solver.hpp"
#include "pnppbcd/synth.hpp"

using namespace pnppbcd;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

Dims parse_dims(const std::string& s) {
  static const std::regex re(R"((\d+)x(\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError("--dims expects N1xN2xN3, got '" + s + "'");
  return {std::stol(m[1]), std::stol(m[2]), std::stol(m[3])};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  return out;
}

struct SynthArgs {
  std::string dims = "50x50x30";
  SyntheticSpec spec;
  std::string out;
  std::string truth;
};

struct DetectArgs {
  std::string in;
  std::string out;
  std::string history;
  std::string method = "pnp";
  std::string penalty = "lp";
  double p = 0.1;
  double eps = 1e-5;
  double psi_lambda = 1.0;
  double theta = 3.0;
  double alpha = -1.0;
  std::string prior = "smoother";
  std::string sigma_policy = "pooled";
  SolverConfig cfg;
};

struct EvalArgs {
  std::string scores;
  std::string truth;
  std::string roc;
};

void run_synth(SynthArgs& a, bool seed_given) {
  a.spec.dims = parse_dims(a.dims);
  if (!seed_given) {
    if (const char* env = std::getenv("PNPPBCD_SEED")) {
      try {
        a.spec.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("PNPPBCD_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  const SyntheticScene scene = synth_scene(a.spec);
  save_hsi(a.out, scene.o);
  if (!a.truth.empty()) save_mask(a.truth, scene.truth);
}

SparsityPenalty make_penalty(const DetectArgs& a) {
  if (a.penalty == "l1") return SparsityPenalty::l1();
  if (a.penalty == "lp") return SparsityPenalty::relaxed_lp(a.p, a.eps);
  if (a.penalty == "mcp") return SparsityPenalty::mcp(a.psi_lambda, a.theta);
  return SparsityPenalty::scad(a.psi_lambda, a.theta);
}

void run_detect(DetectArgs& a) {
  SolverConfig& cfg = a.cfg;
  if (a.alpha >= 0.0) cfg.alpha_S = cfg.alpha_E = cfg.alpha_Z = a.alpha;
  cfg.penalty = make_penalty(a);
  cfg.prior = a.prior == "identity" ? SmoothPrior::Kind::identity : SmoothPrior::Kind::linear_smoother;
  cfg.sigma_policy = a.sigma_policy == "per-band" ? SigmaPolicy::per_band : SigmaPolicy::pooled;
  if (a.method == "pnp") cfg.validate();

  const Tensor3 o = load_hsi(a.in);
  ScoreMap map;
  if (a.method == "rx") {
    RxResult rx = rx_scores(o);
    if (rx.singular_covariance) std::cerr << "warning: sample covariance is singular; ridge applied\n";
    map = std::move(rx.map);
  } else {
    const RunResult res = run(o, cfg);
    map = anomaly_scores(res.state.S);
    if (!a.history.empty()) {
      auto h = open_out(a.history);
      write_history_csv(h, res.history);
    }
    for (const auto& h : res.history)
      if (h.rank_deficient) {
        std::cerr << "warning: rank-deficient basis update at iteration " << h.iter << "\n";
        break;
      }
  }
  auto out = open_out(a.out);
  write_scores_csv(out, map);
}

void run_eval(const EvalArgs& a) {
  std::ifstream in(a.scores);
  if (!in) throw FormatError("cannot open " + a.scores);
  const ScoreMap map = read_scores_csv(in);
  const Mask truth = load_mask(a.truth);
  const RocResult roc = roc_auc(map, truth);
  if (!a.roc.empty()) {
    auto out = open_out(a.roc);
    write_roc_csv(out, roc);
  }
  std::printf("AUC=%.12g\n", roc.auc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank plus group-sparse hyperspectral anomaly detection"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic scene and its anomaly mask");
  synth->add_option("--dims", sa.dims, "N1xN2xN3")->capture_default_str();
  synth->add_option("--rank", sa.spec.rank, "Background rank")->capture_default_str();
  synth->add_option("--anomalies", sa.spec.anomalies, "Number of anomalous pixels")->capture_default_str();
  synth->add_option("--magnitude", sa.spec.magnitude, "Per-band anomaly amplitude")->capture_default_str();
  synth->add_option("--noise", sa.spec.noise, "Gaussian noise standard deviation")->capture_default_str();
  auto* seed_opt = synth->add_option("--seed", sa.spec.seed, "RNG seed (overrides PNPPBCD_SEED)");
  synth->add_option("--out", sa.out, "Scene file (HSI1)")->required();
  synth->add_option("--truth", sa.truth, "Mask file (MSK1)");

  DetectArgs da;
  auto* detect = app.add_subcommand("detect", "Score every pixel of a scene");
  detect->add_option("--in", da.in, "Scene file (HSI1)")->required();
  detect->add_option("--out", da.out, "Scores CSV")->required();
  detect->add_option("--method", da.method)->check(CLI::IsMember({"pnp", "rx"}))->capture_default_str();
  detect->add_option("--history", da.history, "Iteration history CSV (pnp only)");
  detect->add_option("--rank", da.cfg.rank)->capture_default_str();
  detect->add_option("--delta", da.cfg.delta)->capture_default_str();
  detect->add_option("--tau", da.cfg.tau)->capture_default_str();
  detect->add_option("--alpha", da.alpha, "Sets alpha-s, alpha-e and alpha-z together");
  detect->add_option("--alpha-s", da.cfg.alpha_S)->capture_default_str();
  detect->add_option("--alpha-e", da.cfg.alpha_E)->capture_default_str();
  detect->add_option("--alpha-z", da.cfg.alpha_Z)->capture_default_str();
  detect->add_option("--penalty", da.penalty)->check(CLI::IsMember({"l1", "lp", "mcp", "scad"}))->capture_default_str();
  detect->add_option("--p", da.p, "Relaxed lp exponent")->capture_default_str();
  detect->add_option("--eps", da.eps, "Relaxed lp offset")->capture_default_str();
  detect->add_option("--psi-lambda", da.psi_lambda, "MCP/SCAD lambda")->capture_default_str();
  detect->add_option("--theta", da.theta, "MCP/SCAD theta")->capture_default_str();
  detect->add_option("--prior", da.prior)->check(CLI::IsMember({"smoother", "identity"}))->capture_default_str();
  detect->add_option("--sigma-policy", da.sigma_policy)->check(CLI::IsMember({"pooled", "per-band"}))->capture_default_str();
  detect->add_option("--sigma", da.cfg.sigmas, "Explicit per-band noise levels (one per rank)");
  detect->add_option("--a", da.cfg.a)->capture_default_str();
  detect->add_option("--b", da.cfg.b)->capture_default_str();
  detect->add_option("--gamma", da.cfg.gamma)->capture_default_str();
  detect->add_option("--max-iter", da.cfg.max_iter)->capture_default_str();
  detect->add_option("--min-iter", da.cfg.min_iter)->capture_default_str();
  detect->add_option("--tol", da.cfg.tol)->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "ROC curve and AUC of a score map against a mask");
  eval->add_option("--scores", ea.scores)->required();
  eval->add_option("--truth", ea.truth)->required();
  eval->add_option("--roc", ea.roc, "ROC CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth) run_synth(sa, seed_opt->count() > 0);
    if (*detect) run_detect(da);
    if (*eval) run_eval(ea);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return 0;
}
