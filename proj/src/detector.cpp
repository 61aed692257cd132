#include "pnppbcd/detector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>

namespace pnppbcd {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScoreMap to_map(const std::vector<double>& v, Index n1, Index n2) {
  ScoreMap m{Matrix(n1, n2)};
  std::copy(v.begin(), v.end(), m.scores.data());
  return m;
}

}  // namespace

ScoreMap anomaly_scores(const Tensor3& s, kernels::Exec exec) {
  return to_map(kernels::fiber_norms(exec, s), s.n1(), s.n2());
}

RxResult rx_scores(const Tensor3& o, kernels::Exec exec) {
  const Index n = o.pixels();
  const Index bands = o.n3();
  const auto x = o.mode3();
  const Vector mu = x.rowwise().mean();
  const Matrix centred = x.colwise() - mu;
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  Matrix c = (centred * centred.transpose()) / denom;
  const double tr = c.trace();
  RxResult out;
  if (!(tr > 0.0)) {
    out.map.scores = Matrix::Zero(o.n1(), o.n2());
    out.singular_covariance = true;
    return out;
  }
  Eigen::LDLT<Matrix> ldlt(c);
  const auto d = ldlt.vectorD();
  out.singular_covariance = ldlt.info() != Eigen::Success || d.minCoeff() <= bands * 1e-14 * d.cwiseAbs().maxCoeff();
  c.diagonal().array() += 1e-6 * tr / static_cast<double>(bands);
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) throw InvariantViolation("rx_scores: regularized covariance is not positive definite");
  const Matrix lower = llt.matrixL();
  out.map = to_map(kernels::whitened_sq_norms(exec, o, mu, lower), o.n1(), o.n2());
  return out;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& truth) {
  if (scores.size() != truth.size()) throw ShapeError("roc_auc: scores and truth differ in size");
  std::size_t pos = 0;
  for (auto t : truth) {
    if (t > 1) throw ConfigError("roc_auc: truth must be binary");
    pos += t;
  }
  const std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) throw ConfigError("roc_auc: truth needs at least one positive and one negative pixel");
  for (double s : scores)
    if (!std::isfinite(s)) throw ConfigError("roc_auc: non-finite score");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult out;
  out.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == thr; ++j) {
      if (truth[order[j]]) ++tp; else ++fp;
    }
    const RocPoint& last = out.curve.back();
    RocPoint p{thr, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos};
    area += (p.far - last.far) * (p.pd + last.pd) * 0.5;
    out.curve.push_back(p);
    i = j;
  }
  out.auc = area;
  return out;
}

RocResult roc_auc(const ScoreMap& scores, const Mask& truth) {
  if (scores.n1() != truth.n1 || scores.n2() != truth.n2) throw ShapeError("roc_auc: score map and mask differ in shape");
  std::vector<double> s(scores.scores.data(), scores.scores.data() + scores.scores.size());
  return roc_auc(s, truth.data);
}

void write_roc_csv(std::ostream& out, const RocResult& roc) {
  out << "threshold,far,pd\n";
  for (const auto& p : roc.curve) out << fmt(p.threshold) << ',' << fmt(p.far) << ',' << fmt(p.pd) << '\n';
}

void write_scores_csv(std::ostream& out, const ScoreMap& map) {
  out << "i,j,score\n";
  for (Index j = 0; j < map.n2(); ++j)
    for (Index i = 0; i < map.n1(); ++i) out << i + 1 << ',' << j + 1 << ',' << fmt(map.scores(i, j)) << '\n';
}

ScoreMap read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "i,j,score") throw FormatError("scores csv: missing header i,j,score");
  struct Row {
    long i, j;
    double s;
  };
  std::vector<Row> rows;
  long n1 = 0;
  long n2 = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Row r{};
    const char* p = line.data();
    const char* end = p + line.size();
    auto field = [&](auto& v, bool last) {
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || ptr == p) return false;
      p = ptr;
      if (last) return p == end;
      if (p == end || *p != ',') return false;
      ++p;
      return true;
    };
    if (!(field(r.i, false) && field(r.j, false) && field(r.s, true)) || r.i < 1 || r.j < 1) {
      throw FormatError("scores csv: malformed line " + std::to_string(lineno));
    }
    n1 = std::max(n1, r.i);
    n2 = std::max(n2, r.j);
    rows.push_back(r);
  }
  if (rows.empty()) throw FormatError("scores csv: no rows");
  if (static_cast<std::size_t>(n1 * n2) != rows.size()) throw FormatError("scores csv: rows do not form a full grid");
  ScoreMap m{Matrix::Constant(n1, n2, std::numeric_limits<double>::quiet_NaN())};
  for (const auto& r : rows) {
    if (!std::isnan(m.scores(r.i - 1, r.j - 1))) throw FormatError("scores csv: duplicate pixel");
    m.scores(r.i - 1, r.j - 1) = r.s;
  }
  return m;
}

}  // namespace pnppbcd
