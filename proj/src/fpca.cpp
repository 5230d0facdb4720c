#include "sem/fpca.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "sem/error.hpp"
#include "sem/text.hpp"

namespace sem {

KSelection select_k(std::span<const double> eigvals, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorKind::domain, "select_k: theta must lie in (0, 1]");
  if (eigvals.empty()) return {1, true};
  double total = 0.0;
  for (double v : eigvals) total += std::max(v, 0.0);
  if (!(total > 0.0)) return {1, true};
  double acc = 0.0;
  for (std::size_t k = 0; k < eigvals.size(); ++k) {
    acc += std::max(eigvals[k], 0.0);
    // Relative slack absorbs rounding in the running sum when theta = 1.
    if (acc / total >= theta - 1e-14) return {static_cast<int>(k) + 1, false};
  }
  return {static_cast<int>(eigvals.size()), false};
}

FpcaModel fit_fpca(const FunctionalDataSet& fds, double theta, KeyKind kind) {
  const Eigen::Index m = fds.centered.rows();
  if (m < 2) throw Error(ErrorKind::domain, "fit_fpca: need m >= 2 cohorts");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorKind::domain, "fit_fpca: theta must lie in (0, 1]");

  const Eigen::MatrixXd& w = fds.basis.gram();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(w);
  if (gram_eig.info() != Eigen::Success || gram_eig.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::invariant, "fit_fpca: Gram matrix is not positive definite");
  const Eigen::VectorXd sqrt_ev = gram_eig.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd& q = gram_eig.eigenvectors();
  const Eigen::MatrixXd w_half = q * sqrt_ev.asDiagonal() * q.transpose();
  const Eigen::MatrixXd w_inv_half = q * sqrt_ev.cwiseInverse().asDiagonal() * q.transpose();

  const Eigen::MatrixXd& a = fds.centered;
  const Eigen::MatrixXd cov = (a.transpose() * a) / static_cast<double>(m - 1);
  Eigen::MatrixXd sym = w_half * cov * w_half;
  sym = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::invariant, "fit_fpca: eigensolver failed");

  // Eigen returns ascending order.
  const Eigen::Index l = sym.rows();
  const double top = es.eigenvalues()[l - 1];
  int rank = 0;
  for (Eigen::Index j = l - 1; j >= 0; --j)
    if (top > 0.0 && es.eigenvalues()[j] > 1e-12 * top) ++rank;

  FpcaModel model{kind, fds.basis, fds.cohorts, fds.mean_coeffs, {}, {}, {}, {}, 1, theta, rank == 0};
  const int kept = std::max(rank, 1);
  model.eig_coeffs.resize(l, kept);
  model.eigvals.resize(kept);
  const Eigen::VectorXd integrals = fds.basis.integrals();
  for (int j = 0; j < kept; ++j) {
    Eigen::VectorXd b = w_inv_half * es.eigenvectors().col(l - 1 - j);
    // Sign rule: integral of e_j nonnegative, ties broken by e_j(S) >= 0.
    const double area = integrals.dot(b);
    const double scale = b.cwiseAbs().dot(integrals);
    if (area < -1e-12 * scale || (std::fabs(area) <= 1e-12 * scale && b[0] < 0.0)) b = -b;
    model.eig_coeffs.col(j) = b;
    model.eigvals[j] = rank == 0 ? 0.0 : es.eigenvalues()[l - 1 - j];
  }
  model.scores = a * w * model.eig_coeffs;
  if (rank == 0) model.scores.setZero();

  model.contrib.resize(kept);
  const double total = model.eigvals.sum();
  double acc = 0.0;
  for (int j = 0; j < kept; ++j) {
    acc += model.eigvals[j];
    model.contrib[j] = total > 0.0 ? acc / total : 1.0;
  }
  const auto sel = select_k(std::span<const double>(model.eigvals.data(), static_cast<std::size_t>(kept)), theta);
  model.k_selected = sel.k;
  model.degenerate = sel.degenerate;
  return model;
}

Eigen::VectorXd FpcaModel::curve_coeffs(std::span<const double> scores_row) const {
  if (static_cast<Eigen::Index>(scores_row.size()) > eig_coeffs.cols())
    throw Error(ErrorKind::domain, "reconstruct: more scores than retained components");
  Eigen::VectorXd c = mean_coeffs;
  for (std::size_t j = 0; j < scores_row.size(); ++j)
    c += scores_row[j] * eig_coeffs.col(static_cast<Eigen::Index>(j));
  return c;
}

double reconstruct(const FpcaModel& model, std::span<const double> scores_row, double t) {
  return model.basis.eval(model.curve_coeffs(scores_row), t);
}

namespace {

void write_vector(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << text::fmt(v[i]);
  out << '\n';
}

void write_matrix(std::ostream& out, const char* key, const Eigen::MatrixXd& mat) {
  out << key << ' ' << mat.rows() << ' ' << mat.cols() << '\n';
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) out << (c ? " " : "") << text::fmt(mat(r, c));
    out << '\n';
  }
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::vector<std::string> expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) throw Error(ErrorKind::parse, "model file: missing '" + key + "'");
    ++lineno_;
    const auto toks = text::split_ws(line);
    if (toks.empty() || toks[0] != key)
      throw Error(ErrorKind::parse, "model file line " + std::to_string(lineno_) + ": expected '" + key + "'");
    return {toks.begin() + 1, toks.end()};
  }

  std::string scalar(const std::string& key) {
    auto v = expect(key);
    if (v.size() != 1) throw Error(ErrorKind::parse, "model file: '" + key + "' takes one value");
    return v[0];
  }

  Eigen::VectorXd vector(const std::string& key, Eigen::Index n) {
    const auto v = expect(key);
    if (static_cast<Eigen::Index>(v.size()) != n)
      throw Error(ErrorKind::parse, "model file: '" + key + "' has wrong length");
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = text::parse_double(v[static_cast<std::size_t>(i)], key);
    return out;
  }

  Eigen::MatrixXd matrix(const std::string& key, Eigen::Index rows, Eigen::Index cols) {
    const auto dims = expect(key);
    if (dims.size() != 2 || text::parse_int(dims[0], key) != rows || text::parse_int(dims[1], key) != cols)
      throw Error(ErrorKind::parse, "model file: '" + key + "' has wrong shape");
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::string line;
      if (!std::getline(in_, line)) throw Error(ErrorKind::parse, "model file: truncated '" + key + "'");
      ++lineno_;
      const auto toks = text::split_ws(line);
      if (static_cast<Eigen::Index>(toks.size()) != cols)
        throw Error(ErrorKind::parse, "model file line " + std::to_string(lineno_) + ": wrong column count");
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = text::parse_double(toks[static_cast<std::size_t>(c)], key);
    }
    return out;
  }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const FpcaModel& model) {
  out << "sem-fpca-model v1\n";
  out << "kind " << to_string(model.kind) << '\n';
  out << "domain " << text::fmt(model.basis.lower()) << ' ' << text::fmt(model.basis.upper()) << '\n';
  out << "basis_size " << model.basis.size() << '\n';
  out << "order " << model.basis.order() << '\n';
  out << "m " << model.cohorts.size() << '\n';
  out << "cohorts";
  for (int c : model.cohorts) out << ' ' << c;
  out << '\n';
  out << "rank " << model.rank() << '\n';
  out << "k_selected " << model.k_selected << '\n';
  out << "theta " << text::fmt(model.theta) << '\n';
  out << "degenerate " << (model.degenerate ? 1 : 0) << '\n';
  write_vector(out, "mean_coeffs", model.mean_coeffs);
  write_vector(out, "eigvals", model.eigvals);
  write_vector(out, "contrib", model.contrib);
  write_matrix(out, "eig_coeffs", model.eig_coeffs);
  write_matrix(out, "scores", model.scores);
}

FpcaModel read_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "sem-fpca-model v1")
    throw Error(ErrorKind::validation, "model file: missing or unsupported version header");
  ModelReader r(in);
  const KeyKind kind = key_kind_from_string(r.scalar("kind"));
  const auto dom = r.expect("domain");
  if (dom.size() != 2) throw Error(ErrorKind::parse, "model file: 'domain' takes two values");
  const double lo = text::parse_double(dom[0], "domain");
  const double hi = text::parse_double(dom[1], "domain");
  const int size = text::parse_int(r.scalar("basis_size"), "basis_size");
  const int order = text::parse_int(r.scalar("order"), "order");
  const int m = text::parse_int(r.scalar("m"), "m");
  const auto cohort_toks = r.expect("cohorts");
  if (static_cast<int>(cohort_toks.size()) != m) throw Error(ErrorKind::parse, "model file: cohort count mismatch");
  std::vector<int> cohorts;
  for (const auto& t : cohort_toks) cohorts.push_back(text::parse_int(t, "cohorts"));
  const int rank = text::parse_int(r.scalar("rank"), "rank");
  const int k_selected = text::parse_int(r.scalar("k_selected"), "k_selected");
  const double theta = text::parse_double(r.scalar("theta"), "theta");
  const bool degenerate = r.scalar("degenerate") == "1";

  FpcaModel model{kind, BsplineBasis(lo, hi, size, order), std::move(cohorts), {}, {}, {}, {}, {},
                  k_selected, theta, degenerate};
  model.mean_coeffs = r.vector("mean_coeffs", size);
  model.eigvals = r.vector("eigvals", rank);
  model.contrib = r.vector("contrib", rank);
  model.eig_coeffs = r.matrix("eig_coeffs", size, rank);
  model.scores = r.matrix("scores", m, rank);
  if (k_selected < 1 || k_selected > rank) throw Error(ErrorKind::parse, "model file: k_selected out of range");
  return model;
}

}  // namespace sem
