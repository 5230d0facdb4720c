#include "sem/basis_smooth.hpp"

#include <algorithm>
#include <string>

#include "sem/error.hpp"
#include "sem/quadrature.hpp"

namespace sem {

BsplineBasis::BsplineBasis(double lower, double upper, int size, int order)
    : lower_(lower), upper_(upper), size_(size), order_(order) {
  if (order < 1) throw Error(ErrorKind::domain, "B-spline order must be positive");
  if (size < order)
    throw Error(ErrorKind::domain, "B-spline basis size L=" + std::to_string(size) +
                                       " is smaller than the order " + std::to_string(order));
  if (!(lower < upper)) throw Error(ErrorKind::domain, "B-spline domain must have lower < upper");

  const int interior = size - order;
  knots_.assign(static_cast<std::size_t>(order), lower);
  for (int i = 1; i <= interior; ++i)
    knots_.push_back(lower + (upper - lower) * i / (interior + 1));
  knots_.insert(knots_.end(), static_cast<std::size_t>(order), upper);

  // Products h_k h_l have degree 2(order-1); order+1 points are exact.
  const auto rule = gauss_legendre(order + 1);
  gram_ = Eigen::MatrixXd::Zero(size, size);
  for (int seg = 0; seg <= interior; ++seg) {
    const double a = knots_[static_cast<std::size_t>(order - 1 + seg)];
    const double b = knots_[static_cast<std::size_t>(order + seg)];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const Eigen::VectorXd v = values(mid + half * rule.nodes[q]);
      gram_.noalias() += (rule.weights[q] * half) * v * v.transpose();
    }
  }
  gram_ = (0.5 * (gram_ + gram_.transpose())).eval();
}

std::vector<double> BsplineBasis::interior_knots() const {
  return {knots_.begin() + order_, knots_.end() - order_};
}

Eigen::VectorXd BsplineBasis::integrals() const {
  Eigen::VectorXd out(size_);
  for (int l = 0; l < size_; ++l)
    out[l] = (knots_[static_cast<std::size_t>(l + order_)] - knots_[static_cast<std::size_t>(l)]) / order_;
  return out;
}

void BsplineBasis::check_domain(double t) const {
  if (!(t >= lower_ && t <= upper_))
    throw Error(ErrorKind::domain, "B-spline evaluation at t=" + std::to_string(t) +
                                       " outside [" + std::to_string(lower_) + ", " +
                                       std::to_string(upper_) + "]");
}

int BsplineBasis::span_index(double t) const {
  // Index i with knots[i] <= t < knots[i+1]; the right end uses the last span.
  if (t >= upper_) return size_ - 1;
  const auto it = std::upper_bound(knots_.begin() + order_ - 1, knots_.begin() + size_ + 1, t);
  return static_cast<int>(it - knots_.begin()) - 1;
}

Eigen::VectorXd BsplineBasis::values(double t) const {
  check_domain(t);
  const int i = span_index(t);
  const int deg = order_ - 1;
  std::vector<double> n(static_cast<std::size_t>(order_), 0.0), left(n), right(n);
  n[0] = 1.0;
  for (int j = 1; j <= deg; ++j) {
    left[static_cast<std::size_t>(j)] = t - knots_[static_cast<std::size_t>(i + 1 - j)];
    right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(i + j)] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = n[static_cast<std::size_t>(r)] /
                         (right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)]);
      n[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * tmp;
      saved = left[static_cast<std::size_t>(j - r)] * tmp;
    }
    n[static_cast<std::size_t>(j)] = saved;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size_);
  for (int r = 0; r <= deg; ++r) out[i - deg + r] = n[static_cast<std::size_t>(r)];
  return out;
}

Eigen::MatrixXd BsplineBasis::design(std::span<const double> ts) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(ts.size()), size_);
  for (std::size_t r = 0; r < ts.size(); ++r) x.row(static_cast<Eigen::Index>(r)) = values(ts[r]).transpose();
  return x;
}

double BsplineBasis::eval(const Eigen::VectorXd& coeffs, double t) const {
  check_domain(t);
  if (coeffs.size() != size_)
    throw Error(ErrorKind::domain, "B-spline coefficient vector has wrong length");
  const int i = span_index(t);
  const int deg = order_ - 1;
  std::vector<double> d(static_cast<std::size_t>(order_));
  for (int j = 0; j <= deg; ++j) d[static_cast<std::size_t>(j)] = coeffs[i - deg + j];
  for (int r = 1; r <= deg; ++r) {
    for (int j = deg; j >= r; --j) {
      const double kl = knots_[static_cast<std::size_t>(j + i - deg)];
      const double kr = knots_[static_cast<std::size_t>(j + 1 + i - r)];
      const double alpha = (t - kl) / (kr - kl);
      d[static_cast<std::size_t>(j)] =
          (1.0 - alpha) * d[static_cast<std::size_t>(j - 1)] + alpha * d[static_cast<std::size_t>(j)];
    }
  }
  return d[static_cast<std::size_t>(deg)];
}

BsplineBasis make_basis(int cond_age, int terminal_age, int size, int order) {
  return BsplineBasis(cond_age, terminal_age, size, order);
}

CoeffFit fit_coeffs(std::span<const double> ts, std::span<const double> values,
                    const BsplineBasis& basis) {
  if (ts.size() != values.size())
    throw Error(ErrorKind::invariant, "fit_coeffs: ages and values differ in length");
  if (static_cast<int>(ts.size()) < basis.size())
    throw Error(ErrorKind::underdetermined, "fit_coeffs: " + std::to_string(ts.size()) +
                                                " points for " + std::to_string(basis.size()) +
                                                " basis functions");
  const Eigen::MatrixXd x = basis.design(ts);
  const Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(values.size()));

  CoeffFit fit;
  Eigen::MatrixXd normal = x.transpose() * x;
  const Eigen::VectorXd rhs = x.transpose() * y;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  const double diag_ratio = normal.diagonal().minCoeff() / normal.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success || diag_ratio < 1e-14) {
    normal.diagonal().array() += 1e-10 * normal.trace();
    llt.compute(normal);
    fit.ridge_used = true;
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::invariant, "fit_coeffs: normal equations not positive definite");
  }
  fit.coeffs = llt.solve(rhs);
  // One step of iterative refinement against the normal-equation residual.
  fit.coeffs += llt.solve(rhs - normal * fit.coeffs);
  fit.rss = (y - x * fit.coeffs).squaredNorm();
  return fit;
}

CoeffFit fit_coeffs(const KeyPointEstimates& kp, const BsplineBasis& basis) {
  std::vector<double> ts(kp.ages.begin(), kp.ages.end());
  return fit_coeffs(ts, kp.values, basis);
}

FunctionalDataSet center(const BsplineBasis& basis, std::vector<int> cohorts,
                         const Eigen::MatrixXd& coeffs) {
  if (coeffs.rows() < 2) throw Error(ErrorKind::domain, "center: need m >= 2 cohorts");
  if (coeffs.cols() != basis.size() || static_cast<Eigen::Index>(cohorts.size()) != coeffs.rows())
    throw Error(ErrorKind::invariant, "center: coefficient matrix shape mismatch");
  Eigen::VectorXd mean = coeffs.colwise().mean().transpose();
  Eigen::MatrixXd centered = coeffs.rowwise() - mean.transpose();
  return {basis, std::move(cohorts), coeffs, std::move(mean), std::move(centered)};
}

double eval_curve(const Eigen::VectorXd& coeffs, const BsplineBasis& basis, double t) {
  return basis.eval(coeffs, t);
}

}  // namespace sem
