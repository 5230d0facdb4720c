#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sem/key_inversion.hpp"

namespace sem {

/// Clamped B-spline basis h_1..h_L of a given order on [lower, upper] with
/// equally spaced interior knots, plus its L2 Gram matrix.
class BsplineBasis {
 public:
  BsplineBasis(double lower, double upper, int size, int order);

  int size() const { return size_; }
  int order() const { return order_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::vector<double>& knots() const { return knots_; }
  std::vector<double> interior_knots() const;

  /// W_kl = integral of h_k h_l over [lower, upper].
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// Integral of each h_l over [lower, upper].
  Eigen::VectorXd integrals() const;

  /// All L basis values at t (mostly zeros).
  Eigen::VectorXd values(double t) const;
  /// n x L collocation matrix.
  Eigen::MatrixXd design(std::span<const double> ts) const;

  /// Sum_l coeffs[l] h_l(t) via de Boor's algorithm.
  double eval(const Eigen::VectorXd& coeffs, double t) const;

 private:
  int span_index(double t) const;
  void check_domain(double t) const;

  double lower_, upper_;
  int size_, order_;
  std::vector<double> knots_;
  Eigen::MatrixXd gram_;
};

BsplineBasis make_basis(int cond_age, int terminal_age, int size, int order);

struct CoeffFit {
  Eigen::VectorXd coeffs;
  bool ridge_used = false;
  double rss = 0.0;
};

/// Least-squares coefficients for the pointwise estimates of one cohort.
CoeffFit fit_coeffs(const KeyPointEstimates& kp, const BsplineBasis& basis);
CoeffFit fit_coeffs(std::span<const double> ts, std::span<const double> values,
                    const BsplineBasis& basis);

/// Cross-cohort mean and centered coefficients (rows are cohorts).
struct FunctionalDataSet {
  BsplineBasis basis;
  std::vector<int> cohorts;
  Eigen::MatrixXd coeffs;
  Eigen::VectorXd mean_coeffs;
  Eigen::MatrixXd centered;
};

FunctionalDataSet center(const BsplineBasis& basis, std::vector<int> cohorts,
                         const Eigen::MatrixXd& coeffs);

/// Domain-checked curve evaluation.
double eval_curve(const Eigen::VectorXd& coeffs, const BsplineBasis& basis, double t);

}  // namespace sem
