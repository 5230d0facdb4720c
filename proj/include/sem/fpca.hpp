#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sem/basis_smooth.hpp"
#include "sem/sem_core.hpp"

namespace sem {

/// Functional principal components of a centered coefficient panel.
///
/// Eigenfunctions are e_j(t) = sum_k eig_coeffs(k, j) h_k(t), orthonormal in
/// L2[S, w]: eig_coeffs^T W eig_coeffs = I. Scores are Z = A W B with A the
/// centered coefficient matrix.
struct FpcaModel {
  KeyKind kind = KeyKind::IG;
  BsplineBasis basis;
  std::vector<int> cohorts;
  Eigen::VectorXd mean_coeffs;
  Eigen::MatrixXd eig_coeffs;  // L x K
  Eigen::VectorXd eigvals;     // K, nonincreasing
  Eigen::MatrixXd scores;      // m x K
  Eigen::VectorXd contrib;     // cumulative contribution ratios
  int k_selected = 1;
  double theta = 0.995;
  bool degenerate = false;     // all eigenvalues zero

  int rank() const { return static_cast<int>(eigvals.size()); }
  /// Coefficients of the key curve mean + sum_j scores[j] e_j.
  Eigen::VectorXd curve_coeffs(std::span<const double> scores_row) const;
};

struct KSelection {
  int k;
  bool degenerate;
};

/// Smallest k whose cumulative eigenvalue share reaches theta.
KSelection select_k(std::span<const double> eigvals, double theta);

FpcaModel fit_fpca(const FunctionalDataSet& fds, double theta, KeyKind kind = KeyKind::IG);

/// mean(t) + sum_j scores_row[j] e_j(t); scores_row may be shorter than K.
double reconstruct(const FpcaModel& model, std::span<const double> scores_row, double t);

/// Versioned text serialization ("sem-fpca-model v1").
void write_model(std::ostream& out, const FpcaModel& model);
FpcaModel read_model(std::istream& in);

}  // namespace sem
