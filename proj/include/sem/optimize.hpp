#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sem {

using Objective = std::function<double(std::span<const double>)>;

struct OptimResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double xtol = 1e-10;     // simplex diameter, per coordinate
  double ftol = 0.0;       // absolute spread of vertex values
  int max_evaluations = 20000;
  // Optional box; when non-empty every trial vertex is clamped into it.
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Nelder-Mead simplex minimization with the standard reflection (1),
/// expansion (2), contraction (1/2) and shrink (1/2) coefficients.
OptimResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                        const NelderMeadOptions& opts = {});

struct BfgsOptions {
  double gtol = 1e-9;
  int max_iterations = 200;
};

/// Quasi-Newton (BFGS) with central-difference gradients and a backtracking
/// Armijo line search.
OptimResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts = {});

}  // namespace sem
