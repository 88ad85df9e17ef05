#pragma once

#include <functional>

namespace ftalloc {

struct BracketResult {
  double x_star = 0.0;
  double f_star = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Objective for the line searches. May return +infinity for points the
// caller considers infeasible; NaN is treated the same way.
using ScalarFunction = std::function<double(double)>;

/// Brent's derivative-free minimizer on [a, b]: golden-section steps mixed
/// with successive parabolic interpolation.
///
/// The endpoints are evaluated after the interior search so that boundary
/// minima are returned exactly and f_star never exceeds f(a) or f(b).
/// Three consecutive parabolic steps that together shrink the bracket less
/// than one golden step force a golden step, which keeps plateau-heavy
/// objectives from stalling. Running out of evaluations is reported through
/// `converged == false`, not an exception.
BracketResult brent_minimize(const ScalarFunction& f, double a, double b,
                             double xtol = 1e-6, int max_eval = 100);

// Plain golden-section search with the same stopping rule and endpoint
// handling as brent_minimize. Reference point for evaluation counts.
BracketResult golden_section_minimize(const ScalarFunction& f, double a,
                                      double b, double xtol = 1e-6,
                                      int max_eval = 100);

}  // namespace ftalloc
