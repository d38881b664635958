// quadrature.hpp - adaptive Gauss-Kronrod integration for resonant integrands.

#pragma once

#include <functional>
#include <vector>

namespace nfdce {

struct QuadratureSpec {
  double rel_tol = 1e-3;
  double abs_floor = 0.0;       // same units as the integral
  int max_depth = 30;           // max bisection depth per initial panel
  double kpar_max_factor = 20.0; // k_max = max(factor/d, 100*omega/c)
  double omega_window_lo_mev = 25.0;
  double omega_window_hi_mev = 70.0;

  void validate() const; // throws on rel_tol outside (0,1) etc.
};

struct IntegralResult {
  double value = 0.0;
  double error_bound = 0.0;
  bool converged = true;
  long evals = 0;
};

// Vector-valued integral; error_bound and the convergence test use the L1 norm
// over components so every component the caller assembles is resolved together.
struct VecIntegralResult {
  std::vector<double> value;
  double error_bound = 0.0;
  bool converged = true;
  long evals = 0;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<void(double, std::vector<double>&)>; // fills dim values

IntegralResult integrate_adaptive(const ScalarFn& f, double a, double b, const QuadratureSpec& spec);

// As above with interior panel boundaries pre-seeded (resonance positions).
IntegralResult integrate_adaptive(const ScalarFn& f, double a, double b, const QuadratureSpec& spec,
                                  const std::vector<double>& breakpoints);

VecIntegralResult integrate_adaptive_vec(const VectorFn& f, int dim, double a, double b,
                                         const QuadratureSpec& spec,
                                         const std::vector<double>& breakpoints = {});

// In-plane wavevector integral from 0 to k_max = max(factor/d, 100*omega/c):
// the propagating segment [0, omega/c] is integrated directly, the evanescent
// tail in the substitution u = kpar*d.  A tail bound |f(k_max)|/(2d) (decay at
// least e^{-2 kpar d}) is added to the reported error.
IntegralResult integrate_kpar(const ScalarFn& f, double omega_mev, double d_nm,
                              const QuadratureSpec& spec);

VecIntegralResult integrate_kpar_vec(const VectorFn& f, int dim, double omega_mev, double d_nm,
                                     const QuadratureSpec& spec,
                                     const std::vector<double>& breakpoints = {});

} // namespace nfdce
