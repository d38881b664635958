// nonclassicality.hpp - two-mode quadrature nonclassicality test for the gap field.
//
// The indicator I = C - |B| is the theta-minimized normally-ordered variance of
// the two-mode quadrature at omega_-+ = Omega/2 -+ delta_omega; I < 0 certifies
// a nonclassical field state.  R carries macroscopic-QED source-slot weights
// (omega'^2/c^2 per leg); its overall dimensional prefactor is fixed to 1, so
// only the normalized indicator I/N and the sign of I are meaningful.

#pragma once

#include <utility>
#include <vector>

#include "nfdce/fluxes.hpp"

namespace nfdce {

struct QuadraturePairSpec {
  double mod_energy_mev = 0.0;  // hbar*Omega
  double delta_omega_mev = 0.0; // 0 for degenerate squeezing

  double omega_minus() const { return 0.5 * mod_energy_mev - delta_omega_mev; }
  double omega_plus() const { return 0.5 * mod_energy_mev + delta_omega_mev; }
  void validate() const; // omega_- > 0 required
};

// R(z; omega, omega') = sum_alpha eps''_alpha(omega') (omega'/c)^4 *
//   integral over body alpha and kpar of G(z,.;omega,omega') G*(z,.;omega',omega').
// omega may be negative (handled through the Green's-function reality
// condition); omega' > 0 and omega' - omega must be an integer multiple of
// Omega within the retained harmonics.  z must lie inside the vacuum gap.
cplx response_overlap(const LayerStack& stack, const HarmonicBasis& basis, double z_nm,
                      double omega_mev, double omega_prime_mev, const QuadratureSpec& quad,
                      bool* converged_out = nullptr);

struct IndicatorComponents {
  double C = 0.0;      // thermal (inelastic-scattering) part, real >= 0
  cplx B;              // pair-generation part
  double norm = 0.0;   // N = sum_M R(z; omega_M, omega_M) / 2
  bool converged = true;
};

IndicatorComponents indicator_components(const LayerStack& stack, const HarmonicBasis& basis,
                                         const QuadraturePairSpec& pair, double z_nm,
                                         double temperature_k, const QuadratureSpec& quad);

// Normalized indicator I/N = (C - |B|)/N.
double indicator(const LayerStack& stack, const HarmonicBasis& basis,
                 const QuadraturePairSpec& pair, double z_nm, double temperature_k,
                 const QuadratureSpec& quad);

struct IndicatorGrid {
  std::vector<double> z_grid_nm;
  std::vector<double> T_grid_k;
  std::vector<std::vector<double>> values;              // [zi][ti] = I/N
  std::vector<std::pair<double, double>> zero_contour;  // (z, T) of I = 0 crossings
  std::vector<std::pair<int, int>> nonmonotonic_cells;  // I/N not nonincreasing in T
  bool converged = true;
};

// Grid evaluation; the kpar integrals run once per z, temperatures reweight.
IndicatorGrid indicator_grid(const LayerStack& stack, const HarmonicBasis& basis,
                             const QuadraturePairSpec& pair, const std::vector<double>& z_grid_nm,
                             const std::vector<double>& T_grid_k, const QuadratureSpec& quad);

} // namespace nfdce
