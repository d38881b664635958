// fluxes.hpp - photon-number conversion spectra and the Casimir/inelastic fluxes.
//
// The per-(kpar, pol) pair kernel is the in-plane-resolved integrand of the
// conversion spectrum: with g the Weyl Green's amplitude (source slot omega_l,
// output slot omega) and closed-form z-integrals over the two half-spaces,
//
//   kernel = (2/pi) (omega_l/c)^4 eps''_beta(omega) |eps''_alpha(omega_l)|
//            * sum_ij |g_ij|^2-integrated,
//
// normalized so that at delta_eps = 0, l = 0 it equals tau/(2pi) with tau the
// Polder-van-Hove two-slab transmission; spectra integrate it over
// k dk/(2pi) and both polarizations.  F is stored nonnegative (the source-side
// eps'' enters in magnitude); the flux assembly applies the sign bookkeeping,
// with positive values meaning energy received by body 1.

#pragma once

#include <array>
#include <vector>

#include "nfdce/floquet.hpp"
#include "nfdce/quadrature.hpp"

namespace nfdce {

// n(omega) = 1/(exp(hbar omega / kB T) - 1); omega in meV (signed, nonzero).
double bose_einstein(double omega_mev, double temperature_k);

// Eq.-4 integrand at one (omega via basis, kpar, pol): conversion of source
// harmonic l in body alpha to output frequency omega absorbed in body beta.
// The l = 0, beta = alpha elastic self term is volume-divergent for
// half-spaces and carries no flux; requesting it is an error.
double pair_kernel(const LayerStack& stack, const HarmonicBasis& basis, int l,
                   const PlaneWaveContext& ctx, int beta, int alpha);

struct SpectrumPoint {
  double f1 = 0.0, f2 = 0.0; // F_beta^(l)(omega), photons per (s m^2) per meV, >= 0
  bool converged = true;
};

// k-integral of the pair kernel, both polarizations, summed over source bodies.
SpectrumPoint photon_flux_spectrum(const LayerStack& stack, const HarmonicBasis& basis, int l,
                                   const QuadratureSpec& quad);

struct FluxBreakdown {
  double phi_q = 0.0;     // quantum Casimir flux, W/m^2
  double phi_t = 0.0;     // thermal Casimir flux, W/m^2
  double upsilon = 0.0;   // inelastic scattering flux, W/m^2 (signed)
  double q_net = 0.0;     // phi_q + phi_t + upsilon
  double dominance = 0.0; // L = |phi_q| / |phi_t + upsilon| - 1 (+inf at T = 0)
};

struct FluxComputation {
  std::vector<double> temperatures_k;
  std::vector<FluxBreakdown> per_temperature;
  double gross_one_way_w_m2 = 0.0; // elastic one-way flux at temperatures[0]
  bool converged = true;
  long evals = 0;
};

// One adaptive omega-pass producing the flux decomposition at every requested
// temperature (the temperature only reweights the shared spectral tables).
// The omega domain is the configured window plus its l-shifted images so no
// retained conversion channel is truncated.
FluxComputation compute_fluxes(const LayerStack& stack, double mod_freq_mev, int nh,
                               const std::vector<double>& temperatures_k,
                               const QuadratureSpec& quad);

// Spec-level wrappers.
double casimir_flux_quantum(const LayerStack& s, const HarmonicBasis& b, const QuadratureSpec& q);
double casimir_flux_thermal(const LayerStack& s, const HarmonicBasis& b, double T_k,
                            const QuadratureSpec& q);
double inelastic_flux(const LayerStack& s, const HarmonicBasis& b, double T_k,
                      const QuadratureSpec& q);
FluxBreakdown net_flux_and_dominance(const LayerStack& s, const HarmonicBasis& b, double T_k,
                                     const QuadratureSpec& q);

struct SpectralFluxTable {
  std::vector<double> omega_grid_mev;
  std::vector<int> harmonics;                           // retained l values
  std::vector<std::vector<double>> f1, f2;              // [l-index][omega-index]
  bool converged = true;
};

SpectralFluxTable compute_spectra(const LayerStack& stack, double mod_freq_mev, int nh,
                                  const std::vector<int>& harmonics,
                                  const std::vector<double>& omega_grid_mev,
                                  const QuadratureSpec& quad);

// Panel seeds for the omega integrals: reststrahlen edges, the surface-mode
// frequencies and their harmonic images.
std::vector<double> resonance_seeds(const LayerStack& stack, double mod_freq_mev, int nh);

} // namespace nfdce
