// floquet.hpp - coupled-harmonic scattering of the time-modulated planar stack.
//
// For a fixed in-plane wavevector kpar and polarization, the modulated layer
// couples field harmonics at omega_l = omega + l*Omega (kpar is conserved).
// This module solves the multilayer boundary-value problem for plane-wave
// excitation at any harmonic from either half-space and exposes the
// two-frequency Weyl Green's amplitudes built from those solutions.
//
// Internally frequencies are converted to wavevector units (omega/(hbar c),
// 1/nm) so eps0 and mu0 drop out; Green's amplitudes carry units of nm.
//
// Field conventions (time dependence e^{-i omega t}):
//   s-pol: X = E_y,  Y = dX/dz            (continuous at interfaces)
//   p-pol: X = H_y,  Y_m = omega_m*eps0*E_x,m  (the omega_m scaling keeps the
//          continuity pair finite at near-zero harmonic frequencies)
// Static region of permittivity eps at harmonic m:  Y = +-y X with
//   y = i k_z (s),  y = k_z/eps (p)  for up/down waves.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nfdce/stack.hpp"

namespace nfdce {

struct HarmonicBasis {
  double mod_energy_mev = 0.0;    // hbar*Omega > 0
  double output_energy_mev = 0.0; // hbar*omega; signed (flux paths use omega > 0)
  int trunc = 3;                  // N_h: retain l in [-N_h, N_h]

  int size() const { return 2 * trunc + 1; }
  int idx(int l) const { return l + trunc; }
  double harmonic_energy(int l) const { return output_energy_mev + l * mod_energy_mev; }
  void validate() const;
};

enum class Polarization { S, P };

struct PlaneWaveContext {
  double kpar_invnm = 0.0;
  Polarization pol = Polarization::P;
};

// z-wavenumber sqrt(eps w^2/c^2 - kpar^2) with Im kz >= 0; on the real branch
// sign(Re kz) = sign(omega), so kz(-w, eps*) = -kz(w, eps)*.
cplx kz_branch(cplx eps, double omega_mev, double kpar_invnm);

struct FloquetLayerModes {
  Eigen::VectorXcd q;    // layer z-propagation constants, Im q >= 0
  Eigen::MatrixXcd V;    // X-field harmonic mixing (columns = modes)
  Eigen::MatrixXcd Psi;  // Y-field mixing for the same (a,b) amplitudes
};

// Eigen-decomposition of the harmonic-coupling operator in the modulated layer.
// s-pol acts on E_y with K = Wt^2 T - kpar^2, p-pol on H_y with K = Wt T Wt - kpar^2
// (Wt = diag(omega_l/c), T the permittivity Toeplitz matrix).
FloquetLayerModes layer_mode_decomposition(const ModulatedLayerSpec& layer,
                                           const PlaneWaveContext& ctx, const HarmonicBasis& basis);

enum class SourceSide { Body1 = 1, Body2 = 2 };

// Per-source plane-wave amplitudes of every harmonic in every region.
// Field representations (d = gap, h = modulated layer thickness):
//   body1: t_m e^{+i k1_m (z-d)}   (+ the incident e^{-i k1_l (z-d)} if side=Body1)
//   gap:   U_m e^{+i kv_m z} + D_m e^{-i kv_m (z-d)}
//   layer: X(z) = V (diag e^{i q (z+h)} a + diag e^{-i q z} b)
//   body2: c_m e^{-i k2_m (z+h)}   (+ the incident e^{+i k2_l (z+h)} if side=Body2)
struct StackSolution {
  Eigen::VectorXcd t, c, U, D, a, b;
};

struct SolveOptions {
  bool force_redheffer = false;
  double rcond_threshold = 1e-12; // direct-path condition limit before fallback
};

// One (omega, kpar, pol) assembly; factors the interface problem once and
// solves for unit incidence at every harmonic from both sides.
class StackScattering {
 public:
  StackScattering(const LayerStack& stack, const PlaneWaveContext& ctx, const HarmonicBasis& basis,
                  const SolveOptions& opts = {});

  const HarmonicBasis& basis() const { return basis_; }
  const PlaneWaveContext& ctx() const { return ctx_; }
  const LayerStack& stack() const { return *stack_; }
  int size() const { return basis_.size(); }

  const StackSolution& solution(SourceSide side, int l_src) const;

  // Outgoing amplitude at harmonic m into tgt_body for unit incidence at
  // harmonic l from src_body's side (the generalized S-operator).
  cplx s_amplitude(int tgt_body, int m_out, int src_body, int l_src) const;

  enum class Path { Direct, Redheffer };
  Path assembly_path() const { return path_; }

  // per-harmonic static-region data (index by harmonic l, not array index)
  cplx kz_body1(int l) const { return kz1_[basis_.idx(l)]; }
  cplx kz_gap(int l) const { return kzv_[basis_.idx(l)]; }
  cplx kz_body2(int l) const { return kz2_[basis_.idx(l)]; }
  cplx eps_body1(int l) const { return eps1_[basis_.idx(l)]; }
  cplx eps_body2(int l) const { return eps2_[basis_.idx(l)]; }
  const FloquetLayerModes& layer_modes() const { return modes_; }
  const Eigen::MatrixXcd& layer_eps_toeplitz_inv() const { return Tinv_; }

  // Largest relative tangential-field mismatch over the three interfaces and
  // all harmonics; recomputed from the region representations.
  double bc_residual(SourceSide side, int l_src) const;

 private:
  void assemble_direct();
  void assemble_redheffer();
  void finish_solution(StackSolution& sol, SourceSide side, int l_src,
                       const Eigen::VectorXcd& ab) const;

  const LayerStack* stack_;
  PlaneWaveContext ctx_;
  HarmonicBasis basis_;
  SolveOptions opts_;
  Path path_ = Path::Direct;

  FloquetLayerModes modes_;
  Eigen::MatrixXcd Tinv_;
  Eigen::VectorXcd kz1_, kzv_, kz2_, eps1_, eps2_;
  Eigen::VectorXcd y1_, yv_, y2_;   // static-region Y factors
  Eigen::VectorXcd Egap_, P_;       // e^{i kv d}, e^{i q h}
  Eigen::VectorXcd rho1_, t1in_, chi_;
  std::vector<StackSolution> sols_; // [side=0 body1 | 1 body2][l]
};

// Weyl-amplitude evaluator for a point source at harmonic l_src inside body
// alpha.  The full Green's amplitude factorizes as
//   g_ij(z, z') = coeff_ij(z) * e^{ i source_kz * depth(z') }
// with depth the distance from the source to its body's interface; coeff
// includes the homogeneous-source dressing i/(2 kz_src) and, for p-pol, the
// source polarization components.  Only the output harmonic m=0 carries the
// flux/overlap quantities; other harmonics are available for diagnostics.
class GreensEval {
 public:
  GreensEval(const StackScattering& sc, SourceSide alpha, int l_src);

  Eigen::Matrix3cd coeff(double z_obs, int m_out = 0) const;
  // interface points are ambiguous by position; kernels need the body-side fields
  Eigen::Matrix3cd coeff_region(double z_obs, RegionId region, int m_out = 0) const;
  cplx source_kz() const { return kz_src_; }
  double source_depth(double z_src) const; // throws if z_src not inside body alpha

 private:
  const StackScattering* sc_;
  SourceSide alpha_;
  int l_src_;
  cplx kz_src_;
  cplx dress_;      // i/(2 kz_src) and the p-pol E->H source conversion
  cplx src_px_, src_py_, src_pz_; // source polarization components
};

// Public two-frequency Green's amplitude (output frequency = basis omega,
// source frequency = omega + l*Omega), i,j in {0,1,2} = {x,y,z}.
// The source must lie inside a lossy half-space.
cplx greens_planewave(const LayerStack& stack, const PlaneWaveContext& ctx,
                      const HarmonicBasis& basis, int l, double z_obs_nm, double z_src_nm,
                      int i, int j);

} // namespace nfdce
