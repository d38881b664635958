// materials.hpp - dispersive permittivity models evaluated at signed frequencies.

#pragma once

#include <complex>
#include <map>
#include <string>
#include <variant>

namespace nfdce {

using cplx = std::complex<double>;

// Lorentz oscillator eps(w) = eps_inf * (1 + (wL^2 - wT^2) / (wT^2 - w^2 - i*gamma*w)).
// All parameters are energies in meV.
struct LorentzParams {
  double eps_inf = 1.0;
  double omega_L_mev = 0.0;
  double omega_T_mev = 0.0;
  double gamma_mev = 0.0;

  void validate() const; // throws std::invalid_argument on bad parameters
};

// Polar-dielectric defaults used throughout.
LorentzParams quartz_params();
LorentzParams inp_params();

// eps_3(t) = eps_static + delta_eps * cos(Omega t); lossless at every harmonic.
struct ModulatedLayerSpec {
  double eps_static = 4.0;
  double delta_eps = 0.4;
  double mod_freq_mev = 0.0; // hbar*Omega

  void validate() const;
};

struct ConstantEps {
  cplx value{1.0, 0.0};
};

struct Material {
  std::variant<LorentzParams, ConstantEps, ModulatedLayerSpec> model;
  std::string name; // optional label for error messages

  bool is_modulated() const { return std::holds_alternative<ModulatedLayerSpec>(model); }
  bool is_lossless() const;
};

Material make_lorentz(const LorentzParams& p, std::string name = "");
Material make_constant(cplx eps, std::string name = "");
Material make_modulated(const ModulatedLayerSpec& m, std::string name = "");

// Permittivity at a signed real frequency (meV).  Reality condition
// eps(-w) = conj(eps(w)) holds; the modulated material reports its static part.
cplx permittivity(const Material& m, double omega_mev);

// Im eps; antisymmetric in omega, zero for lossless materials.
double permittivity_im(const Material& m, double omega_mev);

// Fourier coefficients of eps_3(t) in the e^{-i l Omega t} basis:
// {0 -> eps_static, +-1 -> delta_eps/2}; all other indices absent (zero).
std::map<int, double> fourier_harmonics(const ModulatedLayerSpec& m);

// Root of Re eps(w) = -1 with gamma = 0 (nonretarded single-interface surface
// mode), bracketed in (omega_T, omega_L).  Throws std::runtime_error if the
// parameters admit no root there.
double surface_polariton_frequency(const LorentzParams& p, double rel_tol = 1e-10);

} // namespace nfdce
