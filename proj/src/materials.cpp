#include "nfdce/materials.hpp"

#include <cmath>
#include <stdexcept>

namespace nfdce {

void LorentzParams::validate() const {
  if (!(omega_L_mev > omega_T_mev) || !(omega_T_mev > 0.0))
    throw std::invalid_argument("LorentzParams: require omega_L > omega_T > 0");
  if (!(gamma_mev > 0.0))
    throw std::invalid_argument("LorentzParams: require gamma > 0");
  if (!(eps_inf >= 1.0))
    throw std::invalid_argument("LorentzParams: require eps_inf >= 1");
}

LorentzParams quartz_params() { return LorentzParams{2.4, 50.0, 49.0, 0.26}; }
LorentzParams inp_params() { return LorentzParams{9.6, 43.0, 38.0, 0.43}; }

void ModulatedLayerSpec::validate() const {
  if (!(delta_eps >= 0.0) || !(eps_static > delta_eps))
    throw std::invalid_argument(
        "ModulatedLayerSpec: require eps_static > delta_eps >= 0 "
        "(permittivity must stay positive at all times)");
}

bool Material::is_lossless() const {
  if (std::holds_alternative<ModulatedLayerSpec>(model)) return true;
  if (const auto* c = std::get_if<ConstantEps>(&model)) return c->value.imag() == 0.0;
  return false; // Lorentz with gamma > 0
}

Material make_lorentz(const LorentzParams& p, std::string name) {
  p.validate();
  return Material{p, std::move(name)};
}

Material make_constant(cplx eps, std::string name) {
  return Material{ConstantEps{eps}, std::move(name)};
}

Material make_modulated(const ModulatedLayerSpec& m, std::string name) {
  m.validate();
  return Material{m, std::move(name)};
}

namespace {

cplx lorentz_eps(const LorentzParams& p, double w) {
  const double wL2 = p.omega_L_mev * p.omega_L_mev;
  const double wT2 = p.omega_T_mev * p.omega_T_mev;
  const cplx denom(wT2 - w * w, -p.gamma_mev * w);
  return p.eps_inf * (1.0 + (wL2 - wT2) / denom);
}

} // namespace

cplx permittivity(const Material& m, double omega_mev) {
  return std::visit(
      [omega_mev](const auto& model) -> cplx {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LorentzParams>) {
          return lorentz_eps(model, omega_mev);
        } else if constexpr (std::is_same_v<T, ConstantEps>) {
          // reality condition for a fixed complex sample
          return omega_mev >= 0.0 ? model.value : std::conj(model.value);
        } else {
          return cplx(model.eps_static, 0.0);
        }
      },
      m.model);
}

double permittivity_im(const Material& m, double omega_mev) {
  return permittivity(m, omega_mev).imag();
}

std::map<int, double> fourier_harmonics(const ModulatedLayerSpec& m) {
  std::map<int, double> h;
  h[0] = m.eps_static;
  if (m.delta_eps != 0.0) {
    h[1] = 0.5 * m.delta_eps;
    h[-1] = 0.5 * m.delta_eps;
  }
  return h;
}

double surface_polariton_frequency(const LorentzParams& p, double rel_tol) {
  p.validate();
  if (!(rel_tol > 0.0)) throw std::invalid_argument("surface_polariton_frequency: tol must be > 0");

  const double wL2 = p.omega_L_mev * p.omega_L_mev;
  const double wT2 = p.omega_T_mev * p.omega_T_mev;
  // f(w) = Re eps(w) + 1 with gamma = 0; monotone increasing on (omega_T, omega_L).
  auto f = [&](double w) { return p.eps_inf * (1.0 + (wL2 - wT2) / (wT2 - w * w)) + 1.0; };

  const double span = p.omega_L_mev - p.omega_T_mev;
  double a = p.omega_T_mev + 1e-12 * span;
  double b = p.omega_L_mev - 1e-12 * span;
  double fa = f(a), fb = f(b);
  if (fa * fb > 0.0)
    throw std::runtime_error("surface_polariton_frequency: no root of Re eps = -1 in (omega_T, omega_L)");

  while ((b - a) > rel_tol * b) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fa * fm <= 0.0) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

} // namespace nfdce
