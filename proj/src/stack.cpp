#include "nfdce/stack.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nfdce {

const ModulatedLayerSpec& LayerStack::mod_spec() const {
  const auto* m = std::get_if<ModulatedLayerSpec>(&inner_layers.at(1).material.model);
  if (!m) throw std::logic_error("LayerStack: second inner layer is not the modulated layer");
  return *m;
}

LayerStack default_stack(double gap_nm, double delta_eps, double mod_freq_mev) {
  LayerStack s;
  s.top_half_space = make_lorentz(quartz_params(), "quartz");
  s.bottom_half_space = make_lorentz(inp_params(), "InP");
  s.inner_layers.push_back(Layer{make_constant(cplx(1.0, 0.0), "vacuum"), gap_nm});
  ModulatedLayerSpec mod{4.0, delta_eps, mod_freq_mev};
  s.inner_layers.push_back(Layer{make_modulated(mod, "modulated"), 22.0});
  return s;
}

void validate_stack(const LayerStack& s) {
  std::vector<std::string> problems;

  if (s.top_half_space.is_lossless())
    problems.push_back("body 1 must be lossy (fluctuating sources live in the half-spaces)");
  if (s.bottom_half_space.is_lossless())
    problems.push_back("body 2 must be lossy");
  if (s.top_half_space.is_modulated() || s.bottom_half_space.is_modulated())
    problems.push_back("half-spaces must be static media");

  if (s.inner_layers.size() != 2) {
    problems.push_back("expected exactly two inner layers: vacuum gap then modulated layer");
  } else {
    const Layer& gap = s.inner_layers[0];
    const Layer& mod = s.inner_layers[1];
    if (!(gap.thickness_nm > 0.0)) problems.push_back("gap thickness must be > 0");
    if (!(mod.thickness_nm > 0.0)) problems.push_back("modulated layer thickness must be > 0");
    const auto* g = std::get_if<ConstantEps>(&gap.material.model);
    if (!g || g->value != cplx(1.0, 0.0))
      problems.push_back("first inner layer must be the vacuum gap (eps = 1)");
    if (!gap.material.is_lossless()) problems.push_back("inner layers must be lossless");
    if (!std::holds_alternative<ModulatedLayerSpec>(mod.material.model))
      problems.push_back("second inner layer must be the modulated layer");
    else
      std::get<ModulatedLayerSpec>(mod.material.model).validate();
  }

  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid stack:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw std::invalid_argument(os.str());
  }
}

RegionId region_of(const LayerStack& s, double z_nm) {
  const double d = s.gap_nm();
  const double h = s.mod_thickness_nm();
  // boundaries belong to the lower region
  if (z_nm > d) return RegionId::Body1;
  if (z_nm > 0.0) return RegionId::Gap;
  if (z_nm > -h) return RegionId::ModLayer;
  return RegionId::Body2;
}

namespace {

double lossless_eps(const Material& m, double w) {
  if (const auto* lp = std::get_if<LorentzParams>(&m.model)) {
    const double wL2 = lp->omega_L_mev * lp->omega_L_mev;
    const double wT2 = lp->omega_T_mev * lp->omega_T_mev;
    return lp->eps_inf * (1.0 + (wL2 - wT2) / (wT2 - w * w));
  }
  return permittivity(m, w).real();
}

} // namespace

std::vector<std::vector<double>> gap_mode_dispersion(const LayerStack& s,
                                                     const std::vector<double>& kpar_grid_invnm) {
  validate_stack(s);
  for (double k : kpar_grid_invnm)
    if (!(k > 0.0)) throw std::invalid_argument("gap_mode_dispersion: kpar grid values must be > 0");

  // Reststrahlen windows of the Lorentz bodies; duplicates merged (mirror stacks).
  std::vector<std::pair<double, double>> windows;
  for (const Material* m : {&s.top_half_space, &s.bottom_half_space}) {
    if (const auto* lp = std::get_if<LorentzParams>(&m->model)) {
      std::pair<double, double> w{lp->omega_T_mev, lp->omega_L_mev};
      if (std::find(windows.begin(), windows.end(), w) == windows.end()) windows.push_back(w);
    }
  }

  const double d = s.gap_nm();
  // Pole-free form of the mode condition: both sides multiplied by (eps1+1)(eps2+1).
  auto g = [&](double w, double kpar) {
    const double e1 = lossless_eps(s.top_half_space, w);
    const double e2 = lossless_eps(s.bottom_half_space, w);
    const double attn = std::exp(-2.0 * kpar * d);
    return (e1 + 1.0) * (e2 + 1.0) - (e1 - 1.0) * (e2 - 1.0) * attn;
  };

  std::vector<std::vector<double>> out;
  out.reserve(kpar_grid_invnm.size());
  constexpr int scan_points = 600;
  for (double kpar : kpar_grid_invnm) {
    std::vector<double> roots;
    for (const auto& [wT, wL] : windows) {
      const double span = wL - wT;
      const double lo = wT + 1e-9 * span;
      const double hi = wL - 1e-9 * span;
      double prev_w = lo, prev_g = g(lo, kpar);
      for (int i = 1; i <= scan_points; ++i) {
        const double w = lo + (hi - lo) * i / scan_points;
        const double gw = g(w, kpar);
        if (prev_g == 0.0) roots.push_back(prev_w);
        if (prev_g * gw < 0.0) {
          double a = prev_w, b = w, ga = prev_g;
          for (int it = 0; it < 80 && (b - a) > 1e-12 * b; ++it) {
            const double mid = 0.5 * (a + b);
            const double gm = g(mid, kpar);
            if (ga * gm <= 0.0) b = mid;
            else { a = mid; ga = gm; }
          }
          roots.push_back(0.5 * (a + b));
        }
        prev_w = w;
        prev_g = gw;
      }
    }
    std::sort(roots.begin(), roots.end());
    out.push_back(std::move(roots));
  }
  return out;
}

} // namespace nfdce
