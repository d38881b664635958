#include "nfdce/fluxes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nfdce/units.hpp"

namespace nfdce {

namespace {
constexpr double kPi = 3.14159265358979323846;
double wnum(double mev) { return mev / units::hbar_c_mev_nm; }

// keep adaptive nodes off exact multiples of Omega (harmonic at zero)
double offset_from_harmonics(double w, double mod) {
  const double r = std::round(w / mod) * mod;
  if (std::abs(w - r) < 1e-7) return w + 1e-5 * 0.6180339887498949 * mod;
  return w;
}
} // namespace

double bose_einstein(double omega_mev, double temperature_k) {
  if (omega_mev == 0.0) throw std::domain_error("bose_einstein: omega = 0");
  if (temperature_k < 0.0) throw std::domain_error("bose_einstein: T < 0");
  if (temperature_k == 0.0) return omega_mev > 0.0 ? 0.0 : -1.0;
  const double x = omega_mev / (units::boltzmann_mev_per_k * temperature_k);
  return 1.0 / std::expm1(x);
}

namespace {

// Closed-form volume kernel for one (source body, harmonic) -> (target body)
// channel at the solve's (omega, kpar, pol).
double kernel_channel(const StackScattering& sc, const GreensEval& ev, SourceSide alpha, int l,
                      int beta) {
  const HarmonicBasis& basis = sc.basis();
  const LayerStack& stack = sc.stack();
  const double w0 = basis.output_energy_mev;
  const double wl = basis.harmonic_energy(l);

  const double im_src = ev.source_kz().imag();
  const cplx kz_b = beta == 1 ? sc.kz_body1(0) : sc.kz_body2(0);
  const double im_obs = kz_b.imag();

  const double eps_b = permittivity_im(stack.body(beta), w0);
  const double eps_a = std::abs(permittivity_im(stack.body(alpha == SourceSide::Body1 ? 1 : 2), wl));
  if (eps_b <= 0.0 || eps_a <= 0.0) return 0.0;

  const Eigen::Matrix3cd coef =
      beta == 1 ? ev.coeff_region(stack.gap_nm(), RegionId::Body1, 0)
                : ev.coeff_region(-stack.mod_thickness_nm(), RegionId::Body2, 0);
  const double s2 = coef.squaredNorm();
  const double zints = 1.0 / (2.0 * im_obs) / (2.0 * im_src);
  const double wtl2 = wnum(wl) * wnum(wl);
  return (2.0 / kPi) * wtl2 * wtl2 * eps_b * eps_a * s2 * zints;
}

// Fills out[beta-1][idx(l)] with the alpha-summed kernels at one (omega, kpar),
// both polarizations, skipping the excluded elastic self channels.
void kernels_at(const LayerStack& stack, double mod_freq, int nh, double omega, double kpar,
                bool want_body2, std::array<Eigen::ArrayXd, 2>& out) {
  const int m = 2 * nh + 1;
  out[0].setZero(m);
  out[1].setZero(m);
  HarmonicBasis basis{mod_freq, omega, nh};
  for (Polarization pol : {Polarization::S, Polarization::P}) {
    StackScattering sc(stack, PlaneWaveContext{kpar, pol}, basis);
    for (SourceSide alpha : {SourceSide::Body1, SourceSide::Body2}) {
      const int ai = alpha == SourceSide::Body1 ? 1 : 2;
      for (int l = -nh; l <= nh; ++l) {
        GreensEval ev(sc, alpha, l);
        if (!(l == 0 && ai == 1)) out[0][basis.idx(l)] += kernel_channel(sc, ev, alpha, l, 1);
        if (want_body2 && !(l == 0 && ai == 2))
          out[1][basis.idx(l)] += kernel_channel(sc, ev, alpha, l, 2);
      }
    }
  }
}

} // namespace

double pair_kernel(const LayerStack& stack, const HarmonicBasis& basis, int l,
                   const PlaneWaveContext& ctx, int beta, int alpha) {
  if (beta < 1 || beta > 2 || alpha < 1 || alpha > 2)
    throw std::invalid_argument("pair_kernel: bodies are 1 or 2");
  if (l == 0 && beta == alpha)
    throw std::invalid_argument("pair_kernel: the elastic self channel is volume-divergent "
                                "for half-spaces and carries no flux; it is excluded");
  if (stack.body(alpha).is_lossless() || stack.body(beta).is_lossless())
    throw std::invalid_argument("pair_kernel: both bodies must be lossy");
  StackScattering sc(stack, ctx, basis);
  GreensEval ev(sc, alpha == 1 ? SourceSide::Body1 : SourceSide::Body2, l);
  return kernel_channel(sc, ev, alpha == 1 ? SourceSide::Body1 : SourceSide::Body2, l, beta);
}

SpectrumPoint photon_flux_spectrum(const LayerStack& stack, const HarmonicBasis& basis, int l,
                                   const QuadratureSpec& quad) {
  if (!(basis.output_energy_mev > 0.0))
    throw std::invalid_argument("photon_flux_spectrum: omega must be > 0");
  const int nh = basis.trunc;
  std::array<Eigen::ArrayXd, 2> kern;
  auto fn = [&](double k, std::vector<double>& out) {
    if (k <= 0.0) { out[0] = out[1] = 0.0; return; }
    kernels_at(stack, basis.mod_energy_mev, nh, basis.output_energy_mev, k, true, kern);
    out[0] = kern[0][basis.idx(l)] * k / (2.0 * kPi);
    out[1] = kern[1][basis.idx(l)] * k / (2.0 * kPi);
  };
  const auto r = integrate_kpar_vec(fn, 2, basis.output_energy_mev, stack.gap_nm(), quad);
  return SpectrumPoint{r.value[0], r.value[1], r.converged};
}

std::vector<double> resonance_seeds(const LayerStack& stack, double mod_freq_mev, int nh) {
  std::vector<double> base;
  for (const Material* m : {&stack.top_half_space, &stack.bottom_half_space}) {
    if (const auto* lp = std::get_if<LorentzParams>(&m->model)) {
      base.push_back(lp->omega_T_mev);
      base.push_back(lp->omega_L_mev);
      base.push_back(surface_polariton_frequency(*lp));
    }
  }
  std::vector<double> seeds;
  for (double s : base) {
    for (int l = -nh; l <= nh; ++l) {
      for (double sgn : {1.0, -1.0}) {
        double v = sgn * s - l * mod_freq_mev;
        if (v > 0.0) seeds.push_back(offset_from_harmonics(v, mod_freq_mev));
      }
    }
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

namespace {

// merged positive omega-intervals covering the window and its harmonic images
std::vector<std::pair<double, double>> flux_domain(double lo, double hi, double mod, int nh) {
  std::vector<std::pair<double, double>> iv;
  for (int l = -nh; l <= nh; ++l) {
    for (double sgn : {1.0, -1.0}) {
      double a = sgn * (sgn > 0 ? lo : hi) - l * mod;
      double b = sgn * (sgn > 0 ? hi : lo) - l * mod;
      a = std::max(a, 1e-3);
      if (b > a) iv.emplace_back(a, b);
    }
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second + 1e-12)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  return merged;
}

} // namespace

FluxComputation compute_fluxes(const LayerStack& stack, double mod_freq_mev, int nh,
                               const std::vector<double>& temperatures_k,
                               const QuadratureSpec& quad) {
  validate_stack(stack);
  quad.validate();
  if (!(mod_freq_mev > 0.0)) throw std::invalid_argument("compute_fluxes: Omega must be > 0");
  if (nh < 1) throw std::invalid_argument("compute_fluxes: nh must be >= 1");
  if (temperatures_k.empty())
    throw std::invalid_argument("compute_fluxes: need at least one temperature");

  const int nt = static_cast<int>(temperatures_k.size());
  const int dim = 2 + 2 * nt; // [Q, T..., Y..., gross]
  const int m = 2 * nh + 1;

  bool inner_ok = true;
  long inner_evals = 0;
  std::array<Eigen::ArrayXd, 2> kern;

  auto integrand = [&](double omega_raw, std::vector<double>& out) {
    const double omega = offset_from_harmonics(omega_raw, mod_freq_mev);
    // inner k-integral of all retained channels at this omega
    std::vector<double> fl(m, 0.0);
    auto fn = [&](double k, std::vector<double>& kout) {
      if (k <= 0.0) { std::fill(kout.begin(), kout.end(), 0.0); return; }
      kernels_at(stack, mod_freq_mev, nh, omega, k, false, kern);
      for (int i = 0; i < m; ++i) kout[i] = kern[0][i] * k / (2.0 * kPi);
    };
    const auto kr = integrate_kpar_vec(fn, m, omega, stack.gap_nm(), quad);
    inner_ok = inner_ok && kr.converged;
    inner_evals += kr.evals;
    for (int i = 0; i < m; ++i) fl[i] = kr.value[i];

    std::fill(out.begin(), out.end(), 0.0);
    for (int l = -nh; l <= nh; ++l) {
      const double wl = omega + l * mod_freq_mev;
      const double f = fl[l + nh];
      if (l != 0 && wl < 0.0) {
        out[0] += omega * f; // quantum pair generation
        for (int i = 0; i < nt; ++i) {
          const double T = temperatures_k[i];
          if (T > 0.0)
            out[1 + i] += omega * (bose_einstein(omega, T) + bose_einstein(-wl, T)) * f;
        }
      } else if (l != 0 && wl > 0.0) {
        for (int i = 0; i < nt; ++i) {
          const double T = temperatures_k[i];
          if (T > 0.0)
            out[1 + nt + i] += omega * (bose_einstein(wl, T) - bose_einstein(omega, T)) * f;
        }
      }
    }
    if (temperatures_k[0] > 0.0)
      out[1 + 2 * nt] = omega * bose_einstein(omega, temperatures_k[0]) * fl[nh];
  };

  const auto seeds = resonance_seeds(stack, mod_freq_mev, nh);
  const auto domain =
      flux_domain(quad.omega_window_lo_mev, quad.omega_window_hi_mev, mod_freq_mev, nh);

  std::vector<double> total(dim, 0.0);
  bool outer_ok = true;
  long evals = 0;
  for (const auto& [a, b] : domain) {
    const auto r = integrate_adaptive_vec(integrand, dim, a, b, quad, seeds);
    for (int i = 0; i < dim; ++i) total[i] += r.value[i];
    outer_ok = outer_ok && r.converged;
    evals += r.evals;
  }

  const double conv = units::mev2_per_nm2_to_w_per_m2;
  FluxComputation res;
  res.temperatures_k = temperatures_k;
  res.converged = outer_ok && inner_ok;
  res.evals = evals + inner_evals;
  res.gross_one_way_w_m2 = conv * total[1 + 2 * nt];
  for (int i = 0; i < nt; ++i) {
    FluxBreakdown fb;
    fb.phi_q = conv * total[0];
    fb.phi_t = conv * total[1 + i];
    fb.upsilon = conv * total[1 + nt + i];
    fb.q_net = fb.phi_q + fb.phi_t + fb.upsilon;
    const double denom = std::abs(fb.phi_t + fb.upsilon);
    fb.dominance = denom > 0.0 ? std::abs(fb.phi_q) / denom - 1.0
                               : std::numeric_limits<double>::infinity();
    res.per_temperature.push_back(fb);
  }
  return res;
}

double casimir_flux_quantum(const LayerStack& s, const HarmonicBasis& b,
                            const QuadratureSpec& q) {
  return compute_fluxes(s, b.mod_energy_mev, b.trunc, {0.0}, q).per_temperature[0].phi_q;
}

double casimir_flux_thermal(const LayerStack& s, const HarmonicBasis& b, double T_k,
                            const QuadratureSpec& q) {
  return compute_fluxes(s, b.mod_energy_mev, b.trunc, {T_k}, q).per_temperature[0].phi_t;
}

double inelastic_flux(const LayerStack& s, const HarmonicBasis& b, double T_k,
                      const QuadratureSpec& q) {
  return compute_fluxes(s, b.mod_energy_mev, b.trunc, {T_k}, q).per_temperature[0].upsilon;
}

FluxBreakdown net_flux_and_dominance(const LayerStack& s, const HarmonicBasis& b, double T_k,
                                     const QuadratureSpec& q) {
  return compute_fluxes(s, b.mod_energy_mev, b.trunc, {T_k}, q).per_temperature[0];
}

SpectralFluxTable compute_spectra(const LayerStack& stack, double mod_freq_mev, int nh,
                                  const std::vector<int>& harmonics,
                                  const std::vector<double>& omega_grid_mev,
                                  const QuadratureSpec& quad) {
  SpectralFluxTable tab;
  tab.omega_grid_mev = omega_grid_mev;
  tab.harmonics = harmonics;
  tab.f1.assign(harmonics.size(), std::vector<double>(omega_grid_mev.size(), 0.0));
  tab.f2 = tab.f1;

  const int m = 2 * nh + 1;
  std::array<Eigen::ArrayXd, 2> kern;
  for (std::size_t wi = 0; wi < omega_grid_mev.size(); ++wi) {
    const double omega = offset_from_harmonics(omega_grid_mev[wi], mod_freq_mev);
    auto fn = [&](double k, std::vector<double>& out) {
      if (k <= 0.0) { std::fill(out.begin(), out.end(), 0.0); return; }
      kernels_at(stack, mod_freq_mev, nh, omega, k, true, kern);
      for (int i = 0; i < m; ++i) {
        out[i] = kern[0][i] * k / (2.0 * kPi);
        out[m + i] = kern[1][i] * k / (2.0 * kPi);
      }
    };
    const auto r = integrate_kpar_vec(fn, 2 * m, omega, stack.gap_nm(), quad);
    tab.converged = tab.converged && r.converged;
    for (std::size_t li = 0; li < harmonics.size(); ++li) {
      const int idx = harmonics[li] + nh;
      tab.f1[li][wi] = r.value[idx];
      tab.f2[li][wi] = r.value[m + idx];
    }
  }
  return tab;
}

} // namespace nfdce
