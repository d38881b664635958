#include "nfdce/nonclassicality.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "nfdce/units.hpp"

namespace nfdce {

namespace {
constexpr double kPi = 3.14159265358979323846;
double wnum(double mev) { return mev / units::hbar_c_mev_nm; }

// x-reflection parity of the dyadic components, used with the reality map
double parity(int i, int j) {
  const double p[3] = {-1.0, 1.0, 1.0};
  return p[i] * p[j];
}

} // namespace

void QuadraturePairSpec::validate() const {
  if (!(mod_energy_mev > 0.0))
    throw std::invalid_argument("QuadraturePairSpec: modulation energy must be > 0");
  if (delta_omega_mev < 0.0 || !(omega_minus() > 0.0))
    throw std::invalid_argument("QuadraturePairSpec: require 0 <= delta_omega < Omega/2");
}

cplx response_overlap(const LayerStack& stack, const HarmonicBasis& basis, double z_nm,
                      double omega_mev, double omega_prime_mev, const QuadratureSpec& quad,
                      bool* converged_out) {
  validate_stack(stack);
  if (region_of(stack, z_nm) != RegionId::Gap)
    throw std::invalid_argument("response_overlap: observation point must lie in the gap");
  if (!(omega_prime_mev > 0.0))
    throw std::invalid_argument("response_overlap: omega' must be > 0");
  const double lr = (omega_prime_mev - omega_mev) / basis.mod_energy_mev;
  const int l_rel = static_cast<int>(std::lround(lr));
  if (std::abs(lr - l_rel) > 1e-9 || std::abs(l_rel) > basis.trunc)
    throw std::invalid_argument("response_overlap: omega' - omega must be a retained multiple "
                                "of the modulation energy");

  const bool negative_first = omega_mev < 0.0;

  auto contraction = [&](double kpar, Polarization pol) -> cplx {
    const PlaneWaveContext ctx{kpar, pol};
    cplx sum = 0.0;

    // elastic solve at output omega'
    HarmonicBasis b_el = basis;
    b_el.output_energy_mev = omega_prime_mev;
    StackScattering sc_el(stack, ctx, b_el);

    // conversion solve: direct at output omega (omega > 0) or, via the reality
    // condition, at output -omega with the opposite source harmonic.
    HarmonicBasis b_cv = basis;
    b_cv.output_energy_mev = negative_first ? -omega_mev : omega_mev;
    const int l_cv = negative_first ? -l_rel : l_rel;
    const bool same = !negative_first && omega_mev == omega_prime_mev && l_rel == 0;
    std::optional<StackScattering> sc_cv_store;
    if (!same) sc_cv_store.emplace(stack, ctx, b_cv);
    const StackScattering& sc_cv = same ? sc_el : *sc_cv_store;

    for (SourceSide alpha : {SourceSide::Body1, SourceSide::Body2}) {
      const int ai = alpha == SourceSide::Body1 ? 1 : 2;
      const double epp = std::abs(permittivity_im(stack.body(ai), omega_prime_mev));
      if (epp <= 0.0) continue;

      GreensEval evB(sc_el, alpha, 0);
      GreensEval evA(sc_cv, alpha, l_cv);
      const Eigen::Matrix3cd cb = evB.coeff(z_nm, 0);
      const Eigen::Matrix3cd ca = evA.coeff(z_nm, 0);

      cplx contr = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (negative_first)
            contr += parity(i, j) * std::conj(ca(i, j) * cb(i, j));
          else
            contr += ca(i, j) * std::conj(cb(i, j));
        }

      const double im_src = evB.source_kz().imag();
      const double w4 = std::pow(wnum(omega_prime_mev), 4);
      sum += contr * epp * w4 / (2.0 * im_src);
    }
    return sum;
  };

  // kpar integral; the spectral content dies off over the smaller of the two
  // source-to-observation distances
  const double d_eff = std::min(stack.gap_nm() - z_nm, z_nm + stack.mod_thickness_nm());
  const double w_scale = std::max(std::abs(omega_mev), omega_prime_mev);

  auto fn = [&](double k, std::vector<double>& out) {
    if (k <= 0.0) { out[0] = out[1] = 0.0; return; }
    cplx v = 0.0;
    for (Polarization pol : {Polarization::S, Polarization::P})
      v += contraction(k, pol) * k / (2.0 * kPi);
    out[0] = v.real();
    out[1] = v.imag();
  };
  const auto r = integrate_kpar_vec(fn, 2, w_scale, std::max(d_eff, 1e-3), quad);
  if (converged_out) *converged_out = r.converged;
  return cplx(r.value[0], r.value[1]);
}

IndicatorComponents indicator_components(const LayerStack& stack, const HarmonicBasis& basis,
                                         const QuadraturePairSpec& pair, double z_nm,
                                         double temperature_k, const QuadratureSpec& quad) {
  pair.validate();
  if (temperature_k < 0.0) throw std::invalid_argument("indicator_components: T < 0");

  const double wm[2] = {pair.omega_minus(), pair.omega_plus()};
  IndicatorComponents out;
  out.B = 0.0;
  for (int mi = 0; mi < 2; ++mi) {
    const double w = wm[mi];
    bool ok1 = true, ok2 = true;
    const cplx r_el = response_overlap(stack, basis, z_nm, w, w, quad, &ok1);
    const cplx r_cv =
        response_overlap(stack, basis, z_nm, w - pair.mod_energy_mev, w, quad, &ok2);
    out.converged = out.converged && ok1 && ok2;
    const double n = temperature_k > 0.0 ? bose_einstein(w, temperature_k) : 0.0;
    out.C += r_el.real() * n;
    out.norm += 0.5 * r_el.real();
    out.B += r_cv * (2.0 * n + 1.0);
    if (pair.delta_omega_mev == 0.0) { // degenerate: both modes coincide
      out.C += r_el.real() * n;
      out.norm += 0.5 * r_el.real();
      out.B += r_cv * (2.0 * n + 1.0);
      break;
    }
  }
  return out;
}

double indicator(const LayerStack& stack, const HarmonicBasis& basis,
                 const QuadraturePairSpec& pair, double z_nm, double temperature_k,
                 const QuadratureSpec& quad) {
  const IndicatorComponents ic = indicator_components(stack, basis, pair, z_nm, temperature_k, quad);
  return (ic.C - std::abs(ic.B)) / ic.norm;
}

IndicatorGrid indicator_grid(const LayerStack& stack, const HarmonicBasis& basis,
                             const QuadraturePairSpec& pair, const std::vector<double>& z_grid_nm,
                             const std::vector<double>& T_grid_k, const QuadratureSpec& quad) {
  pair.validate();
  IndicatorGrid grid;
  grid.z_grid_nm = z_grid_nm;
  grid.T_grid_k = T_grid_k;
  grid.values.assign(z_grid_nm.size(), std::vector<double>(T_grid_k.size(), 0.0));

  const double wm[2] = {pair.omega_minus(), pair.omega_plus()};
  const bool degenerate = pair.delta_omega_mev == 0.0;

  for (std::size_t zi = 0; zi < z_grid_nm.size(); ++zi) {
    const double z = z_grid_nm[zi];
    double r_el[2];
    cplx r_cv[2];
    for (int mi = 0; mi < (degenerate ? 1 : 2); ++mi) {
      r_el[mi] = response_overlap(stack, basis, z, wm[mi], wm[mi], quad).real();
      r_cv[mi] = response_overlap(stack, basis, z, wm[mi] - pair.mod_energy_mev, wm[mi], quad);
    }
    if (degenerate) { r_el[1] = r_el[0]; r_cv[1] = r_cv[0]; }

    const double norm = 0.5 * (r_el[0] + r_el[1]);
    for (std::size_t ti = 0; ti < T_grid_k.size(); ++ti) {
      const double T = T_grid_k[ti];
      double C = 0.0;
      cplx B = 0.0;
      for (int mi = 0; mi < 2; ++mi) {
        const double n = T > 0.0 ? bose_einstein(wm[mi], T) : 0.0;
        C += r_el[mi] * n;
        B += r_cv[mi] * (2.0 * n + 1.0);
      }
      grid.values[zi][ti] = (C - std::abs(B)) / norm;
    }

    // zero crossing along T by linear interpolation
    for (std::size_t ti = 0; ti + 1 < T_grid_k.size(); ++ti) {
      const double v0 = grid.values[zi][ti], v1 = grid.values[zi][ti + 1];
      if (v0 < 0.0 && v1 >= 0.0) {
        const double t0 = T_grid_k[ti] +
                          (T_grid_k[ti + 1] - T_grid_k[ti]) * (0.0 - v0) / (v1 - v0);
        grid.zero_contour.emplace_back(z, t0);
        break;
      }
    }
    for (std::size_t ti = 0; ti + 1 < T_grid_k.size(); ++ti)
      if (grid.values[zi][ti + 1] > grid.values[zi][ti] + 1e-12)
        grid.nonmonotonic_cells.emplace_back(static_cast<int>(zi), static_cast<int>(ti + 1));
  }
  return grid;
}

} // namespace nfdce
