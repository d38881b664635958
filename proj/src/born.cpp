#include "nfdce/born.hpp"

#include <cmath>
#include <stdexcept>

#include "nfdce/quadrature.hpp"
#include "nfdce/units.hpp"

namespace nfdce {

namespace {

constexpr cplx kI{0.0, 1.0};

double wnum(double mev) { return mev / units::hbar_c_mev_nm; }

// Static single-frequency stack response: everything referenced to the layer.
struct StaticFields {
  cplx q;            // layer z-wavenumber
  cplx r_top, r_bot; // reflection seen by layer waves at z=0 (up) and z=-h (down)
  cplx t_top, t_bot; // transmission from the layer edge waves into body 1 / body 2
  cplx delta;        // 1 - r_top r_bot e^{2iqh}
  double h, d;

  // cavity solutions: u_up has unit up-wave at z=0, u_dn unit down-wave at z=-h
  cplx u_up(double z) const { return std::exp(kI * q * z) + r_top * std::exp(-kI * q * z); }
  cplx u_dn(double z) const {
    return std::exp(-kI * q * (z + h)) + r_bot * std::exp(kI * q * (z + h));
  }
  cplx du_up(double z) const {
    return kI * q * (std::exp(kI * q * z) - r_top * std::exp(-kI * q * z));
  }
  cplx du_dn(double z) const {
    return kI * q * (-std::exp(-kI * q * (z + h)) + r_bot * std::exp(kI * q * (z + h)));
  }

  // outgoing amplitude coefficients per unit point source at zeta in the layer
  cplx to_body1(double zeta) const {
    return kI / (2.0 * q) * std::exp(kI * q * h) * u_dn(zeta) * t_top / delta;
  }
  cplx to_body2(double zeta) const {
    return kI / (2.0 * q) * std::exp(kI * q * h) * u_up(zeta) * t_bot / delta;
  }
};

StaticFields static_stack(const LayerStack& stack, const PlaneWaveContext& ctx, double w_mev) {
  const double eps3 = stack.mod_spec().eps_static;
  const cplx e1 = permittivity(stack.top_half_space, w_mev);
  const cplx e2 = permittivity(stack.bottom_half_space, w_mev);

  const cplx k1 = kz_branch(e1, w_mev, ctx.kpar_invnm);
  const cplx kv = kz_branch(cplx(1.0, 0.0), w_mev, ctx.kpar_invnm);
  const cplx k2 = kz_branch(e2, w_mev, ctx.kpar_invnm);
  const cplx q = kz_branch(cplx(eps3, 0.0), w_mev, ctx.kpar_invnm);

  const bool spol = ctx.pol == Polarization::S;
  const cplx y1 = spol ? kI * k1 : k1 / e1;
  const cplx yv = spol ? kI * kv : kv;
  const cplx y2 = spol ? kI * k2 : k2 / e2;
  const cplx y3 = spol ? kI * q : q / eps3;

  auto r = [](cplx ya, cplx yb) { return (ya - yb) / (ya + yb); };
  auto t = [](cplx ya, cplx yb) { return 2.0 * ya / (ya + yb); };

  StaticFields f;
  f.q = q;
  f.h = stack.mod_thickness_nm();
  f.d = stack.gap_nm();

  const cplx egap2 = std::exp(2.0 * kI * kv * f.d);
  f.r_top = (r(y3, yv) + r(yv, y1) * egap2) / (1.0 + r(y3, yv) * r(yv, y1) * egap2);
  f.t_top = t(y3, yv) * t(yv, y1) * std::exp(kI * kv * f.d) /
            (1.0 + r(y3, yv) * r(yv, y1) * egap2);
  f.r_bot = r(y3, y2);
  f.t_bot = t(y3, y2);
  f.delta = 1.0 - f.r_top * f.r_bot * std::exp(2.0 * kI * q * f.h);
  return f;
}

// Static layer field for unit tangential incidence; returns the coefficient A
// multiplying the boundary-matched cavity profile.
struct IncidentLayerField {
  cplx amp;
  bool from_below;
  const StaticFields* f;
  cplx value(double z) const { return amp * (from_below ? f->u_up(z) : f->u_dn(z)); }
  cplx deriv(double z) const { return amp * (from_below ? f->du_up(z) : f->du_dn(z)); }
};

IncidentLayerField incident_field(const LayerStack& stack, const PlaneWaveContext& ctx,
                                  double w_mev, SourceSide side, const StaticFields& f) {
  const double eps3 = stack.mod_spec().eps_static;
  const bool spol = ctx.pol == Polarization::S;
  const cplx e1 = permittivity(stack.top_half_space, w_mev);
  const cplx e2 = permittivity(stack.bottom_half_space, w_mev);
  const cplx k1 = kz_branch(e1, w_mev, ctx.kpar_invnm);
  const cplx kv = kz_branch(cplx(1.0, 0.0), w_mev, ctx.kpar_invnm);
  const cplx k2 = kz_branch(e2, w_mev, ctx.kpar_invnm);
  const cplx y1 = spol ? kI * k1 : k1 / e1;
  const cplx yv = spol ? kI * kv : kv;
  const cplx y2 = spol ? kI * k2 : k2 / e2;
  const cplx y3 = spol ? kI * f.q : f.q / eps3;

  IncidentLayerField fld{0.0, side == SourceSide::Body2, &f};
  if (side == SourceSide::Body2) {
    // unit up wave at z=-h from body 2: 1 + r = A u_up(-h), y2 (1 - r) = A Y(-h)
    // where the layer Y profile is y3 * du/(i q)  (s: Y = X'; p: Y = X'/(i eps3)).
    const cplx Y_h = y3 * f.du_up(-f.h) / (kI * f.q);
    fld.amp = 2.0 / (f.u_up(-f.h) + Y_h / y2);
  } else {
    // incidence from body 1: gap Fabry-Perot feeds a down wave at z=0
    const cplx egap = std::exp(kI * kv * f.d);
    auto r = [](cplx ya, cplx yb) { return (ya - yb) / (ya + yb); };
    auto t = [](cplx ya, cplx yb) { return 2.0 * ya / (ya + yb); };
    const cplx r_below = (r(yv, y3) + r(y3, y2) * std::exp(2.0 * kI * f.q * f.h)) /
                         (1.0 + r(yv, y3) * r(y3, y2) * std::exp(2.0 * kI * f.q * f.h));
    const cplx D = t(y1, yv) / (1.0 - r(yv, y1) * r_below * egap * egap);
    const cplx U0 = r_below * D * egap;
    fld.amp = (U0 + D * egap) / f.u_dn(0.0);
  }
  return fld;
}

} // namespace

FirstOrderAmplitudes perturbative_first_order(const LayerStack& stack,
                                              const PlaneWaveContext& ctx,
                                              const HarmonicBasis& basis, SourceSide side,
                                              int l) {
  if (l != 1 && l != -1)
    throw std::invalid_argument("perturbative_first_order: only |l| = 1 conversions");
  validate_stack(stack);
  basis.validate();

  const double w0 = basis.output_energy_mev;
  const double wl = basis.harmonic_energy(l);
  const double de = stack.mod_spec().delta_eps;
  const double eps3 = stack.mod_spec().eps_static;
  const double h = stack.mod_thickness_nm();
  const bool spol = ctx.pol == Polarization::S;

  const StaticFields f0 = static_stack(stack, ctx, w0);
  const StaticFields fl = static_stack(stack, ctx, wl);
  const IncidentLayerField inc = incident_field(stack, ctx, wl, side, fl);

  const double wt0 = wnum(w0), wtl = wnum(wl);

  QuadratureSpec qs;
  qs.rel_tol = 1e-8;
  qs.max_depth = 40;

  auto integrate_pair = [&](auto&& recv) {
    auto fn = [&](double zeta, std::vector<double>& out) {
      const cplx v = recv(zeta) * inc.value(zeta);
      out[0] = v.real();
      out[1] = v.imag();
    };
    const auto r = integrate_adaptive_vec(fn, 2, -h, 0.0, qs);
    return cplx(r.value[0], r.value[1]);
  };

  FirstOrderAmplitudes out{0.0, 0.0};
  if (spol) {
    // E0(z) = wt0^2 (de/2) \int g(z,zeta) E_l(zeta) dzeta
    const cplx i1 = integrate_pair([&](double z) { return f0.to_body1(z); });
    const cplx i2 = integrate_pair([&](double z) { return f0.to_body2(z); });
    out.to_body1 = wt0 * wt0 * 0.5 * de * i1;
    out.to_body2 = wt0 * wt0 * 0.5 * de * i2;
  } else {
    // H0(z) = (de/2) [ wt0 wtl \int g H_l + (wt0/(wtl eps3)) (g(z,0)H_l'(0) - g(z,-h)H_l'(-h)) ]
    const cplx i1 = integrate_pair([&](double z) { return f0.to_body1(z); });
    const cplx i2 = integrate_pair([&](double z) { return f0.to_body2(z); });
    const cplx bnd = inc.deriv(0.0);
    const cplx bnd_h = inc.deriv(-h);
    const cplx c_int = 0.5 * de * wt0 * wtl;
    const cplx c_bnd = 0.5 * de * wt0 / (wtl * eps3);
    out.to_body1 = c_int * i1 + c_bnd * (f0.to_body1(0.0) * bnd - f0.to_body1(-h) * bnd_h);
    out.to_body2 = c_int * i2 + c_bnd * (f0.to_body2(0.0) * bnd - f0.to_body2(-h) * bnd_h);
  }
  return out;
}

} // namespace nfdce
