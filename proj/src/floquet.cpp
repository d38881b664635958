#include "nfdce/floquet.hpp"

#include <cmath>
#include <stdexcept>

#include "nfdce/units.hpp"

namespace nfdce {

namespace {
constexpr cplx kI{0.0, 1.0};
constexpr double kMinHarmonicMev = 1e-9;

double wnum(double omega_mev) { return omega_mev / units::hbar_c_mev_nm; }
} // namespace

void HarmonicBasis::validate() const {
  if (!(mod_energy_mev > 0.0))
    throw std::invalid_argument("HarmonicBasis: modulation energy must be > 0");
  if (trunc < 1) throw std::invalid_argument("HarmonicBasis: trunc must be >= 1");
  for (int l = -trunc; l <= trunc; ++l)
    if (std::abs(harmonic_energy(l)) < kMinHarmonicMev)
      throw std::domain_error("HarmonicBasis: a harmonic frequency sits at zero; "
                              "offset the frequency grid");
}

cplx kz_branch(cplx eps, double omega_mev, double kpar_invnm) {
  const double w = wnum(omega_mev);
  const cplx arg = eps * (w * w) - kpar_invnm * kpar_invnm;
  cplx kz = std::sqrt(arg);
  if (kz.imag() < 0.0) kz = -kz;
  if (kz.imag() == 0.0) {
    if ((omega_mev >= 0.0 && kz.real() < 0.0) || (omega_mev < 0.0 && kz.real() > 0.0)) kz = -kz;
  }
  return kz;
}

namespace {

Eigen::MatrixXd toeplitz_eps(const ModulatedLayerSpec& layer, int m) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = layer.eps_static;
    if (i + 1 < m) {
      T(i, i + 1) = 0.5 * layer.delta_eps;
      T(i + 1, i) = 0.5 * layer.delta_eps;
    }
  }
  return T;
}

struct EigResult {
  Eigen::VectorXcd q2;
  Eigen::MatrixXcd V;
  double residual;
};

EigResult eig_with_residual(const Eigen::MatrixXd& K) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success) return {Eigen::VectorXcd(), Eigen::MatrixXcd(), 1e300};
  EigResult r{es.eigenvalues(), es.eigenvectors(), 0.0};
  const double scale = std::max(K.cwiseAbs().maxCoeff(), 1e-300);
  const double res =
      (K.cast<cplx>() * r.V - r.V * r.q2.asDiagonal()).cwiseAbs().maxCoeff() / scale;
  r.residual = res;
  return r;
}

} // namespace

FloquetLayerModes layer_mode_decomposition(const ModulatedLayerSpec& layer,
                                           const PlaneWaveContext& ctx,
                                           const HarmonicBasis& basis) {
  basis.validate();
  const int m = basis.size();
  const Eigen::MatrixXd T = toeplitz_eps(layer, m);

  auto build_K = [&](double kpar) {
    Eigen::VectorXd wt(m);
    for (int i = 0; i < m; ++i) wt[i] = wnum(basis.harmonic_energy(i - basis.trunc));
    Eigen::MatrixXd K;
    if (ctx.pol == Polarization::S)
      K = wt.array().square().matrix().asDiagonal() * T;
    else
      K = wt.asDiagonal() * T * wt.asDiagonal();
    K.diagonal().array() -= kpar * kpar;
    return K;
  };

  EigResult er = eig_with_residual(build_K(ctx.kpar_invnm));
  if (er.residual > 1e-8) {
    // defective at this exact kpar; nudge and retry once
    er = eig_with_residual(build_K(ctx.kpar_invnm * (1.0 + 1e-9)));
    if (er.residual > 1e-8)
      throw std::runtime_error("layer_mode_decomposition: defective harmonic-coupling matrix "
                               "(kpar = " + std::to_string(ctx.kpar_invnm) + " 1/nm)");
  }

  FloquetLayerModes modes;
  modes.V = er.V;
  modes.q.resize(m);
  for (int i = 0; i < m; ++i) {
    cplx q = std::sqrt(er.q2[i]);
    if (q.imag() < 0.0) q = -q;
    if (q.imag() == 0.0 && q.real() < 0.0) q = -q;
    modes.q[i] = q;
  }

  // Y-field mixing for layer amplitudes (a, b):
  //   s: Y = X'          -> Psi = V diag(i q)
  //   p: Y = -i W T^-1 W^-1 X' -> Psi = W T^-1 W^-1 V diag(q)
  if (ctx.pol == Polarization::S) {
    modes.Psi = modes.V * (kI * modes.q.array()).matrix().asDiagonal();
  } else {
    Eigen::VectorXcd wt(m);
    for (int i = 0; i < m; ++i) wt[i] = wnum(basis.harmonic_energy(i - basis.trunc));
    const Eigen::MatrixXcd Tinv = T.cast<cplx>().inverse();
    modes.Psi = wt.asDiagonal() * Tinv * wt.cwiseInverse().asDiagonal() * modes.V *
                modes.q.asDiagonal();
  }
  return modes;
}

StackScattering::StackScattering(const LayerStack& stack, const PlaneWaveContext& ctx,
                                 const HarmonicBasis& basis, const SolveOptions& opts)
    : stack_(&stack), ctx_(ctx), basis_(basis), opts_(opts) {
  validate_stack(stack);
  basis_.validate();
  if (ctx_.kpar_invnm < 0.0) throw std::invalid_argument("StackScattering: kpar must be >= 0");

  const int m = basis_.size();
  kz1_.resize(m); kzv_.resize(m); kz2_.resize(m);
  eps1_.resize(m); eps2_.resize(m);
  y1_.resize(m); yv_.resize(m); y2_.resize(m);
  Egap_.resize(m);

  const double d = stack.gap_nm();
  for (int i = 0; i < m; ++i) {
    const double w = basis_.harmonic_energy(i - basis_.trunc);
    eps1_[i] = permittivity(stack.top_half_space, w);
    eps2_[i] = permittivity(stack.bottom_half_space, w);
    kz1_[i] = kz_branch(eps1_[i], w, ctx_.kpar_invnm);
    kzv_[i] = kz_branch(cplx(1.0, 0.0), w, ctx_.kpar_invnm);
    kz2_[i] = kz_branch(eps2_[i], w, ctx_.kpar_invnm);
    if (ctx_.pol == Polarization::S) {
      y1_[i] = kI * kz1_[i];
      yv_[i] = kI * kzv_[i];
      y2_[i] = kI * kz2_[i];
    } else {
      y1_[i] = kz1_[i] / eps1_[i];
      yv_[i] = kzv_[i];
      y2_[i] = kz2_[i] / eps2_[i];
    }
    Egap_[i] = std::exp(kI * kzv_[i] * d);
  }

  modes_ = layer_mode_decomposition(stack.mod_spec(), ctx_, basis_);
  Tinv_ = toeplitz_eps(stack.mod_spec(), m).cast<cplx>().inverse();
  const double h = stack.mod_thickness_nm();
  P_ = (kI * modes_.q.array() * h).exp();

  rho1_.resize(m); t1in_.resize(m); chi_.resize(m);
  for (int i = 0; i < m; ++i) {
    rho1_[i] = (yv_[i] - y1_[i]) / (yv_[i] + y1_[i]);
    t1in_[i] = 2.0 * y1_[i] / (y1_[i] + yv_[i]);
    const cplx rE2 = rho1_[i] * Egap_[i] * Egap_[i];
    chi_[i] = yv_[i] * (1.0 - rE2) / (1.0 + rE2);
  }

  if (opts_.force_redheffer) {
    path_ = Path::Redheffer;
    assemble_redheffer();
  } else {
    assemble_direct();
  }
}

void StackScattering::assemble_direct() {
  const int m = basis_.size();
  const Eigen::MatrixXcd& V = modes_.V;
  const Eigen::MatrixXcd& Psi = modes_.Psi;
  const Eigen::MatrixXcd chiV = chi_.asDiagonal() * V;
  const Eigen::MatrixXcd y2V = y2_.asDiagonal() * V;

  Eigen::MatrixXcd A(2 * m, 2 * m);
  A.topLeftCorner(m, m) = (chiV - Psi) * P_.asDiagonal();
  A.topRightCorner(m, m) = chiV + Psi;
  A.bottomLeftCorner(m, m) = Psi + y2V;
  A.bottomRightCorner(m, m) = (-Psi + y2V) * P_.asDiagonal();

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  if (lu.rcond() < opts_.rcond_threshold) {
    path_ = Path::Redheffer;
    assemble_redheffer();
    return;
  }
  path_ = Path::Direct;

  sols_.assign(2 * m, StackSolution{});
  Eigen::VectorXcd rhs(2 * m);
  for (int side = 0; side < 2; ++side) {
    for (int li = 0; li < m; ++li) {
      rhs.setZero();
      if (side == 0) // source above, incident down wave in body 1
        rhs[li] = (chi_[li] + yv_[li]) * Egap_[li] * t1in_[li];
      else // source below, incident up wave in body 2
        rhs[m + li] = 2.0 * y2_[li];
      const Eigen::VectorXcd ab = lu.solve(rhs);
      finish_solution(sols_[side * m + li], side == 0 ? SourceSide::Body1 : SourceSide::Body2,
                      li - basis_.trunc, ab);
    }
  }
}

void StackScattering::finish_solution(StackSolution& sol, SourceSide side, int l_src,
                                      const Eigen::VectorXcd& ab) const {
  const int m = basis_.size();
  const int li = basis_.idx(l_src);
  sol.a = ab.head(m);
  sol.b = ab.tail(m);

  Eigen::VectorXcd xin = modes_.V * (P_.asDiagonal() * sol.a + sol.b); // layer X at z = 0
  sol.U.resize(m);
  sol.D.resize(m);
  for (int i = 0; i < m; ++i) {
    cplx num = xin[i];
    if (side == SourceSide::Body1 && i == li) num -= Egap_[i] * t1in_[i];
    sol.U[i] = num / (1.0 + rho1_[i] * Egap_[i] * Egap_[i]);
    sol.D[i] = rho1_[i] * Egap_[i] * sol.U[i];
    if (side == SourceSide::Body1 && i == li) sol.D[i] += t1in_[i];
  }
  sol.t = sol.U.cwiseProduct(Egap_) + sol.D;
  sol.c = modes_.V * (sol.a + P_.asDiagonal() * sol.b);
  if (side == SourceSide::Body1) sol.t[li] -= 1.0;
  if (side == SourceSide::Body2) sol.c[li] -= 1.0;
}

const StackSolution& StackScattering::solution(SourceSide side, int l_src) const {
  return sols_[(side == SourceSide::Body1 ? 0 : basis_.size()) + basis_.idx(l_src)];
}

cplx StackScattering::s_amplitude(int tgt_body, int m_out, int src_body, int l_src) const {
  const StackSolution& s =
      solution(src_body == 1 ? SourceSide::Body1 : SourceSide::Body2, l_src);
  return tgt_body == 1 ? s.t[basis_.idx(m_out)] : s.c[basis_.idx(m_out)];
}

double StackScattering::bc_residual(SourceSide side, int l_src) const {
  const int m = basis_.size();
  const int li = basis_.idx(l_src);
  const StackSolution& s = solution(side, l_src);

  Eigen::VectorXcd x_lo(m), y_lo(m), x_hi(m), y_hi(m);
  double worst = 0.0;
  auto update = [&]() {
    const double xs = std::max({x_lo.cwiseAbs().maxCoeff(), x_hi.cwiseAbs().maxCoeff(), 1e-300});
    const double ys = std::max({y_lo.cwiseAbs().maxCoeff(), y_hi.cwiseAbs().maxCoeff(), 1e-300});
    worst = std::max(worst, (x_lo - x_hi).cwiseAbs().maxCoeff() / xs);
    worst = std::max(worst, (y_lo - y_hi).cwiseAbs().maxCoeff() / ys);
  };

  // z = d: gap below, body 1 above
  for (int i = 0; i < m; ++i) {
    x_lo[i] = s.U[i] * Egap_[i] + s.D[i];
    y_lo[i] = yv_[i] * (s.U[i] * Egap_[i] - s.D[i]);
    x_hi[i] = s.t[i];
    y_hi[i] = y1_[i] * s.t[i];
    if (side == SourceSide::Body1 && i == li) {
      x_hi[i] += 1.0;
      y_hi[i] -= y1_[i];
    }
  }
  update();

  // z = 0: layer below, gap above
  Eigen::VectorXcd xl = modes_.V * (P_.asDiagonal() * s.a + s.b);
  Eigen::VectorXcd yl = modes_.Psi * (P_.asDiagonal() * s.a - s.b);
  for (int i = 0; i < m; ++i) {
    x_lo[i] = xl[i];
    y_lo[i] = yl[i];
    x_hi[i] = s.U[i] + s.D[i] * Egap_[i];
    y_hi[i] = yv_[i] * (s.U[i] - s.D[i] * Egap_[i]);
  }
  update();

  // z = -h: body 2 below, layer above
  xl = modes_.V * (s.a + P_.asDiagonal() * s.b);
  yl = modes_.Psi * (s.a - P_.asDiagonal() * s.b);
  for (int i = 0; i < m; ++i) {
    x_lo[i] = s.c[i];
    y_lo[i] = -y2_[i] * s.c[i];
    if (side == SourceSide::Body2 && i == li) {
      x_lo[i] += 1.0;
      y_lo[i] += y2_[i];
    }
    x_hi[i] = xl[i];
    y_hi[i] = yl[i];
  }
  update();
  return worst;
}

GreensEval::GreensEval(const StackScattering& sc, SourceSide alpha, int l_src)
    : sc_(&sc), alpha_(alpha), l_src_(l_src) {
  const double w_src = sc.basis().harmonic_energy(l_src);
  const cplx eps_src =
      alpha == SourceSide::Body1 ? sc.eps_body1(l_src) : sc.eps_body2(l_src);
  kz_src_ = alpha == SourceSide::Body1 ? sc.kz_body1(l_src) : sc.kz_body2(l_src);

  dress_ = kI / (2.0 * kz_src_);
  src_px_ = src_py_ = src_pz_ = 0.0;
  if (sc.ctx().pol == Polarization::S) {
    src_py_ = 1.0;
  } else {
    // source polarization unit vector (toward the stack) and the E->H factor
    const cplx kmed = std::sqrt(eps_src) * wnum(w_src);
    const cplx sgn = alpha == SourceSide::Body2 ? -1.0 : 1.0; // up / down emission
    src_px_ = sgn * kz_src_ / kmed;
    src_pz_ = sc.ctx().kpar_invnm / kmed;
    dress_ *= -std::sqrt(eps_src);
  }
}

double GreensEval::source_depth(double z_src) const {
  const double d = sc_->stack().gap_nm();
  const double h = sc_->stack().mod_thickness_nm();
  if (alpha_ == SourceSide::Body1) {
    if (z_src < d) throw std::invalid_argument("GreensEval: source not inside body 1");
    return z_src - d;
  }
  if (z_src > -h) throw std::invalid_argument("GreensEval: source not inside body 2");
  return -h - z_src;
}

Eigen::Matrix3cd GreensEval::coeff(double z_obs, int m_out) const {
  const double d = sc_->stack().gap_nm();
  const double h = sc_->stack().mod_thickness_nm();
  RegionId region = RegionId::Body2;
  if (z_obs > d) region = RegionId::Body1;
  else if (z_obs > 0.0) region = RegionId::Gap;
  else if (z_obs > -h) region = RegionId::ModLayer;
  return coeff_region(z_obs, region, m_out);
}

Eigen::Matrix3cd GreensEval::coeff_region(double z_obs, RegionId region, int m_out) const {
  const StackScattering& sc = *sc_;
  const HarmonicBasis& basis = sc.basis();
  const int mi = basis.idx(m_out);
  const double w_out = basis.harmonic_energy(m_out);
  const double wt = wnum(w_out);
  const double kpar = sc.ctx().kpar_invnm;
  const double d = sc.stack().gap_nm();
  const double h = sc.stack().mod_thickness_nm();
  const StackSolution& s = sc.solution(alpha_, l_src_);

  // scattered-field X value and the accompanying E components at z_obs
  cplx Ex = 0.0, Ey = 0.0, Ez = 0.0;
  const bool spol = sc.ctx().pol == Polarization::S;

  auto static_region = [&](cplx up_amp, cplx dn_amp, cplx kz, cplx eps, cplx up_ph, cplx dn_ph) {
    const cplx xu = up_amp * up_ph, xd = dn_amp * dn_ph;
    if (spol) {
      Ey = xu + xd;
    } else {
      Ex = (kz / (eps * wt)) * (xu - xd);
      Ez = -(kpar / (eps * wt)) * (xu + xd);
    }
  };

  if (region == RegionId::Body1) {
    static_region(s.t[mi], 0.0, sc.kz_body1(m_out), sc.eps_body1(m_out),
                  std::exp(kI * sc.kz_body1(m_out) * (z_obs - d)), 0.0);
  } else if (region == RegionId::Gap) {
    static_region(s.U[mi], s.D[mi], sc.kz_gap(m_out), cplx(1.0, 0.0),
                  std::exp(kI * sc.kz_gap(m_out) * z_obs),
                  std::exp(-kI * sc.kz_gap(m_out) * (z_obs - d)));
  } else if (region == RegionId::ModLayer) {
    const FloquetLayerModes& md = sc.layer_modes();
    const int m = basis.size();
    Eigen::VectorXcd ea(m), eb(m);
    for (int i = 0; i < m; ++i) {
      ea[i] = std::exp(kI * md.q[i] * (z_obs + h));
      eb[i] = std::exp(-kI * md.q[i] * z_obs);
    }
    const Eigen::VectorXcd X = md.V * (ea.asDiagonal() * s.a + eb.asDiagonal() * s.b);
    if (spol) {
      Ey = X[mi];
    } else {
      const Eigen::VectorXcd Xp =
          md.V * (kI * md.q.array() * (ea.asDiagonal() * s.a - eb.asDiagonal() * s.b).array())
                     .matrix();
      // E_x = -i T^-1 W^-1 X', E_z = -kpar T^-1 W^-1 X  (layer is lossless and real)
      const int msz = basis.size();
      Eigen::VectorXcd winv(msz);
      for (int k = 0; k < msz; ++k) winv[k] = 1.0 / wnum(basis.harmonic_energy(k - basis.trunc));
      const Eigen::MatrixXcd& Tinv = sc.layer_eps_toeplitz_inv();
      Ex = (-kI * (Tinv * (winv.asDiagonal() * Xp))[mi]);
      Ez = (-kpar * (Tinv * (winv.asDiagonal() * X))[mi]);
    }
  } else { // body 2
    static_region(0.0, s.c[mi], sc.kz_body2(m_out), sc.eps_body2(m_out), 0.0,
                  std::exp(-kI * sc.kz_body2(m_out) * (z_obs + h)));
  }

  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  const cplx obs[3] = {Ex, Ey, Ez};
  const cplx src[3] = {src_px_, src_py_, src_pz_};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = obs[i] * dress_ * src[j];
  return g;
}

cplx greens_planewave(const LayerStack& stack, const PlaneWaveContext& ctx,
                      const HarmonicBasis& basis, int l, double z_obs_nm, double z_src_nm,
                      int i, int j) {
  const RegionId src_region = region_of(stack, z_src_nm);
  SourceSide alpha;
  if (src_region == RegionId::Body1 && !stack.top_half_space.is_lossless())
    alpha = SourceSide::Body1;
  else if (src_region == RegionId::Body2 && !stack.bottom_half_space.is_lossless())
    alpha = SourceSide::Body2;
  else
    throw std::invalid_argument("greens_planewave: source must sit inside a lossy body "
                                "(epsilon'' = 0 regions carry no fluctuating sources)");

  StackScattering sc(stack, ctx, basis, {});
  GreensEval ev(sc, alpha, l);
  cplx g = ev.coeff(z_obs_nm)(i, j) * std::exp(kI * ev.source_kz() * ev.source_depth(z_src_nm));

  // direct homogeneous-medium wave when observing inside the source body at the
  // source harmonic (l = 0 output only; other output harmonics have no direct term)
  if (l == 0 && region_of(stack, z_obs_nm) == src_region) {
    const double w = basis.output_energy_mev;
    const cplx kz = ev.source_kz();
    const double dz = std::abs(z_obs_nm - z_src_nm);
    const cplx phase = std::exp(kI * kz * dz);
    if (ctx.pol == Polarization::S) {
      if (i == 1 && j == 1) g += kI / (2.0 * kz) * phase;
    } else {
      const cplx eps = permittivity(alpha == SourceSide::Body1 ? stack.top_half_space
                                                               : stack.bottom_half_space,
                                    w);
      const cplx kmed = std::sqrt(eps) * wnum(w);
      const double sgn = (z_obs_nm >= z_src_nm) ? -1.0 : 1.0; // up/down p-vector x sign
      const cplx p[3] = {sgn * kz / kmed, 0.0, ctx.kpar_invnm / kmed};
      g += kI / (2.0 * kz) * p[i] * p[j] * phase;
    }
  }
  return g;
}

} // namespace nfdce
