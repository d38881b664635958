#include "nfdce/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nfdce/units.hpp"

namespace nfdce {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("QuadratureSpec: rel_tol must lie in (0,1)");
  if (!(abs_floor >= 0.0)) throw std::invalid_argument("QuadratureSpec: abs_floor must be >= 0");
  if (max_depth < 1) throw std::invalid_argument("QuadratureSpec: max_depth must be >= 1");
  if (!(kpar_max_factor > 0.0))
    throw std::invalid_argument("QuadratureSpec: kpar_max_factor must be > 0");
  if (!(omega_window_lo_mev < omega_window_hi_mev))
    throw std::invalid_argument("QuadratureSpec: empty omega window");
}

namespace {

// Gauss-Kronrod 7-15 pair (QUADPACK values); nodes on [-1,1], symmetric.
constexpr int kKronrod = 15;
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
  int depth;
  std::vector<double> value; // K15 estimate per component
  double err;                // L1 |K15 - G7|
};

// Evaluates one panel with the embedded pair; returns the K15 value per
// component and the |K-G| discrepancy in L1.
void eval_panel(const VectorFn& f, int dim, Panel& p, std::vector<double>& scratch) {
  const double c = 0.5 * (p.a + p.b);
  const double hw = 0.5 * (p.b - p.a);
  std::vector<double> k15(dim, 0.0), g7(dim, 0.0);
  for (int i = 0; i < 8; ++i) {
    const int reps = (i == 7) ? 1 : 2;
    for (int r = 0; r < reps; ++r) {
      const double x = c + (r == 0 ? -1.0 : 1.0) * kXgk[i] * hw;
      scratch.assign(dim, 0.0);
      f(x, scratch);
      for (int j = 0; j < dim; ++j) {
        k15[j] += kWgk[i] * scratch[j];
        if (i % 2 == 1) g7[j] += kWg[i / 2] * scratch[j];
      }
    }
  }
  p.value.resize(dim);
  p.err = 0.0;
  for (int j = 0; j < dim; ++j) {
    p.value[j] = k15[j] * hw;
    p.err += std::abs(k15[j] - g7[j]) * hw;
  }
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

VecIntegralResult adapt(const VectorFn& f, int dim, std::vector<Panel> panels,
                        const QuadratureSpec& spec) {
  VecIntegralResult res;
  res.value.assign(dim, 0.0);
  if (panels.empty()) return res;

  std::vector<double> scratch;
  long evals = 0;
  for (auto& p : panels) {
    eval_panel(f, dim, p, scratch);
    evals += kKronrod;
  }

  constexpr std::size_t kMaxPanels = 40000;
  while (panels.size() < kMaxPanels) {
    double total_err = 0.0, total_mag = 0.0;
    std::size_t worst = 0;
    double worst_err = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total_err += panels[i].err;
      total_mag += l1(panels[i].value);
      if (panels[i].err > worst_err && panels[i].depth < spec.max_depth) {
        worst_err = panels[i].err;
        worst = i;
      }
    }
    if (total_err <= std::max(spec.rel_tol * total_mag, spec.abs_floor)) break;
    if (worst_err < 0.0) { // every panel at max depth
      res.converged = false;
      break;
    }
    Panel left{panels[worst].a, 0.5 * (panels[worst].a + panels[worst].b),
               panels[worst].depth + 1, {}, 0.0};
    Panel right{left.b, panels[worst].b, left.depth, {}, 0.0};
    eval_panel(f, dim, left, scratch);
    eval_panel(f, dim, right, scratch);
    evals += 2 * kKronrod;
    panels[worst] = left;
    panels.push_back(right);
  }
  if (panels.size() >= kMaxPanels) res.converged = false;

  // deterministic assembly: sum in spatial order
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    for (int j = 0; j < dim; ++j) res.value[j] += p.value[j];
    res.error_bound += p.err;
  }
  res.evals = evals;
  return res;
}

std::vector<Panel> make_panels(double a, double b, const std::vector<double>& breakpoints) {
  std::vector<double> pts{a, b};
  for (double x : breakpoints)
    if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    panels.push_back(Panel{pts[i], pts[i + 1], 0, {}, 0.0});
  return panels;
}

IntegralResult to_scalar(const VecIntegralResult& v) {
  IntegralResult r;
  r.value = v.value.empty() ? 0.0 : v.value[0];
  r.error_bound = v.error_bound;
  r.converged = v.converged;
  r.evals = v.evals;
  return r;
}

} // namespace

VecIntegralResult integrate_adaptive_vec(const VectorFn& f, int dim, double a, double b,
                                         const QuadratureSpec& spec,
                                         const std::vector<double>& breakpoints) {
  spec.validate();
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: require a < b");
  return adapt(f, dim, make_panels(a, b, breakpoints), spec);
}

IntegralResult integrate_adaptive(const ScalarFn& f, double a, double b,
                                  const QuadratureSpec& spec) {
  return integrate_adaptive(f, a, b, spec, {});
}

IntegralResult integrate_adaptive(const ScalarFn& f, double a, double b, const QuadratureSpec& spec,
                                  const std::vector<double>& breakpoints) {
  auto fv = [&f](double x, std::vector<double>& out) { out[0] = f(x); };
  return to_scalar(integrate_adaptive_vec(fv, 1, a, b, spec, breakpoints));
}

VecIntegralResult integrate_kpar_vec(const VectorFn& f, int dim, double omega_mev, double d_nm,
                                     const QuadratureSpec& spec,
                                     const std::vector<double>& breakpoints) {
  spec.validate();
  if (!(d_nm > 0.0)) throw std::invalid_argument("integrate_kpar: require d > 0");

  const double k_light = std::abs(omega_mev) / units::hbar_c_mev_nm;
  const double k_max = std::max(spec.kpar_max_factor / d_nm, 100.0 * k_light);

  std::vector<Panel> panels;
  if (k_light > 0.0 && k_light < k_max) {
    for (auto& p : make_panels(0.0, k_light, breakpoints)) panels.push_back(p);
  }
  // evanescent segment in u = kpar * d
  const double u_lo = std::min(k_light, k_max) * d_nm;
  const double u_hi = k_max * d_nm;
  VecIntegralResult res;
  res.value.assign(dim, 0.0);

  auto direct = adapt(f, dim, panels, spec);
  std::vector<double> ubp;
  for (double x : breakpoints) ubp.push_back(x * d_nm);
  auto fu = [&](double u, std::vector<double>& out) { f(u / d_nm, out); for (auto& v : out) v /= d_nm; };
  auto evan = (u_lo < u_hi)
                  ? integrate_adaptive_vec(fu, dim, u_lo, u_hi, spec, ubp)
                  : VecIntegralResult{std::vector<double>(dim, 0.0), 0.0, true, 0};

  for (int j = 0; j < dim; ++j) res.value[j] = direct.value[j] + evan.value[j];
  res.error_bound = direct.error_bound + evan.error_bound;
  res.converged = direct.converged && evan.converged;
  res.evals = direct.evals + evan.evals;

  // exponential tail beyond k_max, assuming decay at least e^{-2 kpar d}
  std::vector<double> tail(dim, 0.0);
  f(k_max, tail);
  double tail_bound = l1(tail) / (2.0 * d_nm);
  res.error_bound += tail_bound;
  res.evals += 1;
  const double mag = l1(res.value);
  if (tail_bound > std::max(spec.rel_tol * mag, spec.abs_floor) && mag > 0.0) res.converged = false;
  return res;
}

IntegralResult integrate_kpar(const ScalarFn& f, double omega_mev, double d_nm,
                              const QuadratureSpec& spec) {
  auto fv = [&f](double x, std::vector<double>& out) { out[0] = f(x); };
  return to_scalar(integrate_kpar_vec(fv, 1, omega_mev, d_nm, spec));
}

} // namespace nfdce
