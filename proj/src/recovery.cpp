#include "platehom/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "platehom/errors.hpp"

namespace platehom {

namespace {

double floor_mod(double x, double period) {
  double m = x - period * std::floor(x / period);
  if (m >= period) m -= period;
  return m;
}

}  // namespace

std::vector<OscillationProfile> oscillation_profiles(const DevelopableChart& chart,
                                                     const PeriodicQuadraticForm& Q) {
  std::vector<OscillationProfile> out;
  std::map<Direction, CellSolution> cache;
  const auto& pieces = chart.pieces();
  for (size_t i = 0; i < pieces.size(); ++i) {
    const CurvaturePiece& p = pieces[i];
    OscillationProfile prof;
    prof.piece_index = int(i);
    if (p.kind == PieceKind::Cylindrical && p.direction &&
        p.direction->is_rational()) {
      auto it = cache.find(*p.direction);
      if (it == cache.end()) it = cache.emplace(*p.direction, solve_cell(Q, *p.direction)).first;
      prof.active = true;
      prof.direction = *p.direction;
      prof.r = prof.direction.rationality();
      prof.solution = it->second;
      Vec2 u = prof.direction.unit();
      auto st = chart.planar(p.t_lo);
      prof.phase_c = u.dot(st.gamma);
      prof.sign = st.T.dot(u) >= 0.0 ? 1 : -1;
    }
    out.push_back(std::move(prof));
  }
  return out;
}

ThetaProfile build_theta(const DevelopableChart& chart, const PeriodicQuadraticForm& Q,
                         double eps) {
  if (!(eps > 0)) fail(ErrKind::ValidationError, "eps must be positive");
  auto profiles = oscillation_profiles(chart, Q);
  const auto& pieces = chart.pieces();

  bool all_piecewise = true;
  bool any_active = false;
  for (const auto& prof : profiles) {
    if (!prof.active) continue;
    any_active = true;
    if (!prof.solution.piecewise_constant()) all_piecewise = false;
  }
  if (!any_active) return ThetaProfile::zero();

  if (all_piecewise) {
    std::vector<double> breaks{0.0};
    std::vector<double> values;
    for (size_t i = 0; i < pieces.size(); ++i) {
      const CurvaturePiece& p = pieces[size_t(i)];
      const OscillationProfile& prof = profiles[i];
      if (!prof.active) {
        values.push_back(0.0);
        breaks.push_back(p.t_hi);
        continue;
      }
      const CellSolution& sol = prof.solution;
      // jump locations: (c + sign (t - t_lo))/eps = b_j + r k, i.e.
      // t = t_lo + sign (eps (b_j + r k) - c)
      std::vector<double> jumps;
      double span = p.length();
      for (size_t j = 0; j < sol.breaks.size(); ++j) {
        double base = eps * sol.breaks[j] - prof.phase_c;
        // need sign*(base + eps r k) in (0, span)
        double lo_val = prof.sign > 0 ? -base : -base - span;
        long k0 = long(std::floor(lo_val / (eps * prof.r))) - 1;
        long k1 = k0 + long(std::ceil(span / (eps * prof.r))) + 3;
        for (long k = k0; k <= k1; ++k) {
          double t = p.t_lo + prof.sign * (base + eps * prof.r * double(k));
          if (t > p.t_lo + 1e-13 && t < p.t_hi - 1e-13) jumps.push_back(t);
        }
      }
      std::sort(jumps.begin(), jumps.end());
      jumps.erase(std::unique(jumps.begin(), jumps.end(),
                              [](double a, double b) { return b - a < 1e-13; }),
                  jumps.end());
      std::vector<double> local{p.t_lo};
      local.insert(local.end(), jumps.begin(), jumps.end());
      local.push_back(p.t_hi);
      for (size_t j = 0; j + 1 < local.size(); ++j) {
        double mid = 0.5 * (local[j] + local[j + 1]);
        double arg = (prof.phase_c + prof.sign * (mid - p.t_lo)) / eps;
        values.push_back(sol.alpha_prime_at(floor_mod(arg, prof.r)));
        breaks.push_back(local[j + 1]);
      }
    }
    return ThetaProfile::piecewise(std::move(breaks), std::move(values));
  }

  // General case: pointwise profile evaluation along the physical phase.
  struct PieceEval {
    double t_lo, t_hi;
    bool active;
    double phase_c, r;
    int sign;
    CellSolution sol;
  };
  auto evals = std::make_shared<std::vector<PieceEval>>();
  double feature = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const auto& prof = profiles[i];
    evals->push_back({p.t_lo, p.t_hi, prof.active, prof.phase_c, prof.r, prof.sign,
                      prof.solution});
    if (prof.active) {
      double wmin = prof.r;
      for (size_t j = 0; j + 1 < prof.solution.breaks.size(); ++j)
        wmin = std::min(wmin, prof.solution.breaks[j + 1] - prof.solution.breaks[j]);
      feature = std::min(feature, eps * wmin);
    }
  }
  auto fn = [evals, eps](double t) -> double {
    for (const auto& pe : *evals) {
      if (t < pe.t_lo - 1e-12 || t > pe.t_hi + 1e-12) continue;
      if (!pe.active) return 0.0;
      double arg = (pe.phase_c + pe.sign * (t - pe.t_lo)) / eps;
      return pe.sol.alpha_prime_at(floor_mod(arg, pe.r));
    }
    return 0.0;
  };
  return ThetaProfile::callable(fn, feature);
}

double boundary_mismatch(const ImmersionSampler& a, const ImmersionSampler& b) {
  const DevelopableChart& chart = a.chart();
  double worst = 0.0;
  const int ns = 65;
  for (int j = 0; j < ns; ++j) {
    double s = chart.s_lo() + (chart.s_hi() - chart.s_lo()) * j / (ns - 1);
    auto [ua, ga] = a.immersion(0.0, s);
    auto [ub, gb] = b.immersion(0.0, s);
    worst = std::max(worst, (ua - ub).norm() + (ga - gb).norm());
  }
  return worst;
}

ConvergenceReport convergence_study(const PeriodicQuadraticForm& Q,
                                    const DevelopableChart& chart,
                                    const std::vector<double>& eps_list,
                                    const QuadratureSpec& quad, int threads) {
  if (eps_list.empty()) fail(ErrKind::ValidationError, "eps list must not be empty");
  ConvergenceReport report;
  report.quad = quad;
  auto chart_ptr = std::make_shared<const DevelopableChart>(chart);
  ImmersionSampler base(chart_ptr);
  double E_hom = energy_hom(Q, chart, quad, threads);
  std::vector<double> sorted_eps = eps_list;
  std::sort(sorted_eps.begin(), sorted_eps.end(), std::greater<double>());
  for (double eps : sorted_eps) {
    ThetaProfile theta = build_theta(chart, Q, eps);
    ImmersionSampler modulated(chart_ptr, theta, eps / 16.0);
    ReportRow row;
    row.eps = eps;
    row.E_eps = energy_eps(Q, modulated, eps, quad, threads);
    row.E_hom = E_hom;
    row.rel_gap = std::abs(row.E_eps - E_hom) / std::max(E_hom, 1e-30);
    row.l2_dist = l2_distance(modulated, base, threads);
    row.bc_err = boundary_mismatch(modulated, base);
    report.rows.push_back(row);
  }
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& os) {
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  if (!report.chart_hash.empty()) os << "# chart_hash=" << report.chart_hash << "\n";
  if (!report.material_hash.empty())
    os << "# material_hash=" << report.material_hash << "\n";
  os << "# quad nodes_per_cell=" << report.quad.nodes_per_cell
     << " richardson_tol=" << fmt(report.quad.richardson_tol)
     << " max_refine=" << report.quad.max_refine << "\n";
  os << "eps,E_eps,E_hom,rel_gap,l2_dist,bc_err\n";
  for (const auto& row : report.rows)
    os << fmt(row.eps) << "," << fmt(row.E_eps) << "," << fmt(row.E_hom) << ","
       << fmt(row.rel_gap) << "," << fmt(row.l2_dist) << "," << fmt(row.bc_err)
       << "\n";
}

double Window::operator()(double t, double s) const {
  auto bump = [](double x) {
    // smooth bump on (-1, 1), 1 at the center
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
  };
  double xt = (2.0 * t - (t_lo + t_hi)) / (t_hi - t_lo);
  double xs = (2.0 * s - (s_lo + s_hi)) / (s_hi - s_lo);
  return bump(xt) * bump(xs);
}

Window Window::interior(const DevelopableChart& chart, double margin) {
  double ell = chart.length();
  double ds = chart.s_hi() - chart.s_lo();
  return Window{margin * ell, ell - margin * ell, chart.s_lo() + margin * ds,
                chart.s_hi() - margin * ds};
}

std::complex<double> two_scale_coefficient(const ImmersionSampler& sampler, double eps,
                                           const Eigen::Vector2i& k, const Window& window,
                                           const QuadratureSpec& quad, int threads) {
  if (k.x() == 0 && k.y() == 0)
    fail(ErrKind::ValidationError, "two-scale frequency k must be nonzero");
  const DevelopableChart& chart = sampler.chart();
  double ell = chart.length();
  double knorm = std::hypot(double(k.x()), double(k.y()));
  double h0 = eps / (4.0 * knorm);
  h0 = std::min(h0, ell / 16.0);
  std::vector<double> cuts;
  for (const auto& p : chart.pieces()) cuts.push_back(p.t_lo);
  if (sampler.theta().has_breaks())
    for (double b : sampler.theta().breaks()) cuts.push_back(b);
  Vec2 kv(double(k.x()), double(k.y()));

  auto f = [&](double t, double s) -> std::complex<double> {
    auto st = chart.planar(t);
    double kap = chart.kappa(t);
    double kn = chart.kappa_n(t);
    double det = 1.0 - s * kap;
    double mu = (1.0 + sampler.theta_at(t)) * kn / det;
    Vec2 x = st.gamma + s * st.N;
    double w = window(t, s);
    if (w == 0.0) return {0.0, 0.0};
    double phase = 2.0 * std::numbers::pi * kv.dot(x) / eps;
    return std::polar(w * mu * det, phase);
  };
  auto fabs = [&](double t, double s) -> double {
    double kap = chart.kappa(t);
    double kn = chart.kappa_n(t);
    double det = 1.0 - s * kap;
    double mu = (1.0 + sampler.theta_at(t)) * kn / det;
    return window(t, s) * std::abs(mu) * det;
  };

  auto grid = [&](int level) {
    double h = h0 / double(1 << level);
    return std::pair(build_breaks(0.0, ell, h, cuts),
                     build_breaks(chart.s_lo(), chart.s_hi(), h));
  };
  auto [bt0, bs0] = grid(0);
  double mass = integrate_tiles(bt0, bs0, quad.nodes_per_cell, fabs, threads);
  std::complex<double> prev =
      integrate_tiles_complex(bt0, bs0, quad.nodes_per_cell, f, threads);
  for (int level = 1; level <= quad.max_refine; ++level) {
    auto [bt, bs] = grid(level);
    std::complex<double> cur =
        integrate_tiles_complex(bt, bs, quad.nodes_per_cell, f, threads);
    double floor = 1e-9 * std::max(mass, 1e-30);
    if (std::abs(cur - prev) <= quad.richardson_tol * std::max(std::abs(cur), floor))
      return cur;
    prev = cur;
  }
  fail(ErrKind::QuadratureNotConverged, "two-scale quadrature did not settle");
}

LowerBoundReport lower_bound_probe(const PeriodicQuadraticForm& Q,
                                   const DevelopableChart& chart,
                                   const std::vector<OscillationProbe>& family,
                                   const std::vector<double>& eps_list,
                                   const QuadratureSpec& quad, int threads) {
  if (family.empty() || eps_list.empty())
    fail(ErrKind::ValidationError, "probe family and eps list must not be empty");
  LowerBoundReport report;
  report.E_hom = energy_hom(Q, chart, quad, threads);
  auto chart_ptr = std::make_shared<const DevelopableChart>(chart);
  std::vector<double> sorted_eps = eps_list;
  std::sort(sorted_eps.begin(), sorted_eps.end(), std::greater<double>());
  double smallest = sorted_eps.back();
  double min_small = std::numeric_limits<double>::infinity();
  for (const auto& probe : family) {
    for (double eps : sorted_eps) {
      ImmersionSampler smp(chart_ptr, probe.make(eps), eps / 16.0);
      double E = energy_eps(Q, smp, eps, quad, threads);
      report.rows.push_back({probe.name, eps, E});
      if (eps == smallest) min_small = std::min(min_small, E);
    }
  }
  report.min_at_smallest_eps = min_small;
  report.bound_satisfied =
      min_small >= report.E_hom * (1.0 - (quad.richardson_tol + 0.01));
  return report;
}

}  // namespace platehom
