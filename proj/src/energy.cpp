#include "platehom/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "platehom/errors.hpp"

namespace platehom {

namespace {

// Distinguishes per-t thread_local caches between integral evaluations
// (sampler addresses can be reused across calls).
std::atomic<std::uint64_t> g_call_gen{0};

std::vector<double> chart_t_cuts(const DevelopableChart& chart,
                                 const ThetaProfile& theta) {
  std::vector<double> cuts;
  for (const auto& p : chart.pieces()) cuts.push_back(p.t_lo);
  if (theta.has_breaks())
    for (double b : theta.breaks()) cuts.push_back(b);
  return cuts;
}

// Richardson-controlled evaluation: halve the grid until the accepted value
// moves by less than the relative tolerance.
template <class Eval>
double richardson(const QuadratureSpec& quad, const Eval& eval) {
  double prev = eval(0);
  for (int level = 1; level <= quad.max_refine; ++level) {
    double cur = eval(level);
    if (std::abs(cur - prev) <= quad.richardson_tol * std::max(std::abs(cur), 1e-300))
      return cur;
    prev = cur;
  }
  fail(ErrKind::QuadratureNotConverged, "Richardson halving did not settle");
}

}  // namespace

double energy_eps(const PeriodicQuadraticForm& Q, const ImmersionSampler& sampler,
                  double eps, const QuadratureSpec& quad, int threads) {
  if (!(eps > 0)) fail(ErrKind::ValidationError, "eps must be positive");
  const DevelopableChart& chart = sampler.chart();
  double ell = chart.length();
  double h0 = eps / (double(Q.grid_n()) * quad.nodes_per_cell);
  h0 = std::min(h0, ell / 8.0);
  std::vector<double> cuts = chart_t_cuts(chart, sampler.theta());

  const std::uint64_t gen = ++g_call_gen;
  auto f = [&, gen](double t, double s) -> double {
    thread_local std::uint64_t lgen = 0;
    thread_local double lt = std::numeric_limits<double>::quiet_NaN();
    thread_local DevelopableChart::PlanarState st;
    thread_local double kap, kn, th;
    if (lgen != gen || lt != t) {
      st = chart.planar(t);
      kap = chart.kappa(t);
      kn = chart.kappa_n(t);
      th = sampler.theta_at(t);
      lgen = gen;
      lt = t;
    }
    double det = 1.0 - s * kap;
    double mu = (1.0 + th) * kn / det;
    Vec2 x = st.gamma + s * st.N;
    return Q.evaluate(x / eps, SymTensor2::rank_one(mu, st.T)) * det;
  };

  auto eval = [&](int level) {
    double h = h0 / double(1 << level);
    auto bt = build_breaks(0.0, ell, h, cuts);
    auto bs = build_breaks(chart.s_lo(), chart.s_hi(), h);
    return integrate_tiles(bt, bs, quad.nodes_per_cell, f, threads);
  };
  return richardson(quad, eval);
}

double bending_moment(const DevelopableChart& chart, const QuadratureSpec& quad) {
  (void)quad;
  double s0 = chart.s_lo(), s1 = chart.s_hi();
  std::vector<double> parts;
  for (const auto& p : chart.pieces()) {
    // int_s kappa_n^2 / (1 - s kappa) ds, closed form in s
    auto inner = [&](double t) {
      double kn = p.kappa_n.eval(t - p.t_lo);
      double kap = p.kappa.eval(t - p.t_lo);
      double w;
      if (std::abs(kap) < 1e-12)
        w = (s1 - s0) * (1.0 + 0.5 * kap * (s0 + s1));
      else
        w = std::log((1.0 - s0 * kap) / (1.0 - s1 * kap)) / kap;
      return kn * kn * w;
    };
    parts.push_back(integrate_1d(build_breaks(p.t_lo, p.t_hi, p.length() / 64.0), 8,
                                 inner));
  }
  return pairwise_sum(parts);
}

double energy_hom(const PeriodicQuadraticForm& Q, const DevelopableChart& chart,
                  const QuadratureSpec& quad, int threads) {
  (void)threads;
  double s0 = chart.s_lo(), s1 = chart.s_hi();
  std::map<Direction, CellSolution> cache;
  auto hom_coeff = [&](const Direction& d) -> double {
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, solve_cell(Q, d)).first;
    return it->second.Q_hom;
  };

  std::vector<double> parts;
  for (const auto& p : chart.pieces()) {
    switch (p.kind) {
      case PieceKind::Flat:
        break;
      case PieceKind::Cylindrical: {
        // kappa == 0: moment = (s1-s0) * int kappa_n^2
        auto f = [&](double t) {
          double kn = p.kappa_n.eval(t - p.t_lo);
          return kn * kn;
        };
        double moment =
            (s1 - s0) * integrate_1d(build_breaks(p.t_lo, p.t_hi, p.length()), 5, f);
        parts.push_back(hom_coeff(*p.direction) * moment);
        break;
      }
      case PieceKind::Conical: {
        // Q_av depends on the node direction; inner s-integral closed form.
        auto f = [&](double t) {
          double xi = t - p.t_lo;
          double kn = p.kappa_n.eval(xi);
          double kap = p.kappa.eval(xi);
          double w = std::log((1.0 - s0 * kap) / (1.0 - s1 * kap)) / kap;
          double phi = chart.phi(t);
          double qav = q_av_direction(Q, Direction::generic(phi));
          return qav * kn * kn * w;
        };
        auto eval = [&](int level) {
          double h = p.length() / (16.0 * double(1 << level));
          return integrate_1d(build_breaks(p.t_lo, p.t_hi, h), quad.nodes_per_cell + 3,
                              f);
        };
        parts.push_back(richardson(quad, eval));
        break;
      }
    }
  }
  return pairwise_sum(parts);
}

double l2_distance(const ImmersionSampler& a, const ImmersionSampler& b, int threads) {
  const DevelopableChart& chart = a.chart();
  if (!chart.same_planar_geometry(b.chart()))
    fail(ErrKind::ChartMismatch, "l2_distance needs samplers on the same chart");
  double ell = chart.length();
  double feature = std::min(a.theta().feature_scale(), b.theta().feature_scale());
  double ht = std::min(ell / 32.0, feature / 4.0);
  std::vector<double> cuts = chart_t_cuts(chart, a.theta());
  for (double c : chart_t_cuts(chart, b.theta())) cuts.push_back(c);

  const std::uint64_t gen = ++g_call_gen;
  auto f = [&, gen](double t, double s) {
    thread_local std::uint64_t lgen = 0;
    thread_local double lt = std::numeric_limits<double>::quiet_NaN();
    thread_local Vec3 ga, nua, gb, nub;
    thread_local double kap;
    if (lgen != gen || lt != t) {
      Mat3 Ra = a.frame(t), Rb = b.frame(t);
      ga = a.position(t);
      gb = b.position(t);
      nua = Ra.row(1).transpose();
      nub = Rb.row(1).transpose();
      kap = chart.kappa(t);
      lgen = gen;
      lt = t;
    }
    Vec3 du = (ga + s * nua) - (gb + s * nub);
    return du.squaredNorm() * (1.0 - s * kap);
  };
  auto bt = build_breaks(0.0, ell, ht, cuts);
  auto bs = build_breaks(chart.s_lo(), chart.s_hi(), (chart.s_hi() - chart.s_lo()) / 8.0);
  double I = integrate_tiles(bt, bs, 3, f, threads);
  return std::sqrt(std::max(0.0, I));
}

}  // namespace platehom
