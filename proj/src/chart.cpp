#include "platehom/chart.hpp"

#include <algorithm>
#include <cmath>

#include "platehom/errors.hpp"
#include "platehom/quadrature.hpp"

namespace platehom {

std::vector<double> Poly::extremal_points(double L) const {
  std::vector<double> pts{0.0, L};
  Poly d = derivative();
  int deg = d.degree();
  if (deg == 1) {
    double root = -d.c[0] / d.c[1];
    if (root > 0.0 && root < L) pts.push_back(root);
  } else if (deg == 2) {
    double a = d.c[2], b = d.c[1], cc = d.c[0];
    double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      for (double root : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
        if (root > 0.0 && root < L) pts.push_back(root);
    }
  }
  return pts;
}

namespace {

constexpr double kTol = 1e-12;

// Exact planar advance for constant curvature from (gamma, phi) over dt.
Vec2 advance_const(const Vec2& gamma, double phi, double kap, double dt) {
  if (std::abs(kap) < 1e-14) return gamma + dt * Vec2(std::cos(phi), std::sin(phi));
  double p1 = phi + kap * dt;
  return gamma + Vec2((std::sin(p1) - std::sin(phi)) / kap,
                      -(std::cos(p1) - std::cos(phi)) / kap);
}

}  // namespace

DevelopableChart::DevelopableChart(ChartSpec spec) : spec_(std::move(spec)) {
  const auto& ps = spec_.pieces;
  phi_start_.resize(ps.size());
  gamma_start_.resize(ps.size());
  gamma_grid_.resize(ps.size());
  grid_step_.assign(ps.size(), 0.0);
  double phi = spec_.phi0;
  Vec2 gamma = spec_.gamma0;
  for (size_t i = 0; i < ps.size(); ++i) {
    phi_start_[i] = phi;
    gamma_start_[i] = gamma;
    double L = ps[i].length();
    if (ps[i].kappa.is_constant()) {
      gamma = advance_const(gamma, phi, ps[i].kappa.eval(0.0), L);
    } else {
      // Cache Gamma on a fine grid; queries integrate from the nearest node.
      int m = std::max(64, int(std::ceil(L / 1e-3)));
      grid_step_[i] = L / m;
      auto& grid = gamma_grid_[i];
      grid.resize(m + 1);
      grid[0] = gamma;
      const GaussRule& g = gauss_rule(10);
      for (int k = 0; k < m; ++k) {
        double a = L * k / m, b = L * (k + 1) / m;
        Vec2 inc = Vec2::Zero();
        for (size_t n = 0; n < g.nodes.size(); ++n) {
          double xi = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[n];
          double ph = phi_start_[i] + ps[i].kappa.antiderivative(xi);
          inc += g.weights[n] * Vec2(std::cos(ph), std::sin(ph));
        }
        grid[k + 1] = grid[k] + 0.5 * (b - a) * inc;
      }
      gamma = grid[m];
    }
    phi = phi_start_[i] + ps[i].kappa.antiderivative(L);
  }
}

int DevelopableChart::piece_index(double t) const {
  double ell = length();
  if (t < -kTol || t > ell + kTol)
    fail(ErrKind::OutOfRange, "t outside [0, length]");
  const auto& ps = spec_.pieces;
  auto it = std::upper_bound(ps.begin(), ps.end(), t,
                             [](double v, const CurvaturePiece& p) { return v < p.t_hi; });
  int idx = int(it - ps.begin());
  return std::min(idx, int(ps.size()) - 1);
}

double DevelopableChart::kappa(double t) const {
  int i = piece_index(t);
  return spec_.pieces[i].kappa.eval(t - spec_.pieces[i].t_lo);
}

double DevelopableChart::kappa_n(double t) const {
  int i = piece_index(t);
  return spec_.pieces[i].kappa_n.eval(t - spec_.pieces[i].t_lo);
}

double DevelopableChart::phi(double t) const {
  int i = piece_index(t);
  return phi_start_[i] + spec_.pieces[i].kappa.antiderivative(t - spec_.pieces[i].t_lo);
}

Vec2 DevelopableChart::gamma_from_piece_start(int i, double t) const {
  const CurvaturePiece& p = spec_.pieces[i];
  double xi = t - p.t_lo;
  if (p.kappa.is_constant())
    return advance_const(gamma_start_[i], phi_start_[i], p.kappa.eval(0.0), xi);
  // integrate from nearest cached node
  const auto& grid = gamma_grid_[i];
  double h = grid_step_[i];
  int k = std::clamp(int(xi / h), 0, int(grid.size()) - 1);
  double a = k * h;
  const GaussRule& g = gauss_rule(10);
  Vec2 inc = Vec2::Zero();
  if (xi > a + 1e-15) {
    for (size_t n = 0; n < g.nodes.size(); ++n) {
      double x = 0.5 * (a + xi) + 0.5 * (xi - a) * g.nodes[n];
      double ph = phi_start_[i] + p.kappa.antiderivative(x);
      inc += g.weights[n] * Vec2(std::cos(ph), std::sin(ph));
    }
    inc *= 0.5 * (xi - a);
  }
  return grid[k] + inc;
}

DevelopableChart::PlanarState DevelopableChart::planar(double t) const {
  int i = piece_index(t);
  PlanarState st;
  double ph = phi_start_[i] + spec_.pieces[i].kappa.antiderivative(t - spec_.pieces[i].t_lo);
  st.T = Vec2(std::cos(ph), std::sin(ph));
  st.N = perp(st.T);
  st.gamma = gamma_from_piece_start(i, t);
  return st;
}

Vec2 DevelopableChart::map(double t, double s) const {
  PlanarState st = planar(t);
  return st.gamma + s * st.N;
}

bool DevelopableChart::in_rectangle(double t, double s, double tol) const {
  return t >= -tol && t <= length() + tol && s >= spec_.s_lo - tol &&
         s <= spec_.s_hi + tol;
}

bool DevelopableChart::same_planar_geometry(const DevelopableChart& o) const {
  if (spec_.pieces.size() != o.spec_.pieces.size()) return false;
  if (spec_.s_lo != o.spec_.s_lo || spec_.s_hi != o.spec_.s_hi) return false;
  if (spec_.gamma0 != o.spec_.gamma0 || spec_.phi0 != o.spec_.phi0) return false;
  for (size_t i = 0; i < spec_.pieces.size(); ++i) {
    const auto& a = spec_.pieces[i];
    const auto& b = o.spec_.pieces[i];
    if (a.t_lo != b.t_lo || a.t_hi != b.t_hi || a.kappa.c != b.kappa.c ||
        a.kappa_n.c != b.kappa_n.c)
      return false;
  }
  return true;
}

namespace {

void validate_pieces(const ChartSpec& spec) {
  const auto& ps = spec.pieces;
  if (ps.empty()) fail(ErrKind::ValidationError, "chart needs at least one piece");
  if (std::abs(ps.front().t_lo) > kTol)
    fail(ErrKind::NonContiguousPieces, "first piece must start at t = 0");
  for (size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i].t_hi > ps[i].t_lo))
      fail(ErrKind::ValidationError, "piece has non-positive length");
    if (ps[i].kappa.c.size() > 4 || ps[i].kappa_n.c.size() > 4)
      fail(ErrKind::ValidationError, "curvature polynomials limited to degree 3");
    if (i > 0 && std::abs(ps[i].t_lo - ps[i - 1].t_hi) > kTol)
      fail(ErrKind::NonContiguousPieces, "pieces must partition [0, length]");
  }
  if (!(spec.s_hi > spec.s_lo))
    fail(ErrKind::ValidationError, "need s_lo < s_hi");
}

void validate_det_bound(const ChartSpec& spec) {
  for (const auto& p : spec.pieces) {
    double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
    for (double xi : p.kappa.extremal_points(p.length())) {
      double k = p.kappa.eval(xi);
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    double worst = std::max(std::max(spec.s_lo * kmin, spec.s_lo * kmax),
                            std::max(spec.s_hi * kmin, spec.s_hi * kmax));
    if (1.0 - worst < spec.knobs.delta_det)
      fail(ErrKind::DetDegenerate, "1 - s*kappa falls below delta_det");
  }
}

void validate_classification(const ChartSpec& spec,
                             const std::vector<double>& phi_at_lo) {
  for (size_t i = 0; i < spec.pieces.size(); ++i) {
    const auto& p = spec.pieces[i];
    switch (p.kind) {
      case PieceKind::Flat:
        if (!p.kappa_n.is_zero())
          fail(ErrKind::ClassificationMismatch, "flat piece needs kappa_n == 0");
        break;
      case PieceKind::Cylindrical: {
        if (!p.kappa.is_zero())
          fail(ErrKind::ClassificationMismatch, "cylindrical piece needs kappa == 0");
        if (p.kappa_n.is_zero())
          fail(ErrKind::ClassificationMismatch,
               "cylindrical piece needs nonvanishing kappa_n");
        if (!p.direction)
          fail(ErrKind::ClassificationMismatch,
               "cylindrical piece needs a declared direction");
        Vec2 tangent(std::cos(phi_at_lo[i]), std::sin(phi_at_lo[i]));
        Vec2 u = p.direction->unit();
        double dist = std::min((tangent - u).norm(), (tangent + u).norm());
        if (dist > 1e-9)
          fail(ErrKind::ClassificationMismatch,
               "declared direction does not match the piece tangent");
        break;
      }
      case PieceKind::Conical: {
        bool pos = false, neg = false;
        double amin = std::numeric_limits<double>::infinity();
        for (double xi : p.kappa.extremal_points(p.length())) {
          double k = p.kappa.eval(xi);
          (k > 0 ? pos : neg) = true;
          amin = std::min(amin, std::abs(k));
        }
        if ((pos && neg) || amin < spec.knobs.kappa_min)
          fail(ErrKind::ClassificationMismatch,
               "conical piece needs |kappa| >= kappa_min throughout");
        if (p.kappa_n.is_zero())
          fail(ErrKind::ClassificationMismatch,
               "conical piece needs nonvanishing kappa_n");
        break;
      }
    }
  }
}

void validate_no_overlap(const DevelopableChart& chart) {
  const int nt = 96, ns = 9;
  double ell = chart.length();
  double step_t = ell / (nt - 1);
  double step_s = (chart.s_hi() - chart.s_lo()) / (ns - 1);
  double param_cut = 10.0 * std::hypot(step_t, step_s);
  double dist_min = chart.knobs().dist_min_factor * ell;
  struct Sample {
    double t, s;
    Vec2 x;
  };
  std::vector<Sample> samples;
  samples.reserve(size_t(nt) * ns);
  for (int i = 0; i < nt; ++i) {
    double t = step_t * i;
    auto st = chart.planar(t);
    for (int j = 0; j < ns; ++j) {
      double s = chart.s_lo() + step_s * j;
      samples.push_back({t, s, st.gamma + s * st.N});
    }
  }
  for (size_t a = 0; a < samples.size(); ++a)
    for (size_t b = a + 1; b < samples.size(); ++b) {
      double dpar = std::hypot(samples[a].t - samples[b].t, samples[a].s - samples[b].s);
      if (dpar <= param_cut) continue;
      if ((samples[a].x - samples[b].x).norm() < dist_min)
        fail(ErrKind::SelfOverlap, "chart image self-overlaps");
    }
}

}  // namespace

DevelopableChart build_chart(const ChartSpec& spec) {
  validate_pieces(spec);
  validate_det_bound(spec);
  Mat3 FFt = spec.frame0 * spec.frame0.transpose();
  if ((FFt - Mat3::Identity()).norm() > 1e-12 ||
      std::abs(spec.frame0.determinant() - 1.0) > 1e-12)
    fail(ErrKind::ValidationError, "frame0 must be a rotation", "chart.frame0");

  DevelopableChart chart(spec);
  std::vector<double> phi_at_lo(spec.pieces.size());
  for (size_t i = 0; i < spec.pieces.size(); ++i)
    phi_at_lo[i] = chart.phi(spec.pieces[i].t_lo);
  validate_classification(spec, phi_at_lo);
  validate_no_overlap(chart);
  return chart;
}

double ClassifySummary::total() const {
  double t = flat_measure + conical_measure;
  for (const auto& [dir, m] : cylindrical_measure) t += m;
  return t;
}

ClassifySummary classify(const DevelopableChart& chart) {
  ClassifySummary out;
  double s0 = chart.s_lo(), s1 = chart.s_hi();
  double ds = s1 - s0;
  double s2half = 0.5 * (s1 * s1 - s0 * s0);
  for (const auto& p : chart.pieces()) {
    // integral of (1 - s kappa) over the piece strip, exact
    double kappa_int = p.kappa.antiderivative(p.length());
    double measure = ds * p.length() - s2half * kappa_int;
    switch (p.kind) {
      case PieceKind::Flat:
        out.flat_measure += measure;
        break;
      case PieceKind::Cylindrical:
        out.cylindrical_measure[*p.direction] += measure;
        break;
      case PieceKind::Conical:
        out.conical_measure += measure;
        break;
    }
  }
  return out;
}

}  // namespace platehom
