#include "platehom/cell_problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "platehom/errors.hpp"
#include "platehom/quadrature.hpp"

namespace platehom {

namespace {

double floor_mod(double x, double period) {
  double m = x - period * std::floor(x / period);
  if (m >= period) m -= period;
  return m;
}

// Clip the line {p y1 + q y2 = c} to the closed unit square. Returns the
// extreme intersection points, or an empty segment.
bool clip_line(double p, double q, double c, Segment& out) {
  constexpr double eps = 1e-13;
  std::vector<Vec2> pts;
  auto push = [&](double x, double y) {
    if (x < -eps || x > 1 + eps || y < -eps || y > 1 + eps) return;
    Vec2 v(std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0));
    for (const Vec2& w : pts)
      if ((w - v).norm() < 1e-12) return;
    pts.push_back(v);
  };
  if (q != 0.0) {
    push(0.0, c / q);
    push(1.0, (c - p) / q);
  }
  if (p != 0.0) {
    push(c / p, 0.0);
    push((c - q) / p, 1.0);
  }
  if (pts.size() < 2) return false;
  Vec2 d = perp(Vec2(p, q)).normalized();
  std::sort(pts.begin(), pts.end(),
            [&](const Vec2& a, const Vec2& b) { return d.dot(a) < d.dot(b); });
  out = Segment{pts.front(), pts.back()};
  return out.length() > 1e-12;
}

// Material value Q(cell, T (x) T) per grid cell, indexed by midpoint.
double cell_value(const PeriodicQuadraticForm& Q, const Vec3& v, const Vec2& y) {
  return v.dot(Q.cell_at(y) * v);
}

}  // namespace

std::vector<Segment> line_family(const Direction& T, double t) {
  if (!T.is_rational())
    fail(ErrKind::IrrationalDirection, "line family needs a rational direction");
  double r = T.rationality();
  t = floor_mod(t, r);
  double p = double(T.p()), q = double(T.q());
  double sqrtN = std::hypot(p, q);
  double tau = t * sqrtN;  // in [0, 1)
  double c_min = std::min(0.0, p) + std::min(0.0, q);
  double c_max = std::max(0.0, p) + std::max(0.0, q);
  std::vector<Segment> segs;
  long k_lo = long(std::ceil(c_min - tau - 1e-12));
  long k_hi = long(std::floor(c_max - tau + 1e-12));
  for (long k = k_lo; k <= k_hi; ++k) {
    Segment s;
    if (!clip_line(p, q, tau + double(k), s)) continue;
    // Segments lying on the excluded faces y1 = 1 or y2 = 1 of [0,1)^2.
    if (std::min(s.a.x(), s.b.x()) > 1.0 - 1e-12) continue;
    if (std::min(s.a.y(), s.b.y()) > 1.0 - 1e-12) continue;
    segs.push_back(s);
  }
  return segs;
}

double q_av(const PeriodicQuadraticForm& Q, const Direction& T, double t) {
  std::vector<Segment> segs = line_family(T, t);
  Vec3 v = SymTensor2::rank_one(1.0, T.unit()).coords();
  int n = Q.grid_n();
  double total = 0.0;
  for (const Segment& seg : segs) {
    Vec2 d = seg.b - seg.a;
    double len = d.norm();
    if (len < 1e-14) continue;
    std::vector<double> lambdas{0.0, 1.0};
    for (int axis = 0; axis < 2; ++axis) {
      double a0 = seg.a[axis], d0 = d[axis];
      if (std::abs(d0) < 1e-15) continue;
      double u_lo = std::min(a0, a0 + d0), u_hi = std::max(a0, a0 + d0);
      for (int i = int(std::ceil(u_lo * n - 1e-12)); i <= int(std::floor(u_hi * n + 1e-12)); ++i) {
        double lam = (double(i) / n - a0) / d0;
        if (lam > 1e-12 && lam < 1.0 - 1e-12) lambdas.push_back(lam);
      }
    }
    std::sort(lambdas.begin(), lambdas.end());
    for (size_t i = 0; i + 1 < lambdas.size(); ++i) {
      double w = lambdas[i + 1] - lambdas[i];
      if (w < 1e-14) continue;
      Vec2 mid = seg.a + d * (0.5 * (lambdas[i] + lambdas[i + 1]));
      total += cell_value(Q, v, mid) * w * len;
    }
  }
  return T.rationality() * total;
}

double q_av_direction(const PeriodicQuadraticForm& Q, const Direction& T) {
  Vec3 v = SymTensor2::rank_one(1.0, T.unit()).coords();
  int n = Q.grid_n();
  std::vector<double> vals;
  vals.reserve(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vals.push_back(v.dot(Q.cell(i, j) * v));
  return pairwise_sum(vals) / (double(n) * n);
}

int CellSolution::interval_index(double t) const {
  double tm = floor_mod(t, r);
  auto it = std::upper_bound(breaks.begin(), breaks.end(), tm);
  int idx = int(it - breaks.begin()) - 1;
  return std::clamp(idx, 0, int(q_vals.size()) - 1);
}

double CellSolution::q_at(double t) const {
  if (r == 0.0) fail(ErrKind::IrrationalDirection, "no q profile for r = 0");
  int i = interval_index(t);
  double tm = floor_mod(t, r);
  double w = breaks[i + 1] - breaks[i];
  double lam = w > 0 ? (tm - breaks[i]) / w : 0.0;
  return q_lo[i] + (q_hi[i] - q_lo[i]) * lam;
}

double CellSolution::alpha_prime_at(double t) const {
  if (r == 0.0) return 0.0;
  return Q_hom / q_at(t) - 1.0;
}

bool CellSolution::piecewise_constant(double tol) const {
  for (size_t i = 0; i < q_vals.size(); ++i)
    if (std::abs(q_hi[i] - q_lo[i]) > tol * std::max(1.0, std::abs(q_vals[i])))
      return false;
  return true;
}

CellSolution solve_cell(const PeriodicQuadraticForm& Q, const Direction& T) {
  CellSolution sol;
  sol.direction = T;
  if (!T.is_rational()) {
    sol.r = 0.0;
    sol.Q_av = sol.Q_hom = q_av_direction(Q, T);
    return sol;
  }
  double r = T.rationality();
  sol.r = r;
  int n = Q.grid_n();
  double sqrtN = std::hypot(double(T.p()), double(T.q()));

  // The profile can only change where some line of L_t passes through a grid
  // vertex; those t are exactly m / (n sqrt(p^2+q^2)).
  std::vector<double> breaks;
  for (int m = 0; m <= n; ++m) breaks.push_back(double(m) / (double(n) * sqrtN));
  breaks.back() = r;  // n/(n sqrtN) == r, pin exactly
  // merge within 1e-12, keeping the endpoint at exactly r
  std::vector<double> merged{breaks.front()};
  for (double b : breaks)
    if (b - merged.back() > 1e-12) merged.push_back(b);
  if (merged.size() < 2)
    merged.push_back(r);
  else
    merged.back() = r;
  sol.breaks = merged;

  size_t m = sol.breaks.size() - 1;
  sol.q_vals.resize(m);
  sol.q_lo.resize(m);
  sol.q_hi.resize(m);
  sol.alpha_prime.resize(m);

  // q_av_T is affine on each interval; two interior samples determine it.
  double inv_int = 0.0;  // integral of 1/q over [0, r)
  for (size_t i = 0; i < m; ++i) {
    double a = sol.breaks[i], b = sol.breaks[i + 1], w = b - a;
    double q1 = q_av(Q, T, a + 0.25 * w);
    double q3 = q_av(Q, T, a + 0.75 * w);
    double slope = (q3 - q1) / (0.5 * w);
    sol.q_lo[i] = q1 - slope * 0.25 * w;
    sol.q_hi[i] = q3 + slope * 0.25 * w;
    sol.q_vals[i] = 0.5 * (sol.q_lo[i] + sol.q_hi[i]);
    if (std::abs(sol.q_hi[i] - sol.q_lo[i]) <= 1e-12 * std::max(1.0, sol.q_vals[i]))
      inv_int += w / sol.q_vals[i];
    else
      inv_int += w / (sol.q_hi[i] - sol.q_lo[i]) * std::log(sol.q_hi[i] / sol.q_lo[i]);
  }
  sol.Q_av = q_av_direction(Q, T);
  sol.Q_hom = r / inv_int;
  for (size_t i = 0; i < m; ++i) {
    double a = sol.breaks[i], b = sol.breaks[i + 1], w = b - a;
    double inv_i;
    if (std::abs(sol.q_hi[i] - sol.q_lo[i]) <= 1e-12 * std::max(1.0, sol.q_vals[i]))
      inv_i = w / sol.q_vals[i];
    else
      inv_i = w / (sol.q_hi[i] - sol.q_lo[i]) * std::log(sol.q_hi[i] / sol.q_lo[i]);
    sol.alpha_prime[i] = sol.Q_hom * inv_i / w - 1.0;
  }
  return sol;
}

double verify_cell(const PeriodicQuadraticForm& Q, const CellSolution& sol) {
  if (sol.r == 0.0)
    fail(ErrKind::IrrationalDirection, "verify_cell needs a rational-direction solution");
  const Vec2 u = sol.direction.unit();
  Vec3 v = SymTensor2::rank_one(1.0, u).coords();
  int n = Q.grid_n();
  double h = 1.0 / n;
  double u1 = u.x(), u2 = u.y();

  auto modulation = [&](double tau) {
    double a = 1.0 + sol.alpha_prime_at(tau);
    return a * a;
  };

  std::vector<double> cell_integrals;
  cell_integrals.reserve(size_t(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double x0 = i * h, y0 = j * h;
      double a_c = v.dot(Q.cell(i, j) * v);
      // Chord-length profile of the cell along u.
      double c00 = u1 * x0 + u2 * y0;
      double c10 = c00 + u1 * h, c01 = c00 + u2 * h, c11 = c00 + u1 * h + u2 * h;
      std::array<double, 4> cs{c00, c10, c01, c11};
      std::sort(cs.begin(), cs.end());
      double lo = cs[0], hi = cs[3];
      bool axis = std::min(std::abs(u1), std::abs(u2)) < 1e-15;
      double slope = axis ? 0.0 : 1.0 / std::abs(u1 * u2);
      double plateau = h / std::max(std::abs(u1), std::abs(u2));
      auto chord = [&](double tau) -> double {
        if (tau <= lo || tau >= hi) return 0.0;
        if (axis) return h;
        if (tau < cs[1]) return (tau - lo) * slope;
        if (tau > cs[2]) return (hi - tau) * slope;
        return plateau;
      };
      // Knots: corner offsets plus profile breakpoints (all periodic images).
      std::vector<double> knots(cs.begin(), cs.end());
      long k0 = long(std::floor(lo / sol.r)) - 1;
      long k1 = long(std::ceil(hi / sol.r)) + 1;
      for (long k = k0; k <= k1; ++k)
        for (double b : sol.breaks) {
          double tau = b + double(k) * sol.r;
          if (tau > lo + 1e-14 && tau < hi - 1e-14) knots.push_back(tau);
        }
      std::sort(knots.begin(), knots.end());
      knots.erase(std::unique(knots.begin(), knots.end(),
                              [](double a, double b) { return b - a < 1e-14; }),
                  knots.end());
      const GaussRule& g = gauss_rule(24);
      double acc = 0.0;
      for (size_t kk = 0; kk + 1 < knots.size(); ++kk) {
        double mid = 0.5 * (knots[kk] + knots[kk + 1]);
        double half = 0.5 * (knots[kk + 1] - knots[kk]);
        if (half < 1e-15) continue;
        double part = 0.0;
        for (size_t a = 0; a < g.nodes.size(); ++a) {
          double tau = mid + half * g.nodes[a];
          part += g.weights[a] * modulation(tau) * chord(tau);
        }
        acc += part * half;
      }
      cell_integrals.push_back(a_c * acc);
    }
  }
  double I = pairwise_sum(cell_integrals);
  return std::abs(I - sol.Q_hom);
}

void write_csv(const CellSolution& sol, std::ostream& os) {
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "# direction=" << sol.direction.describe() << "\n";
  os << "# r=" << fmt(sol.r) << "\n";
  os << "# Q_av=" << fmt(sol.Q_av) << "\n";
  os << "# Q_hom=" << fmt(sol.Q_hom) << "\n";
  os << "t_lo,t_hi,q_av,alpha_prime\n";
  for (size_t i = 0; i < sol.q_vals.size(); ++i)
    os << fmt(sol.breaks[i]) << "," << fmt(sol.breaks[i + 1]) << ","
       << fmt(sol.q_vals[i]) << "," << fmt(sol.alpha_prime[i]) << "\n";
}

}  // namespace platehom
