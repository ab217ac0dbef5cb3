#pragma once

#include <iosfwd>
#include <vector>

#include "platehom/direction.hpp"
#include "platehom/material.hpp"
#include "platehom/types.hpp"

namespace platehom {

struct Segment {
  Vec2 a, b;
  double length() const { return (b - a).norm(); }
};

/// Maximal segments of L_t = { y in [0,1)^2 : T.y - t in r(T) Z } for a
/// rational direction. Total 1-d measure is 1/r(T). Throws
/// IrrationalDirection when r(T) = 0. Degenerate (zero-length) intersections
/// and segments lying on the excluded faces y1 = 1 / y2 = 1 are dropped.
std::vector<Segment> line_family(const Direction& T, double t);

/// q_av_T(t) = r(T) * integral over L_t of Q(y, T (x) T) dH^1, computed
/// exactly by splitting segments at material grid lines.
double q_av(const PeriodicQuadraticForm& Q, const Direction& T, double t);

/// Full-cell average of Q(y, T (x) T), i.e. Q_av(T (x) T). Works for any T.
double q_av_direction(const PeriodicQuadraticForm& Q, const Direction& T);

/// Solved cell problem for one direction. For rational T the profile q_av_T
/// lives on [0, r) with breakpoints where the line family crosses grid
/// vertices; on each interval q_av_T is affine (it degenerates to a constant
/// for axis directions and for laminates). breaks has size m+1 with
/// breaks.front() = 0 and breaks.back() = r; q_lo/q_hi are the affine
/// endpoint values, q_vals/alpha_prime the interval means. For r = 0 the
/// profile is empty and Q_hom = Q_av.
struct CellSolution {
  Direction direction = Direction::generic(0.0);
  double r = 0.0;
  std::vector<double> breaks;
  std::vector<double> q_vals;
  std::vector<double> q_lo, q_hi;
  std::vector<double> alpha_prime;
  double Q_av = 0.0;
  double Q_hom = 0.0;

  /// Value of q_av_T at t (periodic in r). Undefined for r = 0.
  double q_at(double t) const;
  /// Value of alpha_*'(t) = Q_hom / q_av_T(t) - 1 (periodic in r); 0 for r = 0.
  double alpha_prime_at(double t) const;
  /// True when every interval is constant within tol (then alpha_prime is an
  /// exact piecewise-constant profile).
  bool piecewise_constant(double tol = 1e-12) const;

 private:
  int interval_index(double t) const;
};

/// Q_av, Q_hom = 1 / (mean of 1/q_av_T), and the Euler-Lagrange-consistent
/// optimal profile alpha_*'(t) = Q_hom / q_av_T(t) - 1.
CellSolution solve_cell(const PeriodicQuadraticForm& Q, const Direction& T);

/// Independent Fubini check: integrates Q(y, (1 + alpha_*'(T.y)) T (x) T)
/// over the unit cell by exact per-cell strip integration (no line families)
/// and returns |result - Q_hom|. Contract: residual <= 1e-8.
double verify_cell(const PeriodicQuadraticForm& Q, const CellSolution& sol);

/// CSV with header metadata lines (# direction, r, Q_av, Q_hom) and rows
/// t_lo,t_hi,q_av,alpha_prime.
void write_csv(const CellSolution& sol, std::ostream& os);

}  // namespace platehom
