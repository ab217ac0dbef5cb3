#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "platehom/energy.hpp"

namespace platehom {

/// Per-piece description of the oscillation carried by a recovery sequence:
/// cylindrical pieces with rational direction get the optimal cell profile
/// alpha_*' evaluated along the physical coordinate T.x/eps with phase
/// c = T.Gamma(t_lo); all other pieces carry the zero profile.
struct OscillationProfile {
  int piece_index = 0;
  bool active = false;           // false: zero profile on this piece
  Direction direction = Direction::generic(0.0);
  double r = 0.0;
  double phase_c = 0.0;
  int sign = 1;                  // +-1, tangent vs canonical direction
  CellSolution solution;         // cell solve for `direction` (active only)
};

std::vector<OscillationProfile> oscillation_profiles(const DevelopableChart& chart,
                                                     const PeriodicQuadraticForm& Q);

/// theta^eps(t) = alpha_*'((c + sign (t - t_lo)) / eps mod r) on rational
/// cylindrical pieces, 0 elsewhere. Piecewise constant whenever the cell
/// profile is (then breakpoints are aligned exactly for the integrators).
ThetaProfile build_theta(const DevelopableChart& chart, const PeriodicQuadraticForm& Q,
                         double eps);

struct ReportRow {
  double eps;
  double E_eps;
  double E_hom;
  double rel_gap;
  double l2_dist;
  double bc_err;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::string chart_hash;
  std::string material_hash;
  QuadratureSpec quad;
};

/// Per-eps recovery run: modulated energy, homogenized energy, L2 distance
/// to the base immersion, and the boundary mismatch at t = 0.
ConvergenceReport convergence_study(const PeriodicQuadraticForm& Q,
                                    const DevelopableChart& chart,
                                    const std::vector<double>& eps_list,
                                    const QuadratureSpec& quad, int threads = 1);

void write_csv(const ConvergenceReport& report, std::ostream& os);

/// Boundary mismatch max_s |u_a(0,s) - u_b(0,s)| + |grad u_a(0,s) - grad u_b(0,s)|.
double boundary_mismatch(const ImmersionSampler& a, const ImmersionSampler& b);

/// Smooth product bump supported in [t_lo,t_hi] x [s_lo,s_hi].
struct Window {
  double t_lo, t_hi, s_lo, s_hi;
  double operator()(double t, double s) const;
  /// Bump over the chart rectangle shrunk by the given margin fraction.
  static Window interior(const DevelopableChart& chart, double margin = 0.1);
};

/// Oscillation diagnostic M_k(eps) = int w mu_theta exp(2 pi i k.Phi/eps)
/// (1 - s kappa); quadrature resolves scale eps/(4|k|).
std::complex<double> two_scale_coefficient(const ImmersionSampler& sampler, double eps,
                                           const Eigen::Vector2i& k, const Window& window,
                                           const QuadratureSpec& quad, int threads = 1);

/// A named family member for the liminf probe: builds theta for a given eps.
struct OscillationProbe {
  std::string name;
  std::function<ThetaProfile(double eps)> make;
};

struct LowerBoundRow {
  std::string probe;
  double eps;
  double E_eps;
};

struct LowerBoundReport {
  std::vector<LowerBoundRow> rows;
  double E_hom = 0.0;
  double min_at_smallest_eps = 0.0;
  bool bound_satisfied = false;  // min >= E_hom (1 - richardson_tol - 0.01)
};

LowerBoundReport lower_bound_probe(const PeriodicQuadraticForm& Q,
                                   const DevelopableChart& chart,
                                   const std::vector<OscillationProbe>& family,
                                   const std::vector<double>& eps_list,
                                   const QuadratureSpec& quad, int threads = 1);

}  // namespace platehom
