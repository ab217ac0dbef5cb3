#pragma once

#include "platehom/cell_problem.hpp"
#include "platehom/material.hpp"
#include "platehom/quadrature.hpp"
#include "platehom/sampler.hpp"

namespace platehom {

/// Heterogeneous bending energy
///   E_eps = int Q(Phi(t,s)/eps, mu_theta T (x) T) (1 - s kappa) ds dt
/// over the chart, with tensor Gauss tiles no coarser than
/// eps/(grid_n * nodes_per_cell) per axis and Richardson-halving acceptance.
/// Throws QuadratureNotConverged after quad.max_refine refinements.
double energy_eps(const PeriodicQuadraticForm& Q, const ImmersionSampler& sampler,
                  double eps, const QuadratureSpec& quad, int threads = 1);

/// Homogenized energy: flat pieces contribute 0, conical pieces
/// int mu^2 Q_av(T(t) (x) T(t)) (1 - s kappa), cylindrical pieces
/// Q_hom(T (x) T) int mu^2 (1 - s kappa) with one cell solve per distinct
/// direction (irrational tags fall back to Q_hom = Q_av).
double energy_hom(const PeriodicQuadraticForm& Q, const DevelopableChart& chart,
                  const QuadratureSpec& quad, int threads = 1);

/// sqrt( int |u_A - u_B|^2 (1 - s kappa) ds dt ); the samplers must share
/// the planar chart (pos0/frame0 may differ). Throws ChartMismatch.
double l2_distance(const ImmersionSampler& a, const ImmersionSampler& b,
                   int threads = 1);

/// Exact weighted moment int mu^2 (1 - s kappa) over the chart with
/// theta = 0 (used for energy bounds; closed-form in s).
double bending_moment(const DevelopableChart& chart, const QuadratureSpec& quad);

}  // namespace platehom
