#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace platehom {

struct QuadratureSpec {
  int nodes_per_cell = 3;       // Gauss nodes per cell per axis, >= 2
  double richardson_tol = 1e-3; // relative acceptance tolerance
  int max_refine = 4;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int n);

/// Deterministic pairwise-tree sum; independent of chunking/thread count.
double pairwise_sum(std::vector<double>& v);
std::complex<double> pairwise_sum(std::vector<std::complex<double>>& v);

/// 1-d cell list: [breaks[i], breaks[i+1]] tiles. Every value in `must_hit`
/// inside [lo, hi] becomes a tile boundary; tiles are then uniformly split
/// until no tile exceeds h_max.
std::vector<double> build_breaks(double lo, double hi, double h_max,
                                 const std::vector<double>& must_hit = {});

/// Tensor-product Gauss integration of f over the tile grid, tiles evaluated
/// independently and combined by pairwise summation. `threads` only chunks
/// the work; the result is bit-identical for any thread count.
double integrate_tiles(const std::vector<double>& breaks_t,
                       const std::vector<double>& breaks_s, int nodes,
                       const std::function<double(double, double)>& f,
                       int threads = 1);
std::complex<double> integrate_tiles_complex(
    const std::vector<double>& breaks_t, const std::vector<double>& breaks_s,
    int nodes, const std::function<std::complex<double>(double, double)>& f,
    int threads = 1);

/// 1-d Gauss integration over given breaks.
double integrate_1d(const std::vector<double>& breaks, int nodes,
                    const std::function<double(double)>& f);

}  // namespace platehom
