#pragma once

#include <map>
#include <optional>
#include <vector>

#include "platehom/direction.hpp"
#include "platehom/types.hpp"

namespace platehom {

/// Polynomial in the local piece coordinate xi = t - t_lo, degree <= 3.
struct Poly {
  std::vector<double> c;  // c[0] + c[1] xi + c[2] xi^2 + c[3] xi^3

  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {}
  static Poly constant(double v) { return Poly({v}); }

  double eval(double xi) const {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * xi + c[i];
    return acc;
  }
  Poly derivative() const {
    Poly d;
    for (size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * double(i));
    return d;
  }
  /// Integral from 0 to xi.
  double antiderivative(double xi) const {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * xi + c[i] / double(i + 1);
    return acc * xi;
  }
  int degree() const {
    for (size_t i = c.size(); i-- > 0;)
      if (c[i] != 0.0) return int(i);
    return -1;  // zero polynomial
  }
  bool is_zero() const { return degree() < 0; }
  bool is_constant() const { return degree() <= 0; }

  /// Candidate extremal points of the polynomial on [0, L]: endpoints plus
  /// real critical points inside.
  std::vector<double> extremal_points(double L) const;
};

enum class PieceKind { Flat, Cylindrical, Conical };

struct CurvaturePiece {
  double t_lo = 0.0, t_hi = 0.0;
  Poly kappa;    // in-plane curvature of the directrix
  Poly kappa_n;  // normal curvature along the directrix
  PieceKind kind = PieceKind::Flat;
  std::optional<Direction> direction;  // cylindrical pieces only

  double length() const { return t_hi - t_lo; }
};

struct ChartKnobs {
  double delta_det = 0.5;       // lower bound on 1 - s kappa(t)
  double kappa_min = 1e-6;      // |kappa| floor on conical pieces
  double dist_min_factor = 1e-6;  // self-overlap threshold, times chart length
};

struct ChartSpec {
  std::vector<CurvaturePiece> pieces;
  double s_lo = 0.0, s_hi = 0.0;
  Vec2 gamma0 = Vec2::Zero();
  double phi0 = 0.0;
  Vec3 pos0 = Vec3::Zero();
  Mat3 frame0 = Mat3::Identity();
  ChartKnobs knobs;
};

/// Line-of-curvature chart Phi(t,s) = Gamma(t) + s N(Gamma(t)) of a
/// developable isometric immersion, described by the piecewise-polynomial
/// curvatures of a single framed curve. Sign conventions: T = Gamma',
/// N = T^perp, phi' = kappa, so Gamma' = -N^perp.
///
/// Immutable after construction; all queries are const and thread-safe.
class DevelopableChart {
 public:
  const std::vector<CurvaturePiece>& pieces() const { return spec_.pieces; }
  double length() const { return spec_.pieces.back().t_hi; }
  double s_lo() const { return spec_.s_lo; }
  double s_hi() const { return spec_.s_hi; }
  const Vec2& gamma0() const { return spec_.gamma0; }
  double phi0() const { return spec_.phi0; }
  const Vec3& pos0() const { return spec_.pos0; }
  const Mat3& frame0() const { return spec_.frame0; }
  const ChartKnobs& knobs() const { return spec_.knobs; }

  int piece_index(double t) const;  // throws OutOfRange
  double kappa(double t) const;
  double kappa_n(double t) const;
  /// Tangent angle phi(t) = phi0 + int_0^t kappa.
  double phi(double t) const;

  struct PlanarState {
    Vec2 gamma;
    Vec2 T;
    Vec2 N;
  };
  PlanarState planar(double t) const;

  /// Phi(t, s).
  Vec2 map(double t, double s) const;
  /// det grad Phi = 1 - s kappa(t).
  double det_weight(double t, double s) const { return 1.0 - s * kappa(t); }

  bool in_rectangle(double t, double s, double tol = 1e-12) const;

  /// Same planar data (pieces, gamma0, phi0, s-range); pos0/frame0 may differ.
  bool same_planar_geometry(const DevelopableChart& o) const;

  friend DevelopableChart build_chart(const ChartSpec& spec);

 private:
  explicit DevelopableChart(ChartSpec spec);
  Vec2 gamma_from_piece_start(int piece, double t) const;

  ChartSpec spec_;
  std::vector<double> phi_start_;           // phi at each piece start
  std::vector<Vec2> gamma_start_;           // Gamma at each piece start
  std::vector<std::vector<Vec2>> gamma_grid_;  // fine grid for non-constant kappa
  std::vector<double> grid_step_;
};

/// Validates and builds a chart. Throws NonContiguousPieces, DetDegenerate,
/// ClassificationMismatch, SelfOverlap, ValidationError.
DevelopableChart build_chart(const ChartSpec& spec);

struct ClassifySummary {
  double flat_measure = 0.0;
  std::map<Direction, double> cylindrical_measure;
  double conical_measure = 0.0;
  double total() const;
};

/// Chart-area measures per kind, weighted by det grad Phi = 1 - s kappa.
ClassifySummary classify(const DevelopableChart& chart);

}  // namespace platehom
