#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "platehom/chart.hpp"
#include "platehom/types.hpp"

namespace platehom {

/// Scalar modulation profile theta(t) on [0, length]. Either exactly
/// piecewise constant (jump breakpoints known) or a smooth callable with a
/// declared feature scale used for integrator step control.
class ThetaProfile {
 public:
  ThetaProfile() = default;  // identically zero

  static ThetaProfile zero() { return ThetaProfile(); }
  static ThetaProfile piecewise(std::vector<double> breaks, std::vector<double> values);
  static ThetaProfile callable(std::function<double(double)> f, double feature_scale);

  double operator()(double t) const;
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool has_breaks() const { return kind_ == Kind::Piecewise; }
  const std::vector<double>& breaks() const { return breaks_; }
  /// Smallest feature length; +inf when constant.
  double feature_scale() const { return feature_scale_; }

 private:
  enum class Kind { Zero, Piecewise, Callable };
  Kind kind_ = Kind::Zero;
  std::vector<double> breaks_;
  std::vector<double> values_;
  std::function<double(double)> fn_;
  double feature_scale_ = std::numeric_limits<double>::infinity();
};

/// II = mu * T (x) T.
struct RankOneForm {
  double mu = 0.0;
  Vec2 T = Vec2::UnitX();
  SymTensor2 to_sym() const { return SymTensor2::rank_one(mu, T); }
};

/// Evaluates the immersion u, its gradient, the frame R(t) and the second
/// fundamental form of a chart, optionally with the normal curvature
/// modulated by (1 + theta(t)). Frames are integrated in closed form on
/// intervals where (kappa, kappa_n, theta) are constant and by midpoint
/// (second-order Magnus) steps elsewhere; caches are built at construction,
/// after which the sampler is immutable and safe for concurrent reads.
class ImmersionSampler {
 public:
  explicit ImmersionSampler(std::shared_ptr<const DevelopableChart> chart,
                            ThetaProfile theta = ThetaProfile::zero(),
                            double h_frame_hint = 0.0);

  const DevelopableChart& chart() const { return *chart_; }
  std::shared_ptr<const DevelopableChart> chart_ptr() const { return chart_; }
  const ThetaProfile& theta() const { return theta_; }
  double theta_at(double t) const { return theta_(t); }

  /// R(t) in SO(3); rows are (gamma', nu, n).
  Mat3 frame(double t) const;
  /// gamma_theta(t).
  Vec3 position(double t) const;
  /// u(Phi(t,s)) and grad u = gamma' (x) T + nu (x) N (3x2, columns d1 u, d2 u).
  std::pair<Vec3, Mat32> immersion(double t, double s) const;
  /// mu = (1 + theta(t)) kappa_n(t) / (1 - s kappa(t)), direction T(t).
  RankOneForm second_form(double t, double s) const;
  /// Finite-difference oracle on a plane stencil of spacing h around
  /// Phi(t,s); inverts Phi by Newton iteration with the analytic Jacobian.
  SymTensor2 second_form_fd(double t, double s, double h) const;

  /// Inverse of Phi near the given seed. Throws NewtonDivergence / OutOfRange.
  std::pair<double, double> invert_map(const Vec2& x, double t_seed, double s_seed) const;

 private:
  struct Node {
    double t;
    Mat3 R;
    Vec3 gamma;
    bool exact;       // interval [t, next.t) has constant coefficients
    double kap, mn;   // the constants on exact intervals
  };
  void advance(const Node& from, double t, Mat3& R, Vec3& gamma) const;
  const Node& node_before(double t) const;

  std::shared_ptr<const DevelopableChart> chart_;
  ThetaProfile theta_;
  std::vector<Node> nodes_;
};

}  // namespace platehom
