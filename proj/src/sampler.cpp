#include "platehom/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "platehom/errors.hpp"

namespace platehom {

ThetaProfile ThetaProfile::piecewise(std::vector<double> breaks,
                                     std::vector<double> values) {
  if (breaks.size() != values.size() + 1 || values.empty())
    fail(ErrKind::ValidationError, "piecewise theta needs m+1 breaks for m values");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    fail(ErrKind::ValidationError, "theta breaks must be sorted");
  ThetaProfile p;
  p.kind_ = Kind::Piecewise;
  p.feature_scale_ = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    p.feature_scale_ = std::min(p.feature_scale_, breaks[i + 1] - breaks[i]);
  p.breaks_ = std::move(breaks);
  p.values_ = std::move(values);
  return p;
}

ThetaProfile ThetaProfile::callable(std::function<double(double)> f,
                                    double feature_scale) {
  ThetaProfile p;
  p.kind_ = Kind::Callable;
  p.fn_ = std::move(f);
  p.feature_scale_ = feature_scale;
  return p;
}

double ThetaProfile::operator()(double t) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Callable:
      return fn_(t);
    case Kind::Piecewise: {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
      int idx = int(it - breaks_.begin()) - 1;
      idx = std::clamp(idx, 0, int(values_.size()) - 1);
      return values_[size_t(idx)];
    }
  }
  return 0.0;
}

namespace {

Mat3 coeff_matrix(double kap, double mn) {
  Mat3 A;
  A << 0, kap, mn, -kap, 0, 0, -mn, 0, 0;
  return A;
}

// exp(dt A) for the frame generator, via the rank-2 Rodrigues identity
// A^3 = -w^2 A with w^2 = kap^2 + mn^2.
Mat3 frame_exp(double kap, double mn, double dt) {
  double w = std::hypot(kap, mn);
  Mat3 A = coeff_matrix(kap, mn);
  if (w * std::abs(dt) < 1e-9) {
    // series to second order; adequate below the branch cut
    return Mat3::Identity() + dt * A + 0.5 * dt * dt * (A * A);
  }
  double th = w * dt;
  return Mat3::Identity() + (std::sin(th) / w) * A +
         ((1.0 - std::cos(th)) / (w * w)) * (A * A);
}

// J(dt) = int_0^dt exp(tau A) dtau.
Mat3 frame_exp_integral(double kap, double mn, double dt) {
  double w = std::hypot(kap, mn);
  Mat3 A = coeff_matrix(kap, mn);
  if (w * std::abs(dt) < 1e-9) {
    return dt * Mat3::Identity() + 0.5 * dt * dt * A +
           (dt * dt * dt / 6.0) * (A * A);
  }
  double th = w * dt;
  return dt * Mat3::Identity() + ((1.0 - std::cos(th)) / (w * w)) * A +
         ((dt - std::sin(th) / w) / (w * w)) * (A * A);
}

Mat3 polar_project(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 P = svd.matrixU() * svd.matrixV().transpose();
  if (P.determinant() < 0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    P = U * svd.matrixV().transpose();
  }
  return P;
}

}  // namespace

ImmersionSampler::ImmersionSampler(std::shared_ptr<const DevelopableChart> chart,
                                   ThetaProfile theta, double h_frame_hint)
    : chart_(std::move(chart)), theta_(std::move(theta)) {
  const auto& pieces = chart_->pieces();
  double ell = chart_->length();

  std::vector<double> cuts{0.0, ell};
  for (const auto& p : pieces)
    if (p.t_lo > 1e-14 && p.t_lo < ell - 1e-14) cuts.push_back(p.t_lo);
  if (theta_.has_breaks())
    for (double b : theta_.breaks())
      if (b > 1e-14 && b < ell - 1e-14) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a < 1e-13; }),
             cuts.end());

  Mat3 R = chart_->frame0();
  Vec3 gamma = chart_->pos0();
  size_t magnus_steps = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    int pi = chart_->piece_index(0.5 * (a + b));
    const CurvaturePiece& p = pieces[size_t(pi)];
    bool exact = p.kappa.is_constant() && p.kappa_n.is_constant() &&
                 (theta_.is_zero() || theta_.has_breaks());
    if (exact) {
      double kap = p.kappa.eval(0.0);
      double mn = (1.0 + theta_(0.5 * (a + b))) * p.kappa_n.eval(0.0);
      nodes_.push_back({a, R, gamma, true, kap, mn});
      Mat3 E = frame_exp(kap, mn, b - a);
      Mat3 J = frame_exp_integral(kap, mn, b - a);
      gamma += R.transpose() * J.row(0).transpose();
      R = (E * R).eval();
    } else {
      // Midpoint-exponential (second-order Magnus) steps.
      double h = std::min((b - a), p.length() / 8.0);
      if (h_frame_hint > 0.0) h = std::min(h, h_frame_hint);
      if (theta_.feature_scale() < std::numeric_limits<double>::infinity())
        h = std::min(h, theta_.feature_scale() / 16.0);
      h = std::min(h, 1e-3 * std::max(1.0, ell));
      int m = std::max(1, int(std::ceil((b - a) / h - 1e-12)));
      for (int k = 0; k < m; ++k) {
        double t0 = a + (b - a) * k / m;
        double t1 = a + (b - a) * (k + 1) / m;
        double mid = 0.5 * (t0 + t1);
        double kap = p.kappa.eval(mid - p.t_lo);
        double mn = (1.0 + theta_(mid)) * p.kappa_n.eval(mid - p.t_lo);
        nodes_.push_back({t0, R, gamma, false, kap, mn});
        Mat3 E = frame_exp(kap, mn, t1 - t0);
        Mat3 J = frame_exp_integral(kap, mn, t1 - t0);
        gamma += R.transpose() * J.row(0).transpose();
        R = (E * R).eval();
        if (++magnus_steps % 1000 == 0) R = polar_project(R);
      }
    }
  }
  nodes_.push_back({ell, R, gamma, true, 0.0, 0.0});
}

const ImmersionSampler::Node& ImmersionSampler::node_before(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                             [](double v, const Node& n) { return v < n.t; });
  int idx = std::clamp(int(it - nodes_.begin()) - 1, 0, int(nodes_.size()) - 1);
  return nodes_[size_t(idx)];
}

void ImmersionSampler::advance(const Node& from, double t, Mat3& R, Vec3& gamma) const {
  double dt = t - from.t;
  double kap = from.kap, mn = from.mn;
  if (!from.exact && dt > 0) {
    // re-evaluate midpoint coefficients for the partial Magnus step
    double mid = from.t + 0.5 * dt;
    int pi = chart_->piece_index(mid);
    const CurvaturePiece& p = chart_->pieces()[size_t(pi)];
    kap = p.kappa.eval(mid - p.t_lo);
    mn = (1.0 + theta_(mid)) * p.kappa_n.eval(mid - p.t_lo);
  }
  Mat3 E = frame_exp(kap, mn, dt);
  Mat3 J = frame_exp_integral(kap, mn, dt);
  gamma = from.gamma + from.R.transpose() * J.row(0).transpose();
  R = E * from.R;
}

Mat3 ImmersionSampler::frame(double t) const {
  if (t < -1e-12 || t > chart_->length() + 1e-12)
    fail(ErrKind::OutOfRange, "t outside [0, length]");
  Mat3 R;
  Vec3 gamma;
  advance(node_before(t), t, R, gamma);
  return R;
}

Vec3 ImmersionSampler::position(double t) const {
  if (t < -1e-12 || t > chart_->length() + 1e-12)
    fail(ErrKind::OutOfRange, "t outside [0, length]");
  Mat3 R;
  Vec3 gamma;
  advance(node_before(t), t, R, gamma);
  return gamma;
}

std::pair<Vec3, Mat32> ImmersionSampler::immersion(double t, double s) const {
  if (!chart_->in_rectangle(t, s))
    fail(ErrKind::OutOfRange, "(t,s) outside the chart rectangle");
  Mat3 R;
  Vec3 gamma;
  advance(node_before(t), t, R, gamma);
  Vec3 gp = R.row(0).transpose();
  Vec3 nu = R.row(1).transpose();
  auto st = chart_->planar(t);
  Vec3 u = gamma + s * nu;
  Mat32 grad;
  grad.col(0) = gp * st.T.x() + nu * st.N.x();
  grad.col(1) = gp * st.T.y() + nu * st.N.y();
  return {u, grad};
}

RankOneForm ImmersionSampler::second_form(double t, double s) const {
  if (!chart_->in_rectangle(t, s))
    fail(ErrKind::OutOfRange, "(t,s) outside the chart rectangle");
  auto st = chart_->planar(t);
  double kap = chart_->kappa(t);
  double kn = chart_->kappa_n(t);
  double mu = (1.0 + theta_(t)) * kn / (1.0 - s * kap);
  return RankOneForm{mu, st.T};
}

std::pair<double, double> ImmersionSampler::invert_map(const Vec2& x, double t_seed,
                                                       double s_seed) const {
  double t = t_seed, s = s_seed;
  for (int it = 0; it < 60; ++it) {
    auto st = chart_->planar(std::clamp(t, 0.0, chart_->length()));
    Vec2 res = st.gamma + s * st.N - x;
    if (res.norm() < 1e-13) {
      if (!chart_->in_rectangle(t, s, 1e-9))
        fail(ErrKind::OutOfRange, "inverted point leaves the chart rectangle");
      return {t, s};
    }
    double kap = chart_->kappa(std::clamp(t, 0.0, chart_->length()));
    Mat2 J;
    J.col(0) = (1.0 - s * kap) * st.T;
    J.col(1) = st.N;
    Vec2 delta = J.inverse() * res;
    if (!delta.allFinite() || delta.norm() > 0.5 * std::max(1.0, chart_->length()))
      break;
    t -= delta.x();
    s -= delta.y();
    t = std::clamp(t, -1e-6, chart_->length() + 1e-6);
    s = std::clamp(s, chart_->s_lo() - 1e-6, chart_->s_hi() + 1e-6);
  }
  fail(ErrKind::NewtonDivergence, "chart inversion did not converge");
}

SymTensor2 ImmersionSampler::second_form_fd(double t, double s, double h) const {
  Vec2 x0 = chart_->map(t, s);
  Vec3 U[3][3];
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      Vec2 x = x0 + h * Vec2(i, j);
      auto [ti, si] = invert_map(x, t, s);
      U[i + 1][j + 1] = immersion(ti, si).first;
    }
  Vec3 d1 = (U[2][1] - U[0][1]) / (2.0 * h);
  Vec3 d2 = (U[1][2] - U[1][0]) / (2.0 * h);
  Vec3 n = d1.cross(d2);
  n.normalize();
  Vec3 d11 = (U[2][1] - 2.0 * U[1][1] + U[0][1]) / (h * h);
  Vec3 d22 = (U[1][2] - 2.0 * U[1][1] + U[1][0]) / (h * h);
  Vec3 d12 = (U[2][2] - U[2][0] - U[0][2] + U[0][0]) / (4.0 * h * h);
  return SymTensor2(d11.dot(n), d22.dot(n), d12.dot(n));
}

}  // namespace platehom
