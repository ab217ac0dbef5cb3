#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "platehom/errors.hpp"
#include "platehom/sampler.hpp"
#include "test_charts.hpp"

using namespace platehom;

namespace {

ErrKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrKind::ValidationError;
}

}  // namespace

TEST_CASE("build_chart: valid cylinder, cone, and det violation") {
  auto cyl = charts::build(charts::cylinder());
  CHECK(cyl->length() == doctest::Approx(1.0));

  ChartSpec cone_spec = charts::cone();
  cone_spec.pieces[0].t_hi = std::numbers::pi / 4.0;
  auto cone = charts::build(cone_spec);
  CHECK(cone->pieces()[0].kind == PieceKind::Conical);

  ChartSpec bad = charts::cylinder();
  bad.pieces[0].kappa = Poly::constant(4.0);
  bad.pieces[0].kind = PieceKind::Conical;
  CHECK(kind_of([&] { build_chart(bad); }) == ErrKind::DetDegenerate);
}

TEST_CASE("build_chart: classification and contiguity errors") {
  ChartSpec s1 = charts::cylinder();
  s1.pieces[0].kappa = Poly::constant(0.5);  // cylindrical with kappa != 0
  s1.s_lo = -0.25;
  s1.s_hi = 0.25;
  CHECK(kind_of([&] { build_chart(s1); }) == ErrKind::ClassificationMismatch);

  ChartSpec s2 = charts::cylinder();
  s2.pieces[0].kappa_n = Poly::constant(0.0);
  CHECK(kind_of([&] { build_chart(s2); }) == ErrKind::ClassificationMismatch);

  ChartSpec s3 = charts::cylinder();
  s3.pieces[0].direction = Direction::rational(1, 1);  // tangent is e1
  CHECK(kind_of([&] { build_chart(s3); }) == ErrKind::ClassificationMismatch);

  ChartSpec s4 = charts::mixed();
  s4.pieces[1].t_lo = 0.4;  // gap after the flat piece
  CHECK(kind_of([&] { build_chart(s4); }) == ErrKind::NonContiguousPieces);

  // conical piece whose kappa crosses zero
  ChartSpec s5 = charts::cone();
  s5.pieces[0].kappa = Poly({-0.5, 1.0});  // -0.5 + t
  CHECK(kind_of([&] { build_chart(s5); }) == ErrKind::ClassificationMismatch);
}

TEST_CASE("build_chart: self-overlap detection") {
  // directrix wraps past a full circle: the strip re-traces itself
  // (length chosen so the overlap sits on sampled points; the guard uses
  // dist_min = 1e-6 * length and only sees sampled images)
  ChartSpec spec = charts::cone();
  spec.pieces[0].t_hi = 95.0 / 94.0 * 2.0 * std::numbers::pi;
  spec.s_lo = -0.45;
  spec.s_hi = 0.45;
  spec.knobs.delta_det = 0.05;
  CHECK(kind_of([&] { build_chart(spec); }) == ErrKind::SelfOverlap);
}

TEST_CASE("planar: straight and circular directrices") {
  auto cyl = charts::build(charts::cylinder());
  auto st = cyl->planar(0.3);
  CHECK((st.gamma - Vec2(0.3, 0.0)).norm() < 1e-14);
  CHECK((st.T - Vec2(1, 0)).norm() < 1e-14);
  CHECK((st.N - Vec2(0, 1)).norm() < 1e-14);

  auto cone = charts::build(charts::cone());
  Vec2 center = cone->gamma0() + Vec2(0.0, 1.0);  // gamma0 + N(0)/kappa
  for (double t : {0.0, 0.4, 0.77, 1.0}) {
    auto p = cone->planar(t);
    CHECK((p.T - Vec2(std::cos(t), std::sin(t))).norm() < 1e-13);
    CHECK((p.gamma - center).norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(cone->planar(1.5), Error);
}

TEST_CASE("planar: tangent angle is continuous across pieces") {
  ChartSpec spec;
  CurvaturePiece a;
  a.t_lo = 0.0;
  a.t_hi = 0.5;
  a.kappa = Poly::constant(0.0);
  a.kappa_n = Poly::constant(1.0);
  a.kind = PieceKind::Cylindrical;
  a.direction = Direction::rational(1, 0);
  CurvaturePiece b;
  b.t_lo = 0.5;
  b.t_hi = 1.0;
  b.kappa = Poly::constant(1.0);
  b.kappa_n = Poly::constant(1.0);
  b.kind = PieceKind::Conical;
  spec.pieces = {a, b};
  spec.s_lo = -0.25;
  spec.s_hi = 0.25;
  auto chart = charts::build(spec);
  CHECK(chart->phi(0.5 - 1e-12) ==
        doctest::Approx(chart->phi(0.5 + 1e-12)).epsilon(1e-9));
  CHECK(chart->phi(1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("frame: closed forms and the matrix exponential oracle") {
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl);
  for (double t : {0.2, 0.7, 1.0}) {
    // rotation by t in the (gamma', n) plane
    Mat3 R = smp.frame(t);
    Mat3 expected;
    expected << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
    CHECK((R - expected).norm() < 1e-12);
  }

  // kappa = kappa_n = 1: R(t) = exp(t A) frame0
  auto cone = charts::build(charts::cone());
  ImmersionSampler cone_smp(cone);
  Mat3 A;
  A << 0, 1, 1, -1, 0, 0, -1, 0, 0;
  for (double t : {0.3, 0.9}) {
    Mat3 expected = Mat3((t * A).eval()).exp();
    CHECK((cone_smp.frame(t) - expected).norm() < 1e-10);
  }

  // theta == -1 kills the normal curvature: frame stays frame0 on a cylinder
  ImmersionSampler flat_smp(cyl,
                            ThetaProfile::callable([](double) { return -1.0; }, 1.0));
  CHECK((flat_smp.frame(0.9) - Mat3::Identity()).norm() < 1e-10);
}

TEST_CASE("immersion: circular cylinder closed form and isometry") {
  ChartSpec spec = charts::cylinder();
  spec.pos0 = Vec3(2.0, -1.0, 0.5);
  auto chart = charts::build(spec);
  ImmersionSampler smp(chart);
  std::mt19937_64 gen = oracles::rng(71);
  std::uniform_real_distribution<double> ut(0.0, 1.0), us(-0.5, 0.5);
  for (int i = 0; i < 50; ++i) {
    double t = ut(gen), s = us(gen);
    auto [u, grad] = smp.immersion(t, s);
    Vec3 expected = spec.pos0 + Vec3(std::sin(t), s, 1.0 - std::cos(t));
    CHECK((u - expected).norm() < 1e-12);
    Mat2 gram = (grad.transpose() * grad).eval();
    CHECK((gram - Mat2::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("immersion: theta == -1 flattens the surface to a plane") {
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl, ThetaProfile::callable([](double) { return -1.0; }, 1.0));
  auto u00 = smp.immersion(0.0, 0.0).first;
  for (double t : {0.25, 0.8}) {
    for (double s : {-0.4, 0.3}) {
      Vec3 u = smp.immersion(t, s).first;
      Vec3 affine = u00 + t * Vec3(1, 0, 0) + s * Vec3(0, 1, 0);
      CHECK((u - affine).norm() < 1e-10);
    }
  }
}

TEST_CASE("immersion: isometry on all three chart families") {
  std::mt19937_64 gen = oracles::rng(83);
  for (auto spec : {charts::cylinder(), charts::cone(), charts::mixed()}) {
    auto chart = charts::build(spec);
    ImmersionSampler smp(chart);
    std::uniform_real_distribution<double> ut(0.0, chart->length());
    std::uniform_real_distribution<double> us(chart->s_lo(), chart->s_hi());
    for (int i = 0; i < 100; ++i) {
      auto [u, grad] = smp.immersion(ut(gen), us(gen));
      (void)u;
      Mat2 gram = (grad.transpose() * grad).eval();
      CHECK((gram - Mat2::Identity()).norm() < 1e-10);
    }
  }
}

TEST_CASE("second_form: closed-form values") {
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl);
  RankOneForm f = smp.second_form(0.37, 0.21);
  CHECK(f.mu == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((f.T - Vec2(1, 0)).norm() < 1e-14);

  auto cone = charts::build(charts::cone());
  ImmersionSampler cone_smp(cone);
  CHECK(cone_smp.second_form(0.5, 0.25).mu == doctest::Approx(4.0 / 3.0).epsilon(1e-13));

  ImmersionSampler mod(cyl, ThetaProfile::callable([](double) { return 0.6; }, 1.0));
  CHECK(mod.second_form(0.4, -0.2).mu == doctest::Approx(1.6).epsilon(1e-13));
  // rank-one by construction
  CHECK(mod.second_form(0.4, -0.2).to_sym().det() == doctest::Approx(0.0));
}

TEST_CASE("second_form_fd matches the analytic form") {
  double h = 1e-3;
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl);
  SymTensor2 fd = smp.second_form_fd(0.5, 0.1, h);
  SymTensor2 an = smp.second_form(0.5, 0.1).to_sym();
  CHECK((fd - an).norm() <= 1e-4);

  auto cone = charts::build(charts::cone());
  ImmersionSampler cone_smp(cone);
  SymTensor2 cfd = cone_smp.second_form_fd(0.5, 0.0, h);
  CHECK(cfd.norm() == doctest::Approx(1.0).epsilon(1e-4));  // mu = kappa_n at s=0

  // flat piece of the mixed chart
  auto mixed = charts::build(charts::mixed());
  ImmersionSampler mixed_smp(mixed);
  CHECK(mixed_smp.second_form_fd(0.15, 0.0, h).norm() < 1e-6);
}

TEST_CASE("second_form_fd refines under h halving") {
  auto cone = charts::build(charts::cone());
  ImmersionSampler smp(cone);
  SymTensor2 an = smp.second_form(0.45, 0.12).to_sym();
  double prev = (smp.second_form_fd(0.45, 0.12, 2e-3) - an).norm();
  for (double h : {1e-3, 5e-4}) {
    double cur = (smp.second_form_fd(0.45, 0.12, h) - an).norm();
    CHECK(cur <= 0.625 * prev);  // at least halves per halving
    prev = cur;
  }
  // developability of the FD form
  CHECK(std::abs(smp.second_form_fd(0.45, 0.12, 1e-3).det()) < 1e-6);
}

TEST_CASE("codazzi residuals vanish under refinement on smooth pieces") {
  auto cone = charts::build(charts::cone());
  ImmersionSampler smp(cone);
  double t0 = 0.5, s0 = 0.05;
  Vec2 x0 = cone->map(t0, s0);
  auto II_at = [&](const Vec2& x) {
    auto [t, s] = smp.invert_map(x, t0, s0);
    return smp.second_form(t, s).to_sym();
  };
  auto residual = [&](double h) {
    SymTensor2 xp = II_at(x0 + Vec2(h, 0)), xm = II_at(x0 - Vec2(h, 0));
    SymTensor2 yp = II_at(x0 + Vec2(0, h)), ym = II_at(x0 - Vec2(0, h));
    double d2_11 = (yp.m11 - ym.m11) / (2 * h);
    double d1_12 = (xp.m12 - xm.m12) / (2 * h);
    double d2_21 = (yp.m12 - ym.m12) / (2 * h);
    double d1_22 = (xp.m22 - xm.m22) / (2 * h);
    return std::abs(d2_11 - d1_12) + std::abs(d2_21 - d1_22);
  };
  double r1 = residual(1e-2), r2 = residual(5e-3), r3 = residual(2.5e-3);
  CHECK(r2 <= 0.625 * r1);
  CHECK(r3 <= 0.625 * r2);
}

TEST_CASE("chart weight: finite-difference det of Phi equals 1 - s kappa") {
  auto cone = charts::build(charts::cone());
  double h = 1e-5;
  std::mt19937_64 gen = oracles::rng(91);
  std::uniform_real_distribution<double> ut(2 * h, 1.0 - 2 * h), us(-0.2, 0.2);
  for (int i = 0; i < 20; ++i) {
    double t = ut(gen), s = us(gen);
    Vec2 dt = (cone->map(t + h, s) - cone->map(t - h, s)) / (2 * h);
    Vec2 ds = (cone->map(t, s + h) - cone->map(t, s - h)) / (2 * h);
    double det = dt.x() * ds.y() - dt.y() * ds.x();
    CHECK(det == doctest::Approx(cone->det_weight(t, s)).epsilon(1e-8));
  }
}

TEST_CASE("frame orthogonality survives fast piecewise modulation") {
  // square wave of amplitude 0.6 at scale eps = 1/128
  double eps = 1.0 / 128.0;
  std::vector<double> breaks{0.0};
  std::vector<double> vals;
  int m = int(std::round(2.0 / eps));
  for (int i = 0; i < m; ++i) {
    vals.push_back(i % 2 == 0 ? 0.6 : -0.6);
    breaks.push_back((i + 1) * eps / 2.0);
  }
  breaks.back() = 1.0;
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl, ThetaProfile::piecewise(breaks, vals));
  std::mt19937_64 gen = oracles::rng(97);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Mat3 R = smp.frame(ut(gen));
    CHECK((R * R.transpose() - Mat3::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("magnus path: polynomial curvature matches a dense product reference") {
  ChartSpec spec;
  CurvaturePiece p;
  p.t_lo = 0.0;
  p.t_hi = 1.0;
  p.kappa = Poly({0.2, 0.5, -0.3});  // positive on [0,1]
  p.kappa_n = Poly({1.0, -0.5});
  p.kind = PieceKind::Conical;
  spec.pieces = {p};
  spec.s_lo = -0.25;
  spec.s_hi = 0.25;
  auto chart = charts::build(spec);
  ImmersionSampler smp(chart);

  // reference: dense midpoint-exponential products with tiny steps
  Mat3 R = Mat3::Identity();
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double mid = (i + 0.5) / n;
    Mat3 A;
    double kap = p.kappa.eval(mid), kn = p.kappa_n.eval(mid);
    A << 0, kap, kn, -kap, 0, 0, -kn, 0, 0;
    R = (Mat3(A / n).exp() * R).eval();
  }
  CHECK((smp.frame(1.0) - R).norm() < 1e-6);
  CHECK((smp.frame(1.0) * smp.frame(1.0).transpose() - Mat3::Identity()).norm() <
        1e-10);
}

TEST_CASE("classify: measures per kind with the det weight") {
  auto cyl_summary = classify(*charts::build(charts::cylinder()));
  CHECK(cyl_summary.flat_measure == 0.0);
  CHECK(cyl_summary.conical_measure == 0.0);
  REQUIRE(cyl_summary.cylindrical_measure.size() == 1);
  CHECK(cyl_summary.cylindrical_measure.at(Direction::rational(1, 0)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  auto cone_summary = classify(*charts::build(charts::cone()));
  // integral of (1 - s) over [0,1] x (-1/4, 1/4) = 0.5
  CHECK(cone_summary.conical_measure == doctest::Approx(0.5).epsilon(1e-14));

  ChartSpec flat_spec = charts::cylinder();
  flat_spec.pieces[0].kappa_n = Poly::constant(0.0);
  flat_spec.pieces[0].kind = PieceKind::Flat;
  flat_spec.pieces[0].direction.reset();
  auto flat_summary = classify(*charts::build(flat_spec));
  CHECK(flat_summary.flat_measure == doctest::Approx(1.0).epsilon(1e-14));

  auto mixed_summary = classify(*charts::build(charts::mixed()));
  CHECK(mixed_summary.flat_measure == doctest::Approx(0.15).epsilon(1e-13));
  CHECK(mixed_summary.cylindrical_measure.at(Direction::rational(1, 0)) ==
        doctest::Approx(0.175).epsilon(1e-13));
  CHECK(mixed_summary.conical_measure == doctest::Approx(0.175).epsilon(1e-13));
  CHECK(mixed_summary.total() == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("out-of-range and rectangle checks") {
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl);
  CHECK_THROWS_AS(smp.frame(1.5), Error);
  CHECK_THROWS_AS(smp.immersion(0.5, 0.9), Error);
  CHECK_THROWS_AS(smp.second_form(-0.2, 0.0), Error);
}

TEST_CASE("developability: det of the FD second form decays under refinement") {
  auto cone = charts::build(charts::cone());
  ImmersionSampler smp(cone);
  double d1 = std::abs(smp.second_form_fd(0.45, 0.12, 2e-3).det());
  double d2 = std::abs(smp.second_form_fd(0.45, 0.12, 1e-3).det());
  CHECK(d2 <= 0.625 * d1 + 1e-14);
}

TEST_CASE("invert_map diverges cleanly for far-away targets") {
  auto cyl = charts::build(charts::cylinder());
  ImmersionSampler smp(cyl);
  CHECK_THROWS_AS(smp.invert_map(Vec2(25.0, -30.0), 0.5, 0.0), Error);
}
