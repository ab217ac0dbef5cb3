#include "platehom/material.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "platehom/errors.hpp"

namespace platehom {

namespace {

std::pair<double, double> eigen_range(const std::vector<Mat3>& cells) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Mat3& M : cells) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

}  // namespace

PeriodicQuadraticForm::PeriodicQuadraticForm(int grid_n, std::vector<Mat3> cells,
                                             std::optional<double> alpha_ell)
    : grid_n_(grid_n), cells_(std::move(cells)) {
  if (grid_n_ < 1) fail(ErrKind::ValidationError, "grid_n must be positive");
  if (cells_.size() != size_t(grid_n_) * grid_n_)
    fail(ErrKind::ValidationError, "expected grid_n^2 cell matrices");
  for (Mat3& M : cells_) {
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrKind::ValidationError, "cell matrix not symmetric");
    M = 0.5 * (M + M.transpose().eval());
  }
  std::tie(lambda_min_, lambda_max_) = eigen_range(cells_);
  if (!(lambda_min_ > 0.0))
    fail(ErrKind::EllipticityViolation, "cell matrix not positive definite");
  if (alpha_ell) {
    if (!(*alpha_ell > 0.0))
      fail(ErrKind::EllipticityViolation, "alpha_ell must be positive");
    alpha_ell_ = *alpha_ell;
    if (lambda_min_ < alpha_ell_ - 1e-12 || lambda_max_ > 1.0 / alpha_ell_ + 1e-12)
      fail(ErrKind::EllipticityViolation,
           "cell eigenvalues violate the declared [alpha, 1/alpha] bounds");
  } else {
    // Tightest constant consistent with the cells.
    alpha_ell_ = std::min(lambda_min_, 1.0 / lambda_max_);
  }
}

PeriodicQuadraticForm PeriodicQuadraticForm::identity() { return constant(1.0); }

PeriodicQuadraticForm PeriodicQuadraticForm::constant(double a) {
  std::vector<Mat3> cells{Mat3::Identity() * a};
  return PeriodicQuadraticForm(1, std::move(cells));
}

int PeriodicQuadraticForm::cell_index(double c) const {
  double f = c - std::floor(c);  // in [0,1)
  int i = int(f * grid_n_);
  return std::min(i, grid_n_ - 1);
}

const Mat3& PeriodicQuadraticForm::cell_at(const Vec2& y) const {
  return cell(cell_index(y.x()), cell_index(y.y()));
}

double PeriodicQuadraticForm::evaluate(const Vec2& y, const SymTensor2& S) const {
  Vec3 v = S.coords();
  return v.dot(cell_at(y) * v);
}

PeriodicQuadraticForm PeriodicQuadraticForm::with_alpha_ell(double alpha) const {
  PeriodicQuadraticForm copy = *this;
  copy.alpha_ell_ = alpha;
  return copy;
}

PeriodicQuadraticForm laminate(const std::vector<double>& coeffs, int axis,
                               std::optional<double> alpha_ell) {
  if (coeffs.empty()) fail(ErrKind::EmptyCoefficients, "laminate needs coefficients");
  if (axis != 1 && axis != 2) fail(ErrKind::ValidationError, "axis must be 1 or 2");
  for (double a : coeffs)
    if (!(a > 0.0) || !std::isfinite(a))
      fail(ErrKind::EllipticityViolation, "laminate coefficient must be positive");
  int n = int(coeffs.size());
  std::vector<Mat3> cells(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = coeffs[axis == 1 ? i : j];
      cells[size_t(i) * n + j] = a * Mat3::Identity();
    }
  return PeriodicQuadraticForm(n, std::move(cells), alpha_ell);
}

bool validate_ellipticity(const PeriodicQuadraticForm& Q) {
  double a = Q.alpha_ell();
  return Q.min_eigenvalue() >= a - 1e-12 && Q.max_eigenvalue() <= 1.0 / a + 1e-12;
}

PeriodicQuadraticForm random_grid(int grid_n, std::uint64_t seed, double alpha_ell) {
  if (!(alpha_ell > 0.0 && alpha_ell <= 1.0))
    fail(ErrKind::ValidationError, "alpha_ell must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double log_lo = std::log(alpha_ell), log_hi = std::log(1.0 / alpha_ell);
  std::vector<Mat3> cells(size_t(grid_n) * grid_n);
  for (Mat3& M : cells) {
    Mat3 G;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) G(r, c) = gauss(rng);
    Eigen::HouseholderQR<Mat3> qr(G);
    Mat3 U = qr.householderQ();
    Vec3 lam;
    for (int r = 0; r < 3; ++r)
      lam[r] = std::exp(log_lo + (log_hi - log_lo) * unif(rng));
    M = U * lam.asDiagonal() * U.transpose();
    M = 0.5 * (M + M.transpose().eval());
  }
  return PeriodicQuadraticForm(grid_n, std::move(cells), alpha_ell);
}

}  // namespace platehom
