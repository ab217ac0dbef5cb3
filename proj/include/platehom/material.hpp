#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "platehom/types.hpp"

namespace platehom {

/// Cell-periodic quadratic energy density Q(y, F) on symmetric 2x2 matrices.
///
/// The material is piecewise constant on an axis-aligned grid_n x grid_n grid
/// over the unit cell [0,1)^2. Each grid cell holds a symmetric positive
/// definite 3x3 matrix M expressed in the orthonormal basis
/// (m11, m22, sqrt(2) m12), so Q(y, F) = v^T M(y) v with v = coords(sym F).
/// Eigenvalue bounds on M are then exactly the ellipticity bounds
/// alpha |sym F|^2 <= Q(y,F) <= |sym F|^2 / alpha.
class PeriodicQuadraticForm {
 public:
  /// Cells are indexed cells[i * grid_n + j] for the cell
  /// [i/n,(i+1)/n) x [j/n,(j+1)/n). Throws EllipticityViolation if a cell is
  /// not SPD, or if an explicit alpha_ell is inconsistent with the cells.
  PeriodicQuadraticForm(int grid_n, std::vector<Mat3> cells,
                        std::optional<double> alpha_ell = std::nullopt);

  static PeriodicQuadraticForm identity();
  /// Q(y,F) = a |sym F|^2, constant in y.
  static PeriodicQuadraticForm constant(double a);

  int grid_n() const { return grid_n_; }
  double alpha_ell() const { return alpha_ell_; }

  const Mat3& cell(int i, int j) const { return cells_[size_t(i) * grid_n_ + j]; }
  const std::vector<Mat3>& cells() const { return cells_; }

  /// Cell matrix at the periodic image of y.
  const Mat3& cell_at(const Vec2& y) const;
  /// Grid index along one axis for coordinate value c (periodic, half-open cells).
  int cell_index(double c) const;

  double evaluate(const Vec2& y, const SymTensor2& S) const;
  double evaluate(const Vec2& y, const Mat2& F) const {
    return evaluate(y, SymTensor2::sym(F));
  }

  /// Copy with a different declared ellipticity constant (no consistency
  /// check; validate_ellipticity reports on the declared value).
  PeriodicQuadraticForm with_alpha_ell(double alpha) const;

  /// Smallest / largest eigenvalue over all cell matrices.
  double min_eigenvalue() const { return lambda_min_; }
  double max_eigenvalue() const { return lambda_max_; }

 private:
  int grid_n_;
  std::vector<Mat3> cells_;
  double alpha_ell_;
  double lambda_min_, lambda_max_;
};

/// Q(y, F) = a(y_axis) |sym F|^2 with equal-width stripes along the given
/// axis (1 or 2). Throws EmptyCoefficients / EllipticityViolation.
PeriodicQuadraticForm laminate(const std::vector<double>& coeffs, int axis,
                               std::optional<double> alpha_ell = std::nullopt);

/// True iff every cell matrix has eigenvalues in
/// [alpha_ell, 1/alpha_ell] within 1e-12.
bool validate_ellipticity(const PeriodicQuadraticForm& Q);

/// Deterministic random SPD grid material with eigenvalues in
/// [alpha_ell, 1/alpha_ell].
PeriodicQuadraticForm random_grid(int grid_n, std::uint64_t seed, double alpha_ell);

}  // namespace platehom
