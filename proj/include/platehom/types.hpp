#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace platehom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

// a^perp = (-a2, a1)
inline Vec2 perp(const Vec2& a) { return Vec2(-a.y(), a.x()); }

/// Symmetric 2x2 matrix stored as its three independent entries.
struct SymTensor2 {
  double m11 = 0.0;
  double m22 = 0.0;
  double m12 = 0.0;

  SymTensor2() = default;
  SymTensor2(double a11, double a22, double a12) : m11(a11), m22(a22), m12(a12) {}

  /// Symmetric part of a general 2x2 matrix.
  static SymTensor2 sym(const Mat2& F) {
    return SymTensor2(F(0, 0), F(1, 1), 0.5 * (F(0, 1) + F(1, 0)));
  }

  /// mu * T (x) T for a 2-vector T.
  static SymTensor2 rank_one(double mu, const Vec2& T) {
    return SymTensor2(mu * T.x() * T.x(), mu * T.y() * T.y(), mu * T.x() * T.y());
  }

  /// Coordinates in the orthonormal basis (m11, m22, sqrt(2) m12) of
  /// symmetric matrices, so that |coords|^2 equals the Frobenius norm squared.
  Vec3 coords() const { return Vec3(m11, m22, std::numbers::sqrt2 * m12); }

  double norm2() const { return m11 * m11 + m22 * m22 + 2.0 * m12 * m12; }
  double norm() const { return std::sqrt(norm2()); }
  double det() const { return m11 * m22 - m12 * m12; }

  Mat2 matrix() const {
    Mat2 M;
    M << m11, m12, m12, m22;
    return M;
  }

  SymTensor2 operator-(const SymTensor2& o) const {
    return SymTensor2(m11 - o.m11, m22 - o.m22, m12 - o.m12);
  }
  SymTensor2 operator+(const SymTensor2& o) const {
    return SymTensor2(m11 + o.m11, m22 + o.m22, m12 + o.m12);
  }
  SymTensor2 operator*(double c) const { return SymTensor2(c * m11, c * m22, c * m12); }
};

}  // namespace platehom
