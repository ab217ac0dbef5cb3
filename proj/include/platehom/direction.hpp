#pragma once

#include <cstdint>
#include <string>

#include "platehom/types.hpp"

namespace platehom {

/// A unit vector in the plane with an exact rationality tag.
///
/// Rational directions carry coprime integers (p, q) with the canonical sign
/// p > 0, or p = 0 and q > 0; their period is r(T) = 1/sqrt(p^2 + q^2).
/// Floating-point (generic) directions are always treated as irrational,
/// r(T) = 0 — rationality is an exact arithmetic property and must be
/// declared through the integer tag.
class Direction {
 public:
  static Direction rational(std::int64_t p, std::int64_t q);
  static Direction generic(double angle);

  bool is_rational() const { return rational_; }
  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  double angle() const { return angle_; }

  Vec2 unit() const { return unit_; }

  /// r(T): the largest r > 0 with T in r Z^2, or 0 for generic tags.
  double rationality() const;

  bool operator==(const Direction& o) const;
  bool operator<(const Direction& o) const;  // for map keys

  std::string describe() const;

 private:
  Direction() = default;
  bool rational_ = false;
  std::int64_t p_ = 0, q_ = 0;
  double angle_ = 0.0;
  Vec2 unit_ = Vec2::Zero();
};

inline double rationality(const Direction& T) { return T.rationality(); }

}  // namespace platehom
