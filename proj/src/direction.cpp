#include "platehom/direction.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

#include "platehom/errors.hpp"

namespace platehom {

Direction Direction::rational(std::int64_t p, std::int64_t q) {
  if (p == 0 && q == 0)
    fail(ErrKind::ValidationError, "rational direction needs (p,q) != (0,0)");
  std::int64_t g = std::gcd(std::abs(p), std::abs(q));
  p /= g;
  q /= g;
  if (p < 0 || (p == 0 && q < 0)) {
    p = -p;
    q = -q;
  }
  Direction d;
  d.rational_ = true;
  d.p_ = p;
  d.q_ = q;
  double h = std::hypot(double(p), double(q));
  d.unit_ = Vec2(double(p) / h, double(q) / h);
  d.angle_ = std::atan2(d.unit_.y(), d.unit_.x());
  return d;
}

Direction Direction::generic(double angle) {
  Direction d;
  d.rational_ = false;
  d.angle_ = angle;
  d.unit_ = Vec2(std::cos(angle), std::sin(angle));
  return d;
}

double Direction::rationality() const {
  if (!rational_) return 0.0;
  return 1.0 / std::hypot(double(p_), double(q_));
}

bool Direction::operator==(const Direction& o) const {
  if (rational_ != o.rational_) return false;
  if (rational_) return p_ == o.p_ && q_ == o.q_;
  return angle_ == o.angle_;
}

bool Direction::operator<(const Direction& o) const {
  return std::tuple(rational_ ? 0 : 1, p_, q_, angle_) <
         std::tuple(o.rational_ ? 0 : 1, o.p_, o.q_, o.angle_);
}

std::string Direction::describe() const {
  if (rational_)
    return "rational(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
  return "generic(" + std::to_string(angle_) + ")";
}

}  // namespace platehom
