// Points, open balls, and scheduled ball unions.
//
// Every ball in this library is open: membership tests use strict inequality
// with no epsilon slack. Boundary points are excluded by construction, and all
// counting/restriction operations inherit that convention.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqc {

using cplx = std::complex<double>;
using Point = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm2(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dist(const Point& a, const Point& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dist: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline bool lex_less(const Point& a, const Point& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

// Order by (|x|, then lexicographic): the scan order for witness searches and
// cluster bookkeeping. Deterministic for any fixed input set.
inline bool radial_lex_less(const Point& a, const Point& b) {
  const double na = norm2(a), nb = norm2(b);
  if (na < nb) return true;
  if (na > nb) return false;
  return lex_less(a, b);
}

struct Ball {
  Point center;
  double radius = 0.0;  // open ball of this radius
};

// Finite union of open balls with a declared growth schedule: radii are
// nondecreasing in the listed order, and the ratio radius/|center| must be
// nonincreasing from `schedule_start` on (centers at the origin count as an
// infinite ratio). Pass schedule_start == balls.size() to skip the ratio check
// for plain unrestricted unions.
class BallUnion {
 public:
  BallUnion() = default;

  explicit BallUnion(std::vector<Ball> balls, std::size_t schedule_start = 0)
      : balls_(std::move(balls)), schedule_start_(schedule_start) {
    for (std::size_t k = 0; k < balls_.size(); ++k) {
      if (!(balls_[k].radius > 0.0))
        throw std::invalid_argument("BallUnion: radius must be positive");
      if (balls_[k].center.size() != balls_[0].center.size())
        throw std::invalid_argument("BallUnion: mixed dimensions");
      if (k > 0 && balls_[k].radius < balls_[k - 1].radius)
        throw std::invalid_argument("BallUnion: radii must be nondecreasing");
    }
    double prev_ratio = kInf;
    for (std::size_t k = schedule_start_; k < balls_.size(); ++k) {
      const double c = norm2(balls_[k].center);
      const double ratio = (c == 0.0) ? kInf : balls_[k].radius / c;
      if (ratio > prev_ratio)
        throw std::invalid_argument(
            "BallUnion: radius/|center| must be nonincreasing beyond the "
            "schedule start index");
      prev_ratio = ratio;
    }
  }

  const std::vector<Ball>& balls() const { return balls_; }
  std::size_t schedule_start() const { return schedule_start_; }
  bool empty() const { return balls_.empty(); }
  std::size_t dim() const {
    return balls_.empty() ? 0 : balls_[0].center.size();
  }

  // Strict open-ball membership in the union.
  bool contains(const Point& x) const {
    for (const Ball& b : balls_)
      if (dist(x, b.center) < b.radius) return true;
    return false;
  }

  // True iff the open ball B(c, r) fits inside one of the member balls;
  // reports the first (smallest-index) member that works.
  bool contains_ball(const Point& c, double r, std::size_t* which = nullptr) const {
    for (std::size_t k = 0; k < balls_.size(); ++k) {
      if (dist(c, balls_[k].center) <= balls_[k].radius - r) {
        if (which) *which = k;
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<Ball> balls_;
  std::size_t schedule_start_ = 0;
};

}  // namespace fqc
