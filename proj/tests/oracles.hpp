#pragma once

// Brute-force references the tests compare the library against. They share no
// code with the library beyond the geometry types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "pickbench/arm.hpp"
#include "pickbench/gripper.hpp"

namespace oracle {

using pickbench::FingerLinkage;
using pickbench::Vec2;

// Root of f between a and b (f(a), f(b) of opposite sign) by bisection.
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Every sign change of f on [lo, hi] sampled at `step`, refined by bisection.
template <class F>
std::vector<double> roots(F f, double lo, double hi, double step) {
  std::vector<double> out;
  double x0 = lo;
  double f0 = f(x0);
  for (double x1 = lo + step; x1 <= hi + 0.5 * step; x1 += step) {
    const double f1 = f(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) out.push_back(bisect(f, x0, x1));
    x0 = x1;
    f0 = f1;
  }
  return out;
}

inline Vec2 crank_end(const FingerLinkage& l, double theta) {
  return Vec2(0.0, l.ground_length) + l.crank_length * Vec2(std::cos(theta), std::sin(theta));
}

// Crank angle of the straight finger: of the two assemblies with the rocker
// along +x, the one whose crank end lies farther from the rocker pivot.
inline std::optional<double> straight_crank_angle(const FingerLinkage& l) {
  const Vec2 b(l.rocker_length, 0.0);
  auto f = [&](double th) { return (crank_end(l, th) - b).norm() - l.coupler_length; };
  const auto r = roots(f, -std::numbers::pi, std::numbers::pi, 1e-4);
  if (r.empty()) return std::nullopt;
  return *std::max_element(r.begin(), r.end(), [&](double a, double c) {
    return crank_end(l, a).norm() < crank_end(l, c).norm();
  });
}

// Rocker angle at each requested flexion, following the assembly branch
// continuously from the straight configuration (rocker angle 0).
inline std::vector<std::optional<double>> rocker_angles(const FingerLinkage& l,
                                                        std::vector<double> flexions) {
  std::vector<std::optional<double>> out(flexions.size());
  const auto theta0 = straight_crank_angle(l);
  if (!theta0) return out;
  std::vector<std::size_t> order(flexions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return flexions[a] < flexions[b]; });

  auto solve_near = [&](double flex, double prev) -> std::optional<double> {
    const Vec2 a = crank_end(l, *theta0 + flex);
    auto g = [&](double phi) {
      return (a - l.rocker_length * Vec2(std::cos(phi), std::sin(phi))).norm() - l.coupler_length;
    };
    const auto r = roots(g, prev - 0.15, prev + 0.15, 2e-4);
    if (r.empty()) return std::nullopt;
    return *std::min_element(r.begin(), r.end(), [&](double x, double y) {
      return std::abs(x - prev) < std::abs(y - prev);
    });
  };
  // Walk upwards from zero flexion, then downwards.
  for (int dir : {1, -1}) {
    double flex = 0.0;
    std::optional<double> phi = 0.0;
    const std::size_t n = order.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = dir > 0 ? order[k] : order[n - 1 - k];
      const double target = flexions[idx];
      if ((dir > 0) != (target >= 0.0)) continue;
      while (phi && std::abs(target - flex) > 1e-12) {
        const double next = std::abs(target - flex) > 0.005 ? flex + dir * 0.005 : target;
        phi = solve_near(next, *phi);
        flex = next;
      }
      out[idx] = phi;
    }
  }
  return out;
}

inline Vec2 tip(const FingerLinkage& l, double rocker_angle) {
  return l.finger_length() * Vec2(std::cos(rocker_angle), std::sin(rocker_angle));
}

// Largest radius of a circle about the origin that keeps every point outside,
// by scanning the radius; zero when any point sits on the wrong side of the
// axis relative to its outward direction.
inline double free_circle_radius(const std::vector<Vec2>& pts, const std::vector<Vec2>& outward,
                                 double step) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].dot(outward[i]) <= 0.0) return 0.0;
  }
  double r = 0.0;
  auto clear = [&](double rad) {
    return std::all_of(pts.begin(), pts.end(), [&](const Vec2& p) { return p.norm() >= rad; });
  };
  while (clear(r + step)) r += step;
  return r;
}

// Midpoint of the shortest rotation from a to b, built from the axis-angle form.
inline pickbench::Quat axis_angle_midpoint(const pickbench::Quat& a, pickbench::Quat b) {
  if (a.dot(b) < 0.0) b.coeffs() = -b.coeffs();
  const Eigen::AngleAxisd rel(a.conjugate() * b);
  return a * pickbench::Quat(Eigen::AngleAxisd(0.5 * rel.angle(), rel.axis()));
}

inline double angle_between(const pickbench::Quat& a, const pickbench::Quat& b) {
  const pickbench::Quat d = a.normalized().conjugate() * b.normalized();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

}  // namespace oracle
