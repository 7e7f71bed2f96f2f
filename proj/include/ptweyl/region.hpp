#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "trig_poly.hpp"

namespace ptweyl {

struct Disc {
  cplx center;
  double radius = 0.0;
};

struct Rect {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

// {r e^{i theta} : theta1 <= theta <= theta2, 0 <= r <= lambda g(theta)}.
// g is a real trigonometric polynomial in theta; the origin is inside.
struct Sector {
  double theta1 = 0.0;
  double theta2 = 2.0 * std::numbers::pi;
  TrigPoly g = TrigPoly::constant(1.0);
  double lambda = 1.0;

  double g_at(double theta) const { return g(theta).real(); }
  bool g_constant() const { return g.effective_bandwidth() == 0; }
  bool full_turn() const { return theta2 - theta1 >= 2.0 * std::numbers::pi - 1e-12; }
};

namespace detail {

inline double segment_distance(cplx z, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

inline double angle_in_0_2pi(cplx z) {
  double th = std::atan2(z.imag(), z.real());
  if (th < 0.0) th += 2.0 * std::numbers::pi;
  return th;
}

inline bool angle_in(double th, double lo, double hi) {
  return (th >= lo && th <= hi) || (th + 2.0 * std::numbers::pi >= lo && th + 2.0 * std::numbers::pi <= hi);
}

}  // namespace detail

class Region {
public:
  using Shape = std::variant<Disc, Rect, Sector>;

  Region(Disc d) : shape_(d) { validate(); }
  Region(Rect r) : shape_(r) { validate(); }
  Region(Sector s) : shape_(std::move(s)) { validate(); }

  const Shape& shape() const { return shape_; }

  std::string kind() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) return "disc";
          else if constexpr (std::is_same_v<T, Rect>) return "rect";
          else return "sector";
        },
        shape_);
  }

  bool contains(cplx z) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return std::abs(z - s.center) <= s.radius;
          } else if constexpr (std::is_same_v<T, Rect>) {
            return z.real() >= s.re_lo && z.real() <= s.re_hi && z.imag() >= s.im_lo &&
                   z.imag() <= s.im_hi;
          } else {
            const double r = std::abs(z);
            if (r == 0.0) return true;
            const double th = detail::angle_in_0_2pi(z);
            if (!detail::angle_in(th, s.theta1, s.theta2)) return false;
            return r <= s.lambda * s.g_at(th);
          }
        },
        shape_);
  }

  // Distance to the boundary; exact for discs and rectangles, polyline
  // approximation of the outer arc for sectors with non-constant g.
  double boundary_distance(cplx z) const {
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return std::abs(std::abs(z - s.center) - s.radius);
          } else if constexpr (std::is_same_v<T, Rect>) {
            const cplx c[4] = {{s.re_lo, s.im_lo}, {s.re_hi, s.im_lo}, {s.re_hi, s.im_hi}, {s.re_lo, s.im_hi}};
            double d = INFINITY;
            for (int i = 0; i < 4; ++i) d = std::min(d, detail::segment_distance(z, c[i], c[(i + 1) % 4]));
            return d;
          } else {
            return sector_boundary_distance(s, z);
          }
        },
        shape_);
  }

  double signed_distance(cplx z) const {
    const double d = boundary_distance(z);
    return contains(z) ? -d : d;
  }

  // Reflection in the real axis.
  Region conjugate() const {
    return std::visit(
        [](const auto& s) -> Region {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return Disc{std::conj(s.center), s.radius};
          } else if constexpr (std::is_same_v<T, Rect>) {
            return Rect{s.re_lo, s.re_hi, -s.im_hi, -s.im_lo};
          } else {
            Sector c = s;
            c.theta1 = 2.0 * std::numbers::pi - s.theta2;
            c.theta2 = 2.0 * std::numbers::pi - s.theta1;
            TrigPoly g;
            for (const auto& [k, v] : s.g.terms()) g.set(-k, v);
            c.g = g;
            return c;
          }
        },
        shape_);
  }

  // Largest modulus of a point in the region.
  double outer_radius() const {
    return std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            return std::abs(s.center) + s.radius;
          } else if constexpr (std::is_same_v<T, Rect>) {
            return std::max({std::abs(cplx{s.re_lo, s.im_lo}), std::abs(cplx{s.re_hi, s.im_lo}),
                             std::abs(cplx{s.re_hi, s.im_hi}), std::abs(cplx{s.re_lo, s.im_hi})});
          } else {
            double gmax = 0.0;
            for (int i = 0; i <= 512; ++i)
              gmax = std::max(gmax, s.g_at(s.theta1 + (s.theta2 - s.theta1) * i / 512.0));
            return s.lambda * gmax;
          }
        },
        shape_);
  }

  // Same sector shape with a new scale; throws for other shapes.
  Region with_lambda(double lambda) const {
    const auto* s = std::get_if<Sector>(&shape_);
    if (!s) throw ValidationError("region: with_lambda applies to sectors only");
    Sector c = *s;
    c.lambda = lambda;
    return c;
  }

private:
  void validate() const {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disc>) {
            if (!(s.radius >= 0.0)) throw ValidationError("region: disc radius must be non-negative");
          } else if constexpr (std::is_same_v<T, Rect>) {
            if (!(s.re_lo <= s.re_hi && s.im_lo <= s.im_hi))
              throw ValidationError("region: rectangle bounds must satisfy lo <= hi");
          } else {
            if (!(0.0 <= s.theta1 && s.theta1 <= s.theta2 && s.theta2 <= 2.0 * std::numbers::pi + 1e-12))
              throw ValidationError("region: sector requires 0 <= theta1 <= theta2 <= 2pi");
            if (!(s.lambda >= 0.0)) throw ValidationError("region: sector lambda must be non-negative");
            if (!s.g.is_real(1e-12)) throw ValidationError("region: sector g must be real-valued");
            for (int i = 0; i <= 512; ++i)
              if (!(s.g_at(s.theta1 + (s.theta2 - s.theta1) * i / 512.0) > 0.0))
                throw ValidationError("region: sector g must be positive on [theta1, theta2]");
          }
        },
        shape_);
  }

  static double sector_boundary_distance(const Sector& s, cplx z) {
    double d = INFINITY;
    if (!s.full_turn()) {
      d = std::min(d, detail::segment_distance(z, 0.0, std::polar(s.lambda * s.g_at(s.theta1), s.theta1)));
      d = std::min(d, detail::segment_distance(z, 0.0, std::polar(s.lambda * s.g_at(s.theta2), s.theta2)));
    }
    if (s.g_constant()) {
      const double rad = s.lambda * s.g_at(s.theta1);
      const double th = detail::angle_in_0_2pi(z);
      if (detail::angle_in(th, s.theta1, s.theta2) || s.full_turn()) {
        d = std::min(d, std::abs(std::abs(z) - rad));
      } else {
        d = std::min({d, std::abs(z - std::polar(rad, s.theta1)), std::abs(z - std::polar(rad, s.theta2))});
      }
      return d;
    }
    constexpr int kArcSegments = 512;
    cplx prev = std::polar(s.lambda * s.g_at(s.theta1), s.theta1);
    for (int i = 1; i <= kArcSegments; ++i) {
      const double th = s.theta1 + (s.theta2 - s.theta1) * i / kArcSegments;
      const cplx cur = std::polar(s.lambda * s.g_at(th), th);
      d = std::min(d, detail::segment_distance(z, prev, cur));
      prev = cur;
    }
    return d;
  }

  Shape shape_;
};

}  // namespace ptweyl
