#include "coastkrig/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "coastkrig/kernels.hpp"

namespace coastkrig {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = M_PI / 180.0;

void check_finite(const PlanePoint& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw std::invalid_argument("plane point has non-finite coordinates");
}

}  // namespace

double segment_length(const PlanePoint& p, const PlanePoint& q) {
  return std::hypot(q.x - p.x, q.y - p.y);
}

void validate_curve(const ParametricCurve& curve) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          double norm = std::hypot(c.dir_x, c.dir_y);
          if (std::abs(norm - 1.0) > 1e-12)
            throw std::invalid_argument("line segment direction must be a unit vector");
          if (!(c.t_max > c.t_min))
            throw std::invalid_argument("line segment needs t_max > t_min");
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          if (!(c.radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
          if (!(c.lambda_max > c.lambda_min))
            throw std::invalid_argument("circle arc needs lambda_max > lambda_min");
        } else {
          if (!(c.semi_a > 0.0) || !(c.semi_b > 0.0))
            throw std::invalid_argument("ellipse semi-axes must be positive");
          if (!(c.lambda_max > c.lambda_min))
            throw std::invalid_argument("ellipse arc needs lambda_max > lambda_min");
        }
      },
      curve);
}

std::pair<double, double> curve_domain(const ParametricCurve& curve) {
  return std::visit(
      [](const auto& c) -> std::pair<double, double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LineSegment>) return {c.t_min, c.t_max};
        else return {c.lambda_min, c.lambda_max};
      },
      curve);
}

PlanePoint curve_point(const ParametricCurve& curve, double lambda) {
  return std::visit(
      [lambda](const auto& c) -> PlanePoint {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return {c.origin.x + lambda * c.dir_x, c.origin.y + lambda * c.dir_y};
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          return {c.radius * std::cos(lambda), c.radius * std::sin(lambda)};
        } else {
          return {c.semi_a * std::cos(lambda), c.semi_b * std::sin(lambda)};
        }
      },
      curve);
}

double arc_length(const ParametricCurve& curve, double lambda0, double lambda1) {
  auto [lo, hi] = curve_domain(curve);
  if (lambda0 < lo - 1e-12 || lambda1 > hi + 1e-12)
    throw std::invalid_argument("arc_length: parameter outside curve domain");
  if (lambda0 > lambda1) throw std::invalid_argument("arc_length: lambda0 must be <= lambda1");
  if (lambda0 == lambda1) return 0.0;
  return std::visit(
      [lambda0, lambda1](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return lambda1 - lambda0;
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          return c.radius * (lambda1 - lambda0);
        } else {
          const double a2 = c.semi_a * c.semi_a;
          const double b2 = c.semi_b * c.semi_b;
          auto speed = [a2, b2](double l) {
            double s = std::sin(l), co = std::cos(l);
            return std::sqrt(a2 * s * s + b2 * co * co);
          };
          // Relative target well below the 1e-10 absolute tolerance for
          // perimeters of order one.
          return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
              speed, lambda0, lambda1, 15, 1e-13);
        }
      },
      curve);
}

Polyline::Polyline(std::vector<PlanePoint> vertices) {
  if (vertices.size() < 2) throw std::invalid_argument("polyline needs at least 2 vertices");
  std::size_t dropped = 0;
  for (const auto& v : vertices) {
    check_finite(v);
    if (!vertices_.empty() && segment_length(vertices_.back(), v) == 0.0) {
      ++dropped;
      continue;
    }
    vertices_.push_back(v);
  }
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped << " duplicate polyline vertex(es)\n";
  if (vertices_.size() < 2)
    throw std::invalid_argument("polyline degenerate after dropping duplicate vertices");
  cumlen_.resize(vertices_.size());
  cumlen_[0] = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i)
    cumlen_[i] = cumlen_[i - 1] + segment_length(vertices_[i - 1], vertices_[i]);
}

PlanePoint Polyline::point_at(double t) const {
  if (t <= 0.0) return vertices_.front();
  if (t >= total_length()) return vertices_.back();
  // cumlen_ is strictly increasing; find the segment containing t.
  auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - cumlen_.begin());  // t < cumlen_[i]
  const PlanePoint& p = vertices_[i - 1];
  const PlanePoint& q = vertices_[i];
  double seg = cumlen_[i] - cumlen_[i - 1];
  double s = (t - cumlen_[i - 1]) / seg;
  return {p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)};
}

Polyline::Projection Polyline::project(const PlanePoint& p) const {
  check_finite(p);
  Projection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const PlanePoint& a = vertices_[i - 1];
    const PlanePoint& b = vertices_[i];
    double vx = b.x - a.x, vy = b.y - a.y;
    double len2 = vx * vx + vy * vy;
    double s = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
    s = std::clamp(s, 0.0, 1.0);
    PlanePoint foot{a.x + s * vx, a.y + s * vy};
    double dx = p.x - foot.x, dy = p.y - foot.y;
    double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {  // strict: ties keep the earlier (smaller t) segment
      best_d2 = d2;
      best.t = cumlen_[i - 1] + s * std::sqrt(len2);
      best.foot = foot;
    }
  }
  best.dist = std::sqrt(best_d2);
  return best;
}

std::vector<PlanePoint> geo_to_plane(const std::vector<GeoPoint>& points, double ref_lat_deg) {
  if (std::abs(ref_lat_deg) > 90.0)
    throw std::invalid_argument("geo_to_plane: reference latitude outside [-90, 90]");
  const double cos_ref = std::cos(ref_lat_deg * kDegToRad);
  std::vector<PlanePoint> out;
  out.reserve(points.size());
  for (const auto& g : points) {
    if (!(g.lon >= -180.0 && g.lon <= 180.0) || !(g.lat >= -90.0 && g.lat <= 90.0))
      throw std::invalid_argument("geo_to_plane: lon/lat outside valid range");
    out.push_back({kEarthRadiusKm * g.lon * kDegToRad * cos_ref,
                   kEarthRadiusKm * g.lat * kDegToRad});
  }
  return out;
}

std::vector<PlanePoint> geo_to_plane(const std::vector<GeoPoint>& points) {
  if (points.empty()) return {};
  double mean_lat = 0.0;
  for (const auto& g : points) mean_lat += g.lat;
  mean_lat /= static_cast<double>(points.size());
  return geo_to_plane(points, mean_lat);
}

Eigen::MatrixXd pairwise_curve_distance(const Eigen::VectorXd& t) {
  if (!t.allFinite()) throw std::invalid_argument("pairwise_curve_distance: non-finite parameter");
  return kernels::pairwise_abs_diff(t);
}

}  // namespace coastkrig
