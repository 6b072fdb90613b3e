#ifndef COASTKRIG_GEOMETRY_HPP
#define COASTKRIG_GEOMETRY_HPP

#include <Eigen/Core>
#include <utility>
#include <variant>
#include <vector>

namespace coastkrig {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

struct GeoPoint {
  double lon = 0.0;  // degrees, [-180, 180]
  double lat = 0.0;  // degrees, [-90, 90]
};

/// Straight chord length between two plane points.
double segment_length(const PlanePoint& p, const PlanePoint& q);

/// Curve families with a 1-D parameter lambda. For the line segment the
/// parameter is arc length itself; for circle and ellipse it is the angle.
struct LineSegment {
  PlanePoint origin;
  double dir_x = 1.0, dir_y = 0.0;  // unit direction
  double t_min = 0.0, t_max = 1.0;
};

struct CircleArc {
  double radius = 1.0;
  double lambda_min = 0.0, lambda_max = 1.0;
};

struct EllipseArc {
  double semi_a = 1.0, semi_b = 1.0;  // (a cos l, b sin l)
  double lambda_min = 0.0, lambda_max = 1.0;
};

using ParametricCurve = std::variant<LineSegment, CircleArc, EllipseArc>;

/// Checks the invariants (unit direction, positive radius/semi-axes,
/// nonempty parameter domain) and throws std::invalid_argument otherwise.
void validate_curve(const ParametricCurve& curve);

std::pair<double, double> curve_domain(const ParametricCurve& curve);

PlanePoint curve_point(const ParametricCurve& curve, double lambda);

/// Arc length between two parameter values. Closed form for line and
/// circle; adaptive Gauss-Kronrod quadrature (abs tol 1e-10) for the
/// ellipse. Requires lambda0 <= lambda1, both inside the curve domain.
double arc_length(const ParametricCurve& curve, double lambda0, double lambda1);

/// Piecewise-linear curve with a cumulative arc-length parameter.
/// Consecutive duplicate vertices are dropped (with a warning on stderr)
/// so that cumlen is strictly increasing.
class Polyline {
 public:
  explicit Polyline(std::vector<PlanePoint> vertices);

  const std::vector<PlanePoint>& vertices() const { return vertices_; }
  const std::vector<double>& cumlen() const { return cumlen_; }
  double total_length() const { return cumlen_.back(); }

  /// Point at arc-length parameter t, clamped to [0, total_length].
  PlanePoint point_at(double t) const;

  struct Projection {
    double t = 0.0;      // arc-length parameter of the closest point
    PlanePoint foot;     // closest point on the polyline
    double dist = 0.0;   // offset from the polyline
  };

  /// Closest point on the polyline; ties broken by smallest t. Points
  /// beyond the ends project onto the nearest endpoint.
  Projection project(const PlanePoint& p) const;

 private:
  std::vector<PlanePoint> vertices_;
  std::vector<double> cumlen_;
};

/// Equirectangular projection to kilometres: x = R lon cos(ref_lat),
/// y = R lat (angles in radians, R = 6371 km). Intended for small regions.
std::vector<PlanePoint> geo_to_plane(const std::vector<GeoPoint>& points, double ref_lat_deg);

/// Same, with the reference latitude taken as the mean latitude.
std::vector<PlanePoint> geo_to_plane(const std::vector<GeoPoint>& points);

/// D[i][j] = |t_i - t_j|.
Eigen::MatrixXd pairwise_curve_distance(const Eigen::VectorXd& t);

}  // namespace coastkrig

#endif
