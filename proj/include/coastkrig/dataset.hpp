#ifndef COASTKRIG_DATASET_HPP
#define COASTKRIG_DATASET_HPP

#include <Eigen/Core>
#include <vector>

#include "coastkrig/covariance.hpp"
#include "coastkrig/geometry.hpp"

namespace coastkrig {

/// What the design matrix columns mean; prediction at new curve points can
/// rebuild covariates only for the first two kinds.
enum class DesignKind { intercept_only, intercept_coords, custom };

const char* to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& s);

/// Observations along a curve: parameter t, plane coordinates, design row,
/// and response. Immutable by convention once assembled.
struct Dataset {
  Eigen::VectorXd t;               // curve parameter per observation
  std::vector<PlanePoint> coords;  // plane coordinates per observation
  Eigen::MatrixXd X;               // n x p design matrix
  Eigen::VectorXd y;               // response
  DesignKind design = DesignKind::intercept_only;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const;
  Dataset subset(const std::vector<int>& idx) const;
};

/// Intercept-only design helper.
Eigen::MatrixXd ones_design(Eigen::Index n);

/// [1, x, y] coordinate-trend design.
Eigen::MatrixXd coords_design(const std::vector<PlanePoint>& pts);

Eigen::MatrixXd distance_matrix(const Dataset& data, DistanceMode mode);

/// Distances from one new location to every observation.
Eigen::VectorXd cross_distances(const Dataset& data, DistanceMode mode, double t0,
                                const PlanePoint& p0);

}  // namespace coastkrig

#endif
