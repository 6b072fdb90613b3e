#include "coastkrig/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coastkrig/kernels.hpp"

namespace coastkrig {

const char* to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::intercept_only: return "intercept";
    case DesignKind::intercept_coords: return "intercept_coords";
    default: return "custom";
  }
}

DesignKind design_kind_from_string(const std::string& s) {
  if (s == "intercept") return DesignKind::intercept_only;
  if (s == "intercept_coords") return DesignKind::intercept_coords;
  if (s == "custom") return DesignKind::custom;
  throw std::invalid_argument("unknown design kind: " + s);
}

void Dataset::validate() const {
  const Eigen::Index nn = y.size();
  if (nn == 0) throw std::invalid_argument("dataset: empty response");
  if (t.size() != nn || static_cast<Eigen::Index>(coords.size()) != nn || X.rows() != nn)
    throw std::invalid_argument("dataset: field lengths disagree");
  if (!y.allFinite() || !t.allFinite() || !X.allFinite())
    throw std::invalid_argument("dataset: non-finite values");
}

Dataset Dataset::subset(const std::vector<int>& idx) const {
  Dataset out;
  const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
  out.t.resize(m);
  out.y.resize(m);
  out.X.resize(m, X.cols());
  out.coords.resize(idx.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    int i = idx[static_cast<std::size_t>(k)];
    out.t[k] = t[i];
    out.y[k] = y[i];
    out.X.row(k) = X.row(i);
    out.coords[static_cast<std::size_t>(k)] = coords[static_cast<std::size_t>(i)];
  }
  out.design = design;
  return out;
}

Eigen::MatrixXd ones_design(Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); }

Eigen::MatrixXd coords_design(const std::vector<PlanePoint>& pts) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(pts.size()), 3);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = pts[static_cast<std::size_t>(i)].x;
    X(i, 2) = pts[static_cast<std::size_t>(i)].y;
  }
  return X;
}

Eigen::MatrixXd distance_matrix(const Dataset& data, DistanceMode mode) {
  if (mode == DistanceMode::curve) return kernels::pairwise_abs_diff(data.t);
  return kernels::pairwise_euclidean(data.coords);
}

Eigen::VectorXd cross_distances(const Dataset& data, DistanceMode mode, double t0,
                                const PlanePoint& p0) {
  const Eigen::Index n = data.n();
  Eigen::VectorXd d(n);
  if (mode == DistanceMode::curve) {
    for (Eigen::Index i = 0; i < n; ++i) d[i] = std::abs(t0 - data.t[i]);
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      d[i] = segment_length(p0, data.coords[static_cast<std::size_t>(i)]);
  }
  return d;
}

}  // namespace coastkrig
