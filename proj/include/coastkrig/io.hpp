#ifndef COASTKRIG_IO_HPP
#define COASTKRIG_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coastkrig/assessment.hpp"
#include "coastkrig/dataset.hpp"
#include "coastkrig/inference.hpp"
#include "coastkrig/kriging.hpp"

namespace coastkrig {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* bytes, std::size_t len);
std::uint64_t polyline_hash(const Polyline& poly);
std::string hash_hex(std::uint64_t h);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each sized like header
  std::map<std::string, std::string> metadata;  // leading "# key: value" lines
};

/// Strict comma-separated reader: one header row, consistent column count,
/// errors carry the 1-based line number.
CsvTable read_csv(const std::string& path);

/// Coastline vertices, either geographic (lon,lat) or planar (x,y).
struct CoastlineFile {
  bool geographic = false;
  std::vector<GeoPoint> geo;
  std::vector<PlanePoint> plane;  // filled for planar input
};

CoastlineFile read_coastline(const std::string& path);

/// Observation table: lon,lat,y[,covariate...] or x,y,value[,...]; an
/// optional "group" column carries string labels.
struct ObservationFile {
  bool geographic = false;
  std::vector<GeoPoint> geo;
  std::vector<PlanePoint> plane;
  Eigen::VectorXd y;
  Eigen::MatrixXd covariates;  // n x c, possibly 0 columns
  std::vector<std::string> covariate_names;
  std::vector<std::string> group;  // empty when absent
};

ObservationFile read_observations(const std::string& path);

void write_file(const std::string& path, const std::string& content);

/// Draws CSV: "# key: value" metadata lines, then
/// beta_0..beta_{p-1},sigma2,tau2,phi rows.
void write_draws_csv(const std::string& path, const PosteriorDraws& draws,
                     const std::map<std::string, std::string>& metadata);
PosteriorDraws read_draws_csv(const std::string& path,
                              std::map<std::string, std::string>* metadata_out);

/// Prediction CSV: t0,x,y,mean,sd,q025,q500,q975.
std::string predictions_to_csv(const std::vector<PredictionResult>& results,
                               const std::map<std::string, std::string>& metadata);

std::string summary_to_csv(const std::vector<ParamSummary>& summaries);

}  // namespace coastkrig

#endif
