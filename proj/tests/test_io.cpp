#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "coastkrig/io.hpp"

using namespace coastkrig;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("coastkrig_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("format_double round trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 3.141592653589793, 1e-17, 1.7e300}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv parsing: header, metadata, malformed rows") {
  TempDir tmp;
  write_file(tmp.file("ok.csv"), "# note: hello\nx,y,value\n1,2,3\n4,5,6\n");
  CsvTable t = read_csv(tmp.file("ok.csv"));
  CHECK(t.header == std::vector<std::string>{"x", "y", "value"});
  CHECK(t.rows.size() == 2);
  CHECK(t.metadata.at("note") == "hello");

  write_file(tmp.file("ragged.csv"), "x,y\n1,2\n3\n");
  CHECK_THROWS_WITH_AS(read_csv(tmp.file("ragged.csv")),
                       doctest::Contains(":3"), std::invalid_argument);

  CHECK_THROWS_AS(read_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("observation files in both coordinate conventions") {
  TempDir tmp;
  write_file(tmp.file("geo.csv"),
             "lon,lat,y,depth,group\n-89.1,30.1,1.5,2.0,jetty\n-89.2,30.2,2.5,1.0,beach\n");
  ObservationFile geo = read_observations(tmp.file("geo.csv"));
  CHECK(geo.geographic);
  CHECK(geo.y.size() == 2);
  CHECK(geo.covariate_names == std::vector<std::string>{"depth"});
  CHECK(geo.group == std::vector<std::string>{"jetty", "beach"});

  write_file(tmp.file("plane.csv"), "x,y,value\n0,0,1\n1,0,2\n");
  ObservationFile plane = read_observations(tmp.file("plane.csv"));
  CHECK_FALSE(plane.geographic);
  CHECK(plane.y[1] == 2.0);
  CHECK(plane.covariates.cols() == 0);

  write_file(tmp.file("bad.csv"), "x,y,value\n0,zero,1\n");
  CHECK_THROWS_WITH_AS(read_observations(tmp.file("bad.csv")),
                       doctest::Contains(":2"), std::invalid_argument);

  write_file(tmp.file("noresp.csv"), "x,y\n0,0\n");
  CHECK_THROWS_AS(read_observations(tmp.file("noresp.csv")), std::invalid_argument);
}

TEST_CASE("coastline files") {
  TempDir tmp;
  write_file(tmp.file("coast.csv"), "x,y\n0,0\n1,0\n2,1\n");
  CoastlineFile coast = read_coastline(tmp.file("coast.csv"));
  CHECK_FALSE(coast.geographic);
  CHECK(coast.plane.size() == 3);

  write_file(tmp.file("badcoast.csv"), "a,b\n0,0\n");
  CHECK_THROWS_AS(read_coastline(tmp.file("badcoast.csv")), std::invalid_argument);
}

TEST_CASE("draws round trip with metadata") {
  TempDir tmp;
  PosteriorDraws draws;
  draws.beta = Eigen::MatrixXd(3, 2);
  draws.beta << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;
  draws.sigma2 = Eigen::VectorXd(3);
  draws.sigma2 << 1.0, 1.1, 0.9;
  draws.tau2 = Eigen::VectorXd(3);
  draws.tau2 << 0.1, 0.2, 0.15;
  draws.phi = Eigen::VectorXd(3);
  draws.phi << 2.0, 2.5, 1.5;
  draws.mode = DistanceMode::euclidean;

  std::map<std::string, std::string> meta{{"model", "uk"},
                                          {"distance_mode", "euclidean"},
                                          {"transform", "log"}};
  write_draws_csv(tmp.file("draws.csv"), draws, meta);

  std::map<std::string, std::string> meta2;
  PosteriorDraws back = read_draws_csv(tmp.file("draws.csv"), &meta2);
  CHECK(back.beta == draws.beta);
  CHECK(back.sigma2 == draws.sigma2);
  CHECK(back.tau2 == draws.tau2);
  CHECK(back.phi == draws.phi);
  CHECK(back.mode == DistanceMode::euclidean);
  CHECK(back.model == "uk");
  CHECK(meta2.at("transform") == "log");
}

TEST_CASE("prediction csv layout") {
  std::vector<PredictionResult> res(1);
  res[0] = {1.5, {0.5, 0.25}, 2.0, 0.3, 1.4, 2.0, 2.6};
  std::string csv = predictions_to_csv(res, {{"scale", "log"}});
  CHECK(csv.find("# scale: log\n") == 0);
  CHECK(csv.find("t0,x,y,mean,sd,q025,q500,q975\n") != std::string::npos);
  CHECK(csv.find("1.5,0.5,0.25,2,0.3,1.4,2,2.6\n") != std::string::npos);
}

TEST_CASE("polyline hash distinguishes geometries") {
  Polyline a({{0, 0}, {1, 0}});
  Polyline b({{0, 0}, {1, 1e-12}});
  CHECK(polyline_hash(a) != polyline_hash(b));
  CHECK(polyline_hash(a) == polyline_hash(Polyline({{0, 0}, {1, 0}})));
  CHECK(hash_hex(polyline_hash(a)).size() == 16);
}
