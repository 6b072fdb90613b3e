#include "coastkrig/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coastkrig {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                ": cannot parse number '" + s + "'");
  return v;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::uint64_t fnv1a(const void* bytes, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t polyline_hash(const Polyline& poly) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& v : poly.vertices()) {
    double xy[2] = {v.x, v.y};
    unsigned char raw[sizeof xy];
    std::memcpy(raw, xy, sizeof xy);
    for (unsigned char c : raw) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::size_t colon = t.find(':');
      if (colon != std::string::npos && !have_header) {
        std::string key = trim(t.substr(1, colon - 1));
        std::string value = trim(t.substr(colon + 1));
        table.metadata[key] = value;
      }
      continue;
    }
    std::vector<std::string> fields = split_csv_line(t);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::invalid_argument(path + ": missing header row");
  return table;
}

CoastlineFile read_coastline(const std::string& path) {
  CsvTable t = read_csv(path);
  CoastlineFile out;
  int lon = find_column(t.header, "lon"), lat = find_column(t.header, "lat");
  int x = find_column(t.header, "x"), y = find_column(t.header, "y");
  if (lon >= 0 && lat >= 0) {
    out.geographic = true;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out.geo.push_back({parse_double(t.rows[r][static_cast<std::size_t>(lon)], path, r + 2),
                         parse_double(t.rows[r][static_cast<std::size_t>(lat)], path, r + 2)});
    }
  } else if (x >= 0 && y >= 0) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out.plane.push_back({parse_double(t.rows[r][static_cast<std::size_t>(x)], path, r + 2),
                           parse_double(t.rows[r][static_cast<std::size_t>(y)], path, r + 2)});
    }
  } else {
    throw std::invalid_argument(path + ": coastline header must contain lon,lat or x,y");
  }
  return out;
}

ObservationFile read_observations(const std::string& path) {
  CsvTable t = read_csv(path);
  ObservationFile out;
  int c_lon = find_column(t.header, "lon"), c_lat = find_column(t.header, "lat");
  int c_x = find_column(t.header, "x"), c_y = find_column(t.header, "y");
  int c_resp;
  std::vector<int> coord_cols;
  if (c_lon >= 0 && c_lat >= 0) {
    out.geographic = true;
    c_resp = find_column(t.header, "y");
    if (c_resp < 0) throw std::invalid_argument(path + ": missing response column 'y'");
    coord_cols = {c_lon, c_lat};
  } else if (c_x >= 0 && c_y >= 0) {
    c_resp = find_column(t.header, "value");
    if (c_resp < 0) throw std::invalid_argument(path + ": missing response column 'value'");
    coord_cols = {c_x, c_y};
  } else {
    throw std::invalid_argument(path + ": observation header must contain lon,lat or x,y");
  }
  int c_group = find_column(t.header, "group");

  std::vector<int> cov_cols;
  for (int c = 0; c < static_cast<int>(t.header.size()); ++c) {
    if (c == c_resp || c == c_group) continue;
    if (std::find(coord_cols.begin(), coord_cols.end(), c) != coord_cols.end()) continue;
    cov_cols.push_back(c);
    out.covariate_names.push_back(t.header[static_cast<std::size_t>(c)]);
  }

  const std::size_t n = t.rows.size();
  if (n == 0) throw std::invalid_argument(path + ": no observation rows");
  out.y.resize(static_cast<Eigen::Index>(n));
  out.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cov_cols.size()));
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t line_no = r + 2;
    if (out.geographic) {
      out.geo.push_back({parse_double(t.rows[r][static_cast<std::size_t>(c_lon)], path, line_no),
                         parse_double(t.rows[r][static_cast<std::size_t>(c_lat)], path, line_no)});
    } else {
      out.plane.push_back({parse_double(t.rows[r][static_cast<std::size_t>(c_x)], path, line_no),
                           parse_double(t.rows[r][static_cast<std::size_t>(c_y)], path, line_no)});
    }
    out.y[static_cast<Eigen::Index>(r)] =
        parse_double(t.rows[r][static_cast<std::size_t>(c_resp)], path, line_no);
    for (std::size_t c = 0; c < cov_cols.size(); ++c)
      out.covariates(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(t.rows[r][static_cast<std::size_t>(cov_cols[c])], path, line_no);
    if (c_group >= 0) out.group.push_back(t.rows[r][static_cast<std::size_t>(c_group)]);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot write file: " + path);
  outf << content;
  if (!outf) throw std::runtime_error("write failed: " + path);
}

void write_draws_csv(const std::string& path, const PosteriorDraws& draws,
                     const std::map<std::string, std::string>& metadata) {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + ": " + v + "\n";
  const Eigen::Index p = draws.p();
  for (Eigen::Index c = 0; c < p; ++c) {
    out += "beta_" + std::to_string(c);
    out += ",";
  }
  out += "sigma2,tau2,phi\n";
  for (Eigen::Index j = 0; j < draws.size(); ++j) {
    for (Eigen::Index c = 0; c < p; ++c) {
      out += format_double(draws.beta(j, c));
      out += ",";
    }
    out += format_double(draws.sigma2[j]);
    out += ",";
    out += format_double(draws.tau2[j]);
    out += ",";
    out += format_double(draws.phi[j]);
    out += "\n";
  }
  write_file(path, out);
}

PosteriorDraws read_draws_csv(const std::string& path,
                              std::map<std::string, std::string>* metadata_out) {
  CsvTable t = read_csv(path);
  if (metadata_out) *metadata_out = t.metadata;
  Eigen::Index p = 0;
  while (find_column(t.header, "beta_" + std::to_string(p)) >= 0) ++p;
  int c_s = find_column(t.header, "sigma2");
  int c_t = find_column(t.header, "tau2");
  int c_p = find_column(t.header, "phi");
  if (p == 0 || c_s < 0 || c_t < 0 || c_p < 0)
    throw std::invalid_argument(path + ": not a draws file (need beta_0..,sigma2,tau2,phi)");
  const Eigen::Index M = static_cast<Eigen::Index>(t.rows.size());
  if (M == 0) throw std::invalid_argument(path + ": draws file has no rows");
  PosteriorDraws draws;
  draws.beta.resize(M, p);
  draws.sigma2.resize(M);
  draws.tau2.resize(M);
  draws.phi.resize(M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const auto& row = t.rows[static_cast<std::size_t>(j)];
    std::size_t line_no = static_cast<std::size_t>(j) + 2 + t.metadata.size();
    for (Eigen::Index c = 0; c < p; ++c) {
      int col = find_column(t.header, "beta_" + std::to_string(c));
      draws.beta(j, c) = parse_double(row[static_cast<std::size_t>(col)], path, line_no);
    }
    draws.sigma2[j] = parse_double(row[static_cast<std::size_t>(c_s)], path, line_no);
    draws.tau2[j] = parse_double(row[static_cast<std::size_t>(c_t)], path, line_no);
    draws.phi[j] = parse_double(row[static_cast<std::size_t>(c_p)], path, line_no);
  }
  auto it = t.metadata.find("model");
  if (it != t.metadata.end()) draws.model = it->second;
  it = t.metadata.find("distance_mode");
  if (it != t.metadata.end()) draws.mode = distance_mode_from_string(it->second);
  return draws;
}

std::string predictions_to_csv(const std::vector<PredictionResult>& results,
                               const std::map<std::string, std::string>& metadata) {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + ": " + v + "\n";
  out += "t0,x,y,mean,sd,q025,q500,q975\n";
  for (const auto& r : results) {
    out += format_double(r.t0) + "," + format_double(r.point.x) + "," + format_double(r.point.y) +
           "," + format_double(r.mean) + "," + format_double(r.sd) + "," + format_double(r.q025) +
           "," + format_double(r.q500) + "," + format_double(r.q975) + "\n";
  }
  return out;
}

std::string summary_to_csv(const std::vector<ParamSummary>& summaries) {
  std::string out = "param,median,q025,q975\n";
  for (const auto& s : summaries)
    out += s.name + "," + format_double(s.median) + "," + format_double(s.q025) + "," +
           format_double(s.q975) + "\n";
  return out;
}

}  // namespace coastkrig
