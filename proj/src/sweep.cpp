#include "fdbeam/sweep.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fdbeam/errors.hpp"

namespace fdbeam {

namespace {

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pair_str(double theta_tx, double theta_rx) {
  return "(" + fmt_g17(theta_tx) + ", " + fmt_g17(theta_rx) + ")";
}

void check_profile(const SpatialProfile& p, const char* name) {
  if (p.angles_deg.empty())
    throw std::invalid_argument(std::string("sweep: empty ") + name + " profile");
  for (std::size_t i = 1; i < p.angles_deg.size(); ++i)
    if (!(p.angles_deg[i] > p.angles_deg[i - 1]))
      throw std::invalid_argument(std::string("sweep: ") + name +
                                  " profile must be strictly increasing");
}

}  // namespace

SpatialProfile make_profile(double start_deg, double step_deg, double stop_deg) {
  if (!(step_deg > 0.0)) throw std::invalid_argument("profile: step must be > 0");
  if (start_deg > stop_deg)
    throw std::invalid_argument("profile: start must not exceed stop");
  const int count =
      static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
  SpatialProfile profile;
  profile.angles_deg.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) profile.angles_deg.push_back(start_deg + i * step_deg);
  return profile;
}

InrMap run_sweep(const MeasureFn& measure, const SpatialProfile& tx_profile,
                 const SpatialProfile& rx_profile) {
  check_profile(tx_profile, "tx");
  check_profile(rx_profile, "rx");
  InrMap map;
  map.tx_profile = tx_profile;
  map.rx_profile = rx_profile;
  map.values.resize(static_cast<Eigen::Index>(tx_profile.size()),
                    static_cast<Eigen::Index>(rx_profile.size()));
  for (std::size_t i = 0; i < tx_profile.size(); ++i) {
    for (std::size_t j = 0; j < rx_profile.size(); ++j) {
      const double v = measure(tx_profile[i], rx_profile[j]);
      if (!std::isfinite(v) || v < 0.0)
        throw DataError("sweep: measure returned " + fmt_g17(v) + " at " +
                        pair_str(tx_profile[i], rx_profile[j]));
      map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return map;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples_db) : sorted_(std::move(samples_db)) {
  if (sorted_.empty()) throw std::invalid_argument("cdf: no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::probability_at(double value_db) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), value_db);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (p <= 0.0) return sorted_.front();
  const auto n = static_cast<double>(sorted_.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::min(std::max<std::size_t>(rank, 1), sorted_.size());
  return sorted_[rank - 1];
}

EmpiricalCdf cdf(const InrMap& map) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(map.values.size()));
  for (Eigen::Index i = 0; i < map.values.rows(); ++i)
    for (Eigen::Index j = 0; j < map.values.cols(); ++j)
      samples.push_back(linear_to_db_floored(map.values(i, j)));
  return EmpiricalCdf(std::move(samples));
}

std::vector<std::size_t> neighborhood_indices(const SpatialProfile& profile,
                                              std::size_t center_index,
                                              double delta_deg) {
  if (center_index >= profile.size())
    throw std::invalid_argument("neighborhood: center index out of range");
  if (delta_deg < 0.0)
    throw std::invalid_argument("neighborhood: delta must be >= 0");
  const double center = profile[center_index];
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (std::abs(profile[i] - center) <= delta_deg + 1e-9) indices.push_back(i);
  return indices;
}

NeighborhoodStats stats_maps(const InrMap& map, double delta_tx_deg,
                             double delta_rx_deg, double rng_ceiling_db) {
  const Eigen::Index rows = map.values.rows();
  const Eigen::Index cols = map.values.cols();
  NeighborhoodStats stats;
  stats.delta_tx_deg = delta_tx_deg;
  stats.delta_rx_deg = delta_rx_deg;
  stats.inr_min.resize(rows, cols);
  stats.inr_rng_db.resize(rows, cols);
  stats.rng_undefined = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      rows, cols, false);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto tx_nbr =
        neighborhood_indices(map.tx_profile, static_cast<std::size_t>(i), delta_tx_deg);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto rx_nbr = neighborhood_indices(map.rx_profile,
                                               static_cast<std::size_t>(j), delta_rx_deg);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t a : tx_nbr) {
        for (std::size_t b : rx_nbr) {
          const double v = map.values(static_cast<Eigen::Index>(a),
                                      static_cast<Eigen::Index>(b));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      stats.inr_min(i, j) = lo;
      if (lo <= 0.0) {
        stats.inr_rng_db(i, j) = rng_ceiling_db;
        stats.rng_undefined(i, j) = true;
      } else {
        stats.inr_rng_db(i, j) = linear_to_db(hi / lo);
      }
    }
  }
  return stats;
}

EmpiricalCdf cdf_of_stat(const NeighborhoodStats& stats, StatKind which) {
  const Eigen::MatrixXd& grid =
      which == StatKind::Min ? stats.inr_min : stats.inr_rng_db;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.cols(); ++j)
      samples.push_back(which == StatKind::Min ? linear_to_db_floored(grid(i, j))
                                               : grid(i, j));
  return EmpiricalCdf(std::move(samples));
}

double reciprocity_delta_db(const InrMap& map_a, const InrMap& map_b) {
  if (map_a.values.rows() != map_b.values.cols() ||
      map_a.values.cols() != map_b.values.rows())
    throw std::invalid_argument("reciprocity: incompatible map dimensions");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < map_a.values.rows(); ++i)
    for (Eigen::Index j = 0; j < map_a.values.cols(); ++j)
      worst = std::max(worst, std::abs(linear_to_db_floored(map_a.values(i, j)) -
                                       linear_to_db_floored(map_b.values(j, i))));
  return worst;
}

void export_sweep_csv(const InrMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("sweep: cannot write '" + path + "'");
  out << "theta_tx_deg,theta_rx_deg,inr_db\n";
  for (std::size_t i = 0; i < map.tx_profile.size(); ++i)
    for (std::size_t j = 0; j < map.rx_profile.size(); ++j)
      out << fmt_g17(map.tx_profile[i]) << "," << fmt_g17(map.rx_profile[j]) << ","
          << fmt_g17(linear_to_db_floored(map.values(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j))))
          << "\n";
  if (!out) throw DataError("sweep: write failed for '" + path + "'");
}

namespace {

double parse_csv_double(const std::string& tok, const std::string& path, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(path + ":" + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

InrMap import_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("sweep: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "theta_tx_deg,theta_rx_deg,inr_db")
    throw DataError(path + ": unexpected header '" + header + "'");

  struct Row {
    double tx, rx, db;
  };
  std::vector<Row> rows;
  std::vector<double> tx_angles, rx_angles;
  std::string raw;
  int line = 1;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (std::count(raw.begin(), raw.end(), ',') != 2)
      throw DataError(path + ":" + std::to_string(line) + ": expected 3 fields");
    const auto c1 = raw.find(',');
    const auto c2 = raw.find(',', c1 + 1);
    const std::array<std::string, 3> fields = {raw.substr(0, c1),
                                               raw.substr(c1 + 1, c2 - c1 - 1),
                                               raw.substr(c2 + 1)};
    Row r;
    r.tx = parse_csv_double(fields[0], path, line);
    r.rx = parse_csv_double(fields[1], path, line);
    r.db = parse_csv_double(fields[2], path, line);
    rows.push_back(r);
    tx_angles.push_back(r.tx);
    rx_angles.push_back(r.rx);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(tx_angles);
  unique_sorted(rx_angles);

  InrMap map;
  map.tx_profile.angles_deg = tx_angles;
  map.rx_profile.angles_deg = rx_angles;
  const auto rows_n = static_cast<Eigen::Index>(tx_angles.size());
  const auto cols_n = static_cast<Eigen::Index>(rx_angles.size());
  map.values = Eigen::MatrixXd::Constant(rows_n, cols_n,
                                         std::numeric_limits<double>::quiet_NaN());
  auto index_of = [](const std::vector<double>& v, double x) {
    return static_cast<Eigen::Index>(
        std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (const Row& r : rows) {
    const Eigen::Index i = index_of(tx_angles, r.tx);
    const Eigen::Index j = index_of(rx_angles, r.rx);
    if (!std::isnan(map.values(i, j)))
      throw DataError(path + ": duplicate pair " + pair_str(r.tx, r.rx));
    map.values(i, j) = r.db <= kDbFloor ? 0.0 : db_to_linear(r.db);
  }
  for (Eigen::Index i = 0; i < rows_n; ++i)
    for (Eigen::Index j = 0; j < cols_n; ++j)
      if (std::isnan(map.values(i, j)))
        throw DataError(path + ": missing cell " +
                        pair_str(tx_angles[static_cast<std::size_t>(i)],
                                 rx_angles[static_cast<std::size_t>(j)]));
  return map;
}

void export_sweep_meta(const SweepMeta& meta, const std::string& csv_path) {
  const std::string path = csv_path + ".meta";
  std::ofstream out(path);
  if (!out) throw DataError("sweep: cannot write '" + path + "'");
  out << "schema_version = 1\n";
  out << "kind = fdbeam-sweep-meta\n";
  out << "tx_profile = " << meta.tx_profile_spec << "\n";
  out << "rx_profile = " << meta.rx_profile_spec << "\n";
  out << "scene_digest = " << meta.scene_digest << "\n";
  out << "seed = " << meta.seed << "\n";
  out << "beam_bits = " << meta.beam_bits << "\n";
}

}  // namespace fdbeam
