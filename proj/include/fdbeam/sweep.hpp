#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fdbeam/measure.hpp"
#include "fdbeam/units.hpp"

namespace fdbeam {

// Ordered set of steering angles swept by one side.
struct SpatialProfile {
  std::vector<double> angles_deg;

  std::size_t size() const { return angles_deg.size(); }
  double operator[](std::size_t i) const { return angles_deg[i]; }
};

// Inclusive uniform grid start, start+step, ..., <= stop.
SpatialProfile make_profile(double start_deg, double step_deg, double stop_deg);

// Grid of linear INR values; values(i, j) pairs tx_profile[i] with
// rx_profile[j].
struct InrMap {
  SpatialProfile tx_profile;
  SpatialProfile rx_profile;
  Eigen::MatrixXd values;
};

// Empirical distribution over dB samples. Quantiles use the
// lower-nearest-rank convention so plots reproduce bit-exactly.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples_db);

  // Fraction of samples <= value_db.
  double probability_at(double value_db) const;
  // Smallest sample whose cumulative fraction reaches p.
  double quantile(double p) const;
  const std::vector<double>& samples_db() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// Per-cell minimum and max/min range over rectangular spatial
// neighborhoods of the map. inr_min is linear; inr_rng is dB. Cells whose
// neighborhood contains an exact zero get the configured ceiling and a
// flag, since the ratio is undefined there.
struct NeighborhoodStats {
  double delta_tx_deg = 0.0;
  double delta_rx_deg = 0.0;
  Eigen::MatrixXd inr_min;
  Eigen::MatrixXd inr_rng_db;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> rng_undefined;
};

enum class StatKind { Min, Range };

// Evaluates measure on every profile pair. Throws DataError naming the
// offending pair if measure returns a negative or non-finite value.
InrMap run_sweep(const MeasureFn& measure, const SpatialProfile& tx_profile,
                 const SpatialProfile& rx_profile);

// dB-domain distribution over all grid entries.
EmpiricalCdf cdf(const InrMap& map);

// Indices whose angle lies within delta_deg of the center angle;
// truncated at the profile boundaries.
std::vector<std::size_t> neighborhood_indices(const SpatialProfile& profile,
                                              std::size_t center_index,
                                              double delta_deg);

NeighborhoodStats stats_maps(const InrMap& map, double delta_tx_deg,
                             double delta_rx_deg, double rng_ceiling_db = 120.0);

EmpiricalCdf cdf_of_stat(const NeighborhoodStats& stats, StatKind which);

// Max absolute dB difference between map_a and the transpose of map_b.
double reciprocity_delta_db(const InrMap& map_a, const InrMap& map_b);

// Dataset format: CSV `theta_tx_deg,theta_rx_deg,inr_db`, tx-major rows.
void export_sweep_csv(const InrMap& map, const std::string& path);
InrMap import_sweep_csv(const std::string& path);

// Informational sidecar written next to exported sweeps.
struct SweepMeta {
  std::string tx_profile_spec;
  std::string rx_profile_spec;
  std::string scene_digest;
  std::uint64_t seed = 0;
  std::string beam_bits;  // "none" or an integer
};
void export_sweep_meta(const SweepMeta& meta, const std::string& csv_path);

}  // namespace fdbeam
