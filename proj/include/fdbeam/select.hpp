#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdbeam/array.hpp"
#include "fdbeam/link_metrics.hpp"
#include "fdbeam/measure.hpp"

namespace fdbeam {

// Beam-alignment outcome used to seed the selection solvers.
struct InitialSelection {
  double theta_tx_init_deg = 0.0;
  double theta_rx_init_deg = 0.0;
  double snr_dl_init = 0.0;  // linear
  double snr_ul_init = 0.0;
};

// Neighborhood half-widths, resolutions, and the self-interference
// target (dB; +inf admits every pair, -inf collapses to the grid min).
struct SteerParams {
  double delta_tx_deg = 0.0;
  double delta_rx_deg = 0.0;
  double res_tx_deg = 1.0;
  double res_rx_deg = 1.0;
  double inr_target_db = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct SteerPlusParams : SteerParams {
  double se_target_bps_hz = std::numeric_limits<double>::infinity();
};

// Exact accounting of the measurements a solver consumed. Cached
// re-reads count as cache_hits, not measurements.
struct MeasurementLedger {
  std::int64_t inr_measurements = 0;
  std::int64_t snr_dl_measurements = 0;
  std::int64_t snr_ul_measurements = 0;
  std::int64_t cache_hits = 0;
};

struct SelectionResult {
  double theta_tx_star_deg = 0.0;
  double theta_rx_star_deg = 0.0;
  double inr_db = 0.0;
  double sinr_dl_db = std::numeric_limits<double>::quiet_NaN();
  double sinr_ul_db = std::numeric_limits<double>::quiet_NaN();
  double r_dl = std::numeric_limits<double>::quiet_NaN();  // bps/Hz
  double r_ul = std::numeric_limits<double>::quiet_NaN();
  double r_sum = std::numeric_limits<double>::quiet_NaN();
  double deviation_deg2 = 0.0;  // squared deviation from the init pair
  bool fallback_used = false;
  MeasurementLedger ledger;
};

// Candidate shift pair, ordered by deviation metric.
struct Candidate {
  double dtx_deg = 0.0;
  double drx_deg = 0.0;

  double metric() const { return dtx_deg * dtx_deg + drx_deg * drx_deg; }
};

// Argmax of snr_fn over the codebook; ties break toward the smaller angle.
double beam_align(const Codebook& codebook, const SnrFn& snr_fn);

// Beam-alignment on both sides, packaged for the solvers.
InitialSelection align_initial(const Codebook& tx_codebook, const Codebook& rx_codebook,
                               const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn);

// Offsets {m*res : m in [-floor(delta/res), +floor(delta/res)]}, ascending.
std::vector<double> neighborhood_offsets(double delta_deg, double res_deg);

// All offset pairs sorted ascending by dtx^2 + drx^2; equal metrics break
// by (|dtx|, dtx, drx) lexicographically.
std::vector<Candidate> sorted_candidates(const std::vector<double>& offsets_tx,
                                         const std::vector<double>& offsets_rx);

// Minimal-deviation pair whose measured INR meets
// max(target, neighborhood minimum). Always feasible; measures the full
// neighborhood grid. SNR-dependent fields stay NaN (see finalize_metrics).
SelectionResult steer(const InitialSelection& init, const SteerParams& params,
                      const MeasureFn& inr_fn);

// Iterates candidates in sorted order with cached INR/SNR measurements;
// keeps the best qualifying sum spectral efficiency and stops once it
// reaches the target. Falls back to the initial pair when no candidate
// meets the INR target.
SelectionResult steer_plus(const InitialSelection& init, const SteerPlusParams& params,
                           const MeasureFn& inr_fn, const SnrFn& snr_dl_fn,
                           const SnrFn& snr_ul_fn, double inr_cl_linear);

// Brute-force references applying the selection problems literally;
// used by tests and --verify only.
SelectionResult oracle_exhaustive(const InitialSelection& init, const SteerParams& params,
                                  const MeasureFn& inr_fn);
SelectionResult oracle_exhaustive(const InitialSelection& init,
                                  const SteerPlusParams& params, const MeasureFn& inr_fn,
                                  const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn,
                                  double inr_cl_linear);

// Fills the SINR/rate fields of a result by evaluating the selected pair;
// evaluation does not touch the ledger.
void finalize_metrics(SelectionResult& result, const MeasureFn& inr_fn,
                      const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn,
                      double inr_cl_linear);

// JSON document mirroring SelectionResult (field names documented in
// README); parse is the exact inverse.
std::string selection_to_json(const SelectionResult& result);
SelectionResult selection_from_json(const std::string& json_text);

}  // namespace fdbeam
