#pragma once

#include "fdbeam/array.hpp"
#include "fdbeam/units.hpp"

namespace fdbeam {

// Transmit and noise powers at both ends of the full-duplex link. All
// internal math happens in linear power; dBm only at the boundary.
struct LinkBudget {
  double p_bs_dbm = 10.0;
  double p_ue_dbm = 10.0;
  double noise_bs_dbm = -70.0;
  double noise_ue_dbm = -70.0;

  void validate() const;
};

// Self-interference MIMO channel H (rx elements x tx elements).
struct SiChannel {
  CMatrix matrix;
};

// Downlink or uplink vector channel seen by one array.
struct LinkChannel {
  CVector vector;
};

// Scalar channel between the uplink and downlink users.
struct CrosslinkChannel {
  Complex scalar{0.0, 0.0};
};

struct LinkMetrics {
  double snr_linear = 0.0;
  double inr_linear = 0.0;

  double sinr_linear() const { return snr_linear / (1.0 + inr_linear); }
  double snr_db() const { return linear_to_db_floored(snr_linear); }
  double inr_db() const { return linear_to_db_floored(inr_linear); }
  double sinr_db() const { return linear_to_db_floored(sinr_linear()); }
};

struct RatePair {
  double r_dl = 0.0;  // bps/Hz
  double r_ul = 0.0;

  double r_sum() const { return r_dl + r_ul; }
};

// Downlink SNR for transmit beam f over channel h_tx.
double snr_dl(const BeamWeights& f, const LinkChannel& h_tx,
              const LinkBudget& budget);

// Uplink SNR for receive beam w over channel h_rx.
double snr_ul(const BeamWeights& w, const LinkChannel& h_rx,
              const LinkBudget& budget);

// Self-interference INR coupled by the beam pair (f, w) over H.
double inr_si(const BeamWeights& f, const BeamWeights& w, const SiChannel& H,
              const LinkBudget& budget);

// Cross-link INR at the downlink user.
double inr_cl(const CrosslinkChannel& h, const LinkBudget& budget);

inline double sinr(double snr_linear, double inr_linear) {
  return snr_linear / (1.0 + inr_linear);
}

inline double rate(double sinr_linear) { return std::log2(1.0 + sinr_linear); }

// Interference-free sum spectral efficiency of the aligned beams; the
// normalization denominator for reported sum spectral efficiency.
inline double codebook_capacity(double snr_dl_init_linear,
                                double snr_ul_init_linear) {
  return rate(snr_dl_init_linear) + rate(snr_ul_init_linear);
}

}  // namespace fdbeam
