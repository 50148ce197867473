#pragma once

#include <functional>
#include <optional>

namespace fdbeam {

struct Scene;

// Pure measurement callables; safe for concurrent invocation.
using MeasureFn = std::function<double(double theta_tx_deg, double theta_rx_deg)>;
using SnrFn = std::function<double(double theta_deg)>;

// Scene-backed measurements: beams are synthesized per call with the
// given phase resolution (empty = ideal phases).
MeasureFn make_inr_measure(const Scene& scene,
                           std::optional<int> bits = std::nullopt);
SnrFn make_snr_dl_measure(const Scene& scene, int user_index,
                          std::optional<int> bits = std::nullopt);
SnrFn make_snr_ul_measure(const Scene& scene, int user_index,
                          std::optional<int> bits = std::nullopt);

}  // namespace fdbeam
