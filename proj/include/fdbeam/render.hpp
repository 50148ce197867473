#pragma once

#include <string>
#include <vector>

#include "fdbeam/scenario.hpp"
#include "fdbeam/sweep.hpp"

namespace fdbeam {

// All figures are emitted as standalone SVG documents.

struct HeatmapOptions {
  // Fixed default color range keeps figures comparable across runs.
  double vmin_db = -20.0;
  double vmax_db = 30.0;
  std::string title = "INR (dB)";
};

void render_heatmap(const InrMap& map, const std::string& path,
                    const HeatmapOptions& options = {});

void render_cdf(const EmpiricalCdf& cdf, const std::string& path,
                const std::string& x_label = "INR (dB)",
                const std::string& title = "Empirical CDF");

// Grouped bars of normalized sum spectral efficiency, one group per
// user pair, one bar per neighborhood size.
void render_bars(const std::vector<ScenarioRecord>& records,
                 const std::string& algorithm, const std::string& path);

}  // namespace fdbeam
