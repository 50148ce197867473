#pragma once

#include <random>

#include "fdbeam/link_metrics.hpp"
#include "fdbeam/measure.hpp"
#include "fdbeam/scene.hpp"

namespace fdbeam {

enum class LinkSide { Downlink, Uplink };

// Self-interference channel: direct coupling from per-element spherical
// waves, scaled by the scene's calibration gain, plus one far-field ray
// per scatterer.
SiChannel si_channel(const Scene& scene);

// Downlink (tx array) or uplink (rx array) vector channel for one user:
// LOS term plus the user's NLOS rays, free-space loss at the user range.
LinkChannel user_channel(const Scene& scene, int user_index, LinkSide side);

// Scalar channel between two users; magnitude symmetric in the pair.
CrosslinkChannel crosslink_channel(const Scene& scene, int dl_user, int ul_user);

// Multiplies a linear INR by log-normal measurement jitter of the given
// dB standard deviation; sigma_db = 0 returns the input exactly.
double perturb_inr(double inr_linear, double sigma_db, std::mt19937_64& rng);

}  // namespace fdbeam
