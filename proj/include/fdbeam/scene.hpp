#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdbeam/array.hpp"
#include "fdbeam/link_metrics.hpp"

namespace fdbeam {

// Point reflector; produces a single-bounce ray whose transmit and
// receive departure angles coincide in the global frame.
struct Scatterer {
  double azimuth_deg = 0.0;  // global frame, from the BS origin
  double range_m = 1.0;
  double reflection_gain_db = 0.0;  // lumped two-way gain
};

struct NlosRay {
  double azimuth_deg = 0.0;
  double gain_db = 0.0;
  double phase_rad = 0.0;
};

struct UserNode {
  double azimuth_deg = 0.0;  // global frame, from the BS origin
  double range_m = 1.0;
  double los_gain_db = 0.0;
  std::vector<NlosRay> nlos_rays;
};

// Declarative world model: full-duplex BS arrays, scatterers, users,
// link budget, and the seed driving all generated randomness.
struct Scene {
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  std::vector<Scatterer> scatterers;
  std::vector<UserNode> users;
  LinkBudget budget;
  double carrier_hz = 60e9;
  std::uint64_t seed = 1;
  double direct_coupling_gain_db = -2.0;  // kappa; -inf disables
  double crosslink_gain_db = -2.0;        // omni gain on the UE-UE link

  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  Eigen::Vector3d origin() const {
    return 0.5 * (tx_array.pose.position + rx_array.pose.position);
  }
  void validate() const;
};

// Deterministic phase for an NLOS ray that the scene file leaves open.
double nlos_phase_from_seed(std::uint64_t seed, std::size_t user_index,
                            std::size_t ray_index);

// Plain-text key-value scene format (schema documented in README).
// Unknown keys are rejected with their line number. When seed_override
// is set it replaces the file's seed before open ray phases resolve.
Scene load_scene(const std::string& path,
                 std::optional<std::uint64_t> seed_override = std::nullopt);
Scene parse_scene(std::istream& in, const std::string& origin_name,
                  std::optional<std::uint64_t> seed_override = std::nullopt);
void save_scene(const Scene& scene, std::ostream& out);
std::string save_scene_string(const Scene& scene);

// FNV-1a 64-bit hex digest over the canonical serialization.
std::string scene_digest(const Scene& scene);

// Scenes shipped with the repo (scenes/*.scene mirror these exactly).
Scene lobby_scene();
Scene lab_scene();

}  // namespace fdbeam
