#pragma once

#include <cmath>
#include <cstdint>

namespace fdbeam {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// dB value reported for an exactly-zero linear power, so dB-domain
// outputs stay finite.
inline constexpr double kDbFloor = -120.0;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Wrap an angle to (-180, 180].
inline double wrap_deg(double deg) {
  double a = std::fmod(deg + 180.0, 360.0);
  if (a <= 0.0) a += 360.0;
  return a - 180.0;
}

inline double db_to_linear(double db) { return std::pow(10.0, db * 0.1); }

// Strict conversion: 0 maps to -inf. Use linear_to_db_floored at I/O
// boundaries.
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

inline double linear_to_db_floored(double linear, double floor_db = kDbFloor) {
  if (!(linear > 0.0)) return floor_db;
  return std::max(linear_to_db(linear), floor_db);
}

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

// splitmix64: seed-derivation primitive for reproducible sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from a 64-bit word.
inline double unit_double(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace fdbeam
