#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "fdbeam/units.hpp"

namespace fdbeam {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Position of the array center plus boresight azimuth in the global frame.
// Azimuth 0 points along +x, angles grow counterclockwise (viewed from +z).
struct ArrayPose {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  double boresight_deg = 0.0;
};

// Uniform linear array, horizontal, with digitally-controlled phase weights.
struct ArrayGeometry {
  int num_elements = 16;
  double spacing_wavelengths = 0.5;
  ArrayPose pose;
};

// Analog beamforming weights. Entries are phase-only with magnitude
// 1/sqrt(N); the vector has unit norm. Weights are stored conjugated
// relative to the array response, so applying a beam to a channel is the
// plain bilinear product (no conjugation) and a role swap transposes the
// channel exactly.
struct BeamWeights {
  CVector weights;
  std::optional<int> quantization_bits;  // empty = unquantized
};

struct CodebookEntry {
  double angle_deg = 0.0;
  BeamWeights beam;
};

// Beam-alignment codebook; entries sorted by strictly increasing angle.
struct Codebook {
  std::vector<CodebookEntry> entries;
};

// Bilinear beam/channel coupling c = sum_n x_n y_n.
inline Complex beam_dot(const CVector& x, const CVector& y) {
  return (x.transpose() * y).value();
}

// Boresight unit vector of a pose, in the horizontal plane.
Eigen::Vector3d boresight_direction(const ArrayPose& pose);

// Azimuth of `point` in the pose's local frame, degrees in (-180, 180].
double local_azimuth_deg(const ArrayPose& pose, const Eigen::Vector3d& point);

// Element centers in meters, along the array axis, centered on the pose
// position. Element 0 sits at the negative end of the axis.
std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geom,
                                               double wavelength_m);

// Far-field array response a(theta); entry n = exp(j*2*pi*d*n*sin(theta)).
CVector steering_vector(const ArrayGeometry& geom, double theta_deg);

// Conjugate-matched unit-norm beam toward theta. With `bits` set, each
// phase is rounded to the nearest multiple of 2*pi/2^bits first.
BeamWeights synthesize_beam(const ArrayGeometry& geom, double theta_deg,
                            std::optional<int> bits = std::nullopt);

// Linear power gain |a(theta)^T w|^2 of the beam evaluated at theta.
double array_gain(const BeamWeights& beam, const ArrayGeometry& geom,
                  double theta_deg);

// Gains in dB over a profile of angles; exact nulls clamp to floor_db.
Eigen::VectorXd beam_pattern(const BeamWeights& beam, const ArrayGeometry& geom,
                             const std::vector<double>& profile_deg,
                             double floor_db = kDbFloor);

// Inclusive uniform codebook over [start, stop] with the given step.
Codebook make_codebook(double start_deg, double stop_deg, double step_deg,
                       const ArrayGeometry& geom,
                       std::optional<int> bits = std::nullopt);

}  // namespace fdbeam
