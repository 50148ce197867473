#include "fdbeam/array.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fdbeam {

namespace {

void check_geometry(const ArrayGeometry& geom) {
  if (geom.num_elements < 1)
    throw std::invalid_argument("array: num_elements must be >= 1");
  if (!(geom.spacing_wavelengths > 0.0))
    throw std::invalid_argument("array: spacing_wavelengths must be > 0");
}

void check_steering_angle(double theta_deg) {
  if (!std::isfinite(theta_deg) || std::abs(theta_deg) > 90.0 + 1e-12)
    throw std::invalid_argument("array: steering angle " +
                                std::to_string(theta_deg) +
                                " deg outside [-90, 90]");
}

}  // namespace

Eigen::Vector3d boresight_direction(const ArrayPose& pose) {
  const double b = deg_to_rad(pose.boresight_deg);
  return {std::cos(b), std::sin(b), 0.0};
}

double local_azimuth_deg(const ArrayPose& pose, const Eigen::Vector3d& point) {
  const Eigen::Vector3d v = point - pose.position;
  const double global_az = rad_to_deg(std::atan2(v.y(), v.x()));
  return wrap_deg(global_az - pose.boresight_deg);
}

std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geom,
                                               double wavelength_m) {
  check_geometry(geom);
  if (!(wavelength_m > 0.0))
    throw std::invalid_argument("array: wavelength must be > 0");
  const double b = deg_to_rad(geom.pose.boresight_deg);
  // Axis chosen so that a source at positive local azimuth produces the
  // +j*2*pi*d*n*sin(theta) phase progression of steering_vector.
  const Eigen::Vector3d axis{-std::sin(b), std::cos(b), 0.0};
  const double pitch = geom.spacing_wavelengths * wavelength_m;
  const double half_span = 0.5 * (geom.num_elements - 1);
  std::vector<Eigen::Vector3d> points;
  points.reserve(geom.num_elements);
  for (int n = 0; n < geom.num_elements; ++n)
    points.push_back(geom.pose.position + (n - half_span) * pitch * axis);
  return points;
}

CVector steering_vector(const ArrayGeometry& geom, double theta_deg) {
  check_geometry(geom);
  check_steering_angle(theta_deg);
  const double phase_step =
      2.0 * kPi * geom.spacing_wavelengths * std::sin(deg_to_rad(theta_deg));
  CVector a(geom.num_elements);
  for (int n = 0; n < geom.num_elements; ++n)
    a[n] = std::polar(1.0, phase_step * n);
  return a;
}

BeamWeights synthesize_beam(const ArrayGeometry& geom, double theta_deg,
                            std::optional<int> bits) {
  if (bits && *bits < 1)
    throw std::invalid_argument("array: quantization bits must be >= 1");
  const CVector a = steering_vector(geom, theta_deg);
  const double scale = 1.0 / std::sqrt(static_cast<double>(geom.num_elements));
  BeamWeights beam;
  beam.quantization_bits = bits;
  beam.weights.resize(geom.num_elements);
  for (int n = 0; n < geom.num_elements; ++n) {
    double phase = -std::arg(a[n]);  // conjugate match
    if (bits) {
      const double step = 2.0 * kPi / static_cast<double>(1ull << *bits);
      phase = std::round(phase / step) * step;
    }
    beam.weights[n] = std::polar(scale, phase);
  }
  return beam;
}

double array_gain(const BeamWeights& beam, const ArrayGeometry& geom,
                  double theta_deg) {
  if (beam.weights.size() != geom.num_elements)
    throw std::invalid_argument("array: weight/geometry length mismatch");
  return std::norm(beam_dot(steering_vector(geom, theta_deg), beam.weights));
}

Eigen::VectorXd beam_pattern(const BeamWeights& beam, const ArrayGeometry& geom,
                             const std::vector<double>& profile_deg,
                             double floor_db) {
  if (profile_deg.empty())
    throw std::invalid_argument("array: beam_pattern needs a non-empty profile");
  Eigen::VectorXd out(static_cast<Eigen::Index>(profile_deg.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = linear_to_db_floored(
        array_gain(beam, geom, profile_deg[static_cast<std::size_t>(i)]),
        floor_db);
  return out;
}

Codebook make_codebook(double start_deg, double stop_deg, double step_deg,
                       const ArrayGeometry& geom, std::optional<int> bits) {
  if (!(step_deg > 0.0))
    throw std::invalid_argument("codebook: step must be > 0");
  if (start_deg > stop_deg)
    throw std::invalid_argument("codebook: empty angle range");
  Codebook cb;
  const int count =
      static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
  cb.entries.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double angle = start_deg + i * step_deg;
    cb.entries.push_back({angle, synthesize_beam(geom, angle, bits)});
  }
  return cb;
}

}  // namespace fdbeam
