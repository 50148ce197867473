#include "fdbeam/channel.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace fdbeam {

namespace {

Eigen::Vector3d horizontal_point(const Eigen::Vector3d& origin, double azimuth_deg,
                                 double range_m) {
  const double a = deg_to_rad(azimuth_deg);
  return origin + range_m * Eigen::Vector3d{std::cos(a), std::sin(a), 0.0};
}

Complex friis_amplitude(double wavelength_m, double range_m) {
  const double mag = wavelength_m / (4.0 * kPi * range_m);
  return std::polar(mag, -2.0 * kPi * range_m / wavelength_m);
}

const UserNode& user_at(const Scene& scene, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= scene.users.size())
    throw std::invalid_argument("channel: unknown user " + std::to_string(index));
  return scene.users[static_cast<std::size_t>(index)];
}

}  // namespace

SiChannel si_channel(const Scene& scene) {
  scene.validate();
  const double lambda = scene.wavelength_m();
  const int n_rx = scene.rx_array.num_elements;
  const int n_tx = scene.tx_array.num_elements;
  SiChannel channel;
  channel.matrix = CMatrix::Zero(n_rx, n_tx);

  if (std::isfinite(scene.direct_coupling_gain_db)) {
    const double kappa = std::pow(10.0, scene.direct_coupling_gain_db / 20.0);
    const auto rx_pos = element_positions(scene.rx_array, lambda);
    const auto tx_pos = element_positions(scene.tx_array, lambda);
    for (int m = 0; m < n_rx; ++m) {
      for (int n = 0; n < n_tx; ++n) {
        const double r = (rx_pos[static_cast<std::size_t>(m)] -
                          tx_pos[static_cast<std::size_t>(n)])
                             .norm();
        if (!(r > 0.0))
          throw std::invalid_argument(
              "channel: coincident tx/rx elements (m=" + std::to_string(m) +
              ", n=" + std::to_string(n) + ")");
        channel.matrix(m, n) = kappa * friis_amplitude(lambda, r);
      }
    }
  }

  const Eigen::Vector3d origin = scene.origin();
  for (const Scatterer& s : scene.scatterers) {
    const Eigen::Vector3d p = horizontal_point(origin, s.azimuth_deg, s.range_m);
    const double theta_tx = local_azimuth_deg(scene.tx_array.pose, p);
    const double theta_rx = local_azimuth_deg(scene.rx_array.pose, p);
    // ULAs only see the forward half-plane; reflectors behind an array
    // contribute nothing.
    if (std::abs(theta_tx) > 90.0 || std::abs(theta_rx) > 90.0) continue;
    const double r_tx = (p - scene.tx_array.pose.position).norm();
    const double r_rx = (p - scene.rx_array.pose.position).norm();
    const Complex gain = std::pow(10.0, s.reflection_gain_db / 20.0) *
                         friis_amplitude(lambda, r_tx) * friis_amplitude(lambda, r_rx);
    channel.matrix.noalias() +=
        gain * (steering_vector(scene.rx_array, theta_rx) *
                steering_vector(scene.tx_array, theta_tx).transpose());
  }
  return channel;
}

LinkChannel user_channel(const Scene& scene, int user_index, LinkSide side) {
  const UserNode& user = user_at(scene, user_index);
  const ArrayGeometry& arr =
      side == LinkSide::Downlink ? scene.tx_array : scene.rx_array;
  const double lambda = scene.wavelength_m();
  const Eigen::Vector3d p =
      horizontal_point(scene.origin(), user.azimuth_deg, user.range_m);
  const double range = (p - arr.pose.position).norm();
  const double theta_los = local_azimuth_deg(arr.pose, p);
  if (std::abs(theta_los) > 90.0)
    throw std::invalid_argument("channel: user " + std::to_string(user_index) +
                                " lies behind the array");
  LinkChannel channel;
  channel.vector = std::pow(10.0, user.los_gain_db / 20.0) *
                   friis_amplitude(lambda, range) * steering_vector(arr, theta_los);
  for (const NlosRay& ray : user.nlos_rays) {
    const double theta = wrap_deg(ray.azimuth_deg - arr.pose.boresight_deg);
    if (std::abs(theta) > 90.0) continue;
    const Complex alpha = std::pow(10.0, ray.gain_db / 20.0) *
                          std::abs(friis_amplitude(lambda, range)) *
                          std::polar(1.0, ray.phase_rad);
    channel.vector.noalias() += alpha * steering_vector(arr, theta);
  }
  return channel;
}

CrosslinkChannel crosslink_channel(const Scene& scene, int dl_user, int ul_user) {
  if (dl_user == ul_user)
    throw std::invalid_argument("channel: crosslink needs two distinct users");
  const UserNode& a = user_at(scene, dl_user);
  const UserNode& b = user_at(scene, ul_user);
  const Eigen::Vector3d origin = scene.origin();
  const Eigen::Vector3d pa = horizontal_point(origin, a.azimuth_deg, a.range_m);
  const Eigen::Vector3d pb = horizontal_point(origin, b.azimuth_deg, b.range_m);
  const double d = (pa - pb).norm();
  if (!(d > 0.0))
    throw std::invalid_argument("channel: co-located users have no crosslink range");
  CrosslinkChannel channel;
  channel.scalar =
      std::pow(10.0, scene.crosslink_gain_db / 20.0) * friis_amplitude(scene.wavelength_m(), d);
  return channel;
}

double perturb_inr(double inr_linear, double sigma_db, std::mt19937_64& rng) {
  if (sigma_db < 0.0)
    throw std::invalid_argument("perturb_inr: sigma_db must be >= 0");
  if (sigma_db == 0.0) return inr_linear;
  std::normal_distribution<double> jitter(0.0, sigma_db);
  return inr_linear * db_to_linear(jitter(rng));
}

namespace {

// Shared state for scene-backed measurement closures.
struct SceneMeasureState {
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  LinkBudget budget;
  SiChannel si;
  std::optional<int> bits;
};

}  // namespace

MeasureFn make_inr_measure(const Scene& scene, std::optional<int> bits) {
  auto state = std::make_shared<SceneMeasureState>();
  state->tx_array = scene.tx_array;
  state->rx_array = scene.rx_array;
  state->budget = scene.budget;
  state->si = si_channel(scene);
  state->bits = bits;
  return [state](double theta_tx_deg, double theta_rx_deg) {
    const BeamWeights f = synthesize_beam(state->tx_array, theta_tx_deg, state->bits);
    const BeamWeights w = synthesize_beam(state->rx_array, theta_rx_deg, state->bits);
    return inr_si(f, w, state->si, state->budget);
  };
}

namespace {

SnrFn make_snr_measure(const Scene& scene, int user_index, LinkSide side,
                       std::optional<int> bits) {
  struct State {
    ArrayGeometry array;
    LinkBudget budget;
    LinkChannel channel;
    LinkSide side;
    std::optional<int> bits;
  };
  auto state = std::make_shared<State>();
  state->array = side == LinkSide::Downlink ? scene.tx_array : scene.rx_array;
  state->budget = scene.budget;
  state->channel = user_channel(scene, user_index, side);
  state->side = side;
  state->bits = bits;
  return [state](double theta_deg) {
    const BeamWeights beam = synthesize_beam(state->array, theta_deg, state->bits);
    return state->side == LinkSide::Downlink
               ? snr_dl(beam, state->channel, state->budget)
               : snr_ul(beam, state->channel, state->budget);
  };
}

}  // namespace

SnrFn make_snr_dl_measure(const Scene& scene, int user_index, std::optional<int> bits) {
  return make_snr_measure(scene, user_index, LinkSide::Downlink, bits);
}

SnrFn make_snr_ul_measure(const Scene& scene, int user_index, std::optional<int> bits) {
  return make_snr_measure(scene, user_index, LinkSide::Uplink, bits);
}

}  // namespace fdbeam
