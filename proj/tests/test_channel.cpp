#include <doctest.h>

#include <cmath>
#include <random>

#include "fdbeam/channel.hpp"

using namespace fdbeam;

namespace {

Scene base_scene() {
  Scene s;
  s.seed = 42;
  s.tx_array.pose.position = {0.0, -0.05, 0.0};
  s.rx_array.pose.position = {0.0, 0.05, 0.0};
  return s;
}

// Nearly co-located arrays remove parallax between the two local frames.
Scene colocated_scene() {
  Scene s = base_scene();
  s.tx_array.pose.position = {0.0, -0.0005, 0.0};
  s.rx_array.pose.position = {0.0, 0.0005, 0.0};
  return s;
}

struct ArgmaxCell {
  int i = 0, j = 0;
};

ArgmaxCell inr_argmax(const Scene& scene, double start = -64.0, double step = 1.0,
                      double stop = 64.0) {
  const MeasureFn inr = make_inr_measure(scene);
  ArgmaxCell best;
  double best_v = -1.0;
  int i = 0;
  for (double t = start; t <= stop + 1e-9; t += step, ++i) {
    int j = 0;
    for (double r = start; r <= stop + 1e-9; r += step, ++j) {
      const double v = inr(t, r);
      if (v > best_v) {
        best_v = v;
        best = {i, j};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("si_channel: no coupling sources gives the zero matrix") {
  Scene s = base_scene();
  s.direct_coupling_gain_db = -std::numeric_limits<double>::infinity();
  const SiChannel H = si_channel(s);
  CHECK(H.matrix.norm() == 0.0);
  CHECK(H.matrix.rows() == 16);
  CHECK(H.matrix.cols() == 16);
}

TEST_CASE("si_channel near-field entries match hand geometry") {
  Scene s = base_scene();
  s.direct_coupling_gain_db = 0.0;  // unit kappa isolates the kernel
  const SiChannel H = si_channel(s);
  const double lambda = s.wavelength_m();
  const auto tx = element_positions(s.tx_array, lambda);
  const auto rx = element_positions(s.rx_array, lambda);

  for (const auto [m, n] : {std::pair{0, 0}, std::pair{3, 11}, std::pair{15, 2}}) {
    // Hand Euclidean distance between rx element m and tx element n: the
    // arrays sit 0.1 m apart on y with element offsets along y as well.
    const double ym = 0.05 + (m - 7.5) * 0.5 * lambda;
    const double yn = -0.05 + (n - 7.5) * 0.5 * lambda;
    const double r_hand = std::abs(ym - yn);
    CHECK((rx[m] - tx[n]).norm() == doctest::Approx(r_hand).epsilon(1e-12));
    const Complex expected =
        (lambda / (4.0 * kPi * r_hand)) * std::polar(1.0, -2.0 * kPi * r_hand / lambda);
    CHECK(std::abs(H.matrix(m, n) - expected) < 1e-15);
  }
}

TEST_CASE("near-field energy decays with array separation") {
  double prev = std::numeric_limits<double>::infinity();
  for (double sep : {0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50}) {
    Scene s = base_scene();
    s.tx_array.pose.position = {0.0, -sep / 2.0, 0.0};
    s.rx_array.pose.position = {0.0, sep / 2.0, 0.0};
    const double norm = si_channel(s).matrix.norm();
    CHECK(norm <= prev + 1e-15);
    prev = norm;
  }
}

TEST_CASE("scatterer-only map peaks on the diagonal for co-located arrays") {
  Scene s = colocated_scene();
  s.direct_coupling_gain_db = -std::numeric_limits<double>::infinity();
  s.scatterers = {{10.0, 5.0, -4.0}};
  const auto cell = inr_argmax(s);
  CHECK(cell.i == 74);  // -64 + 74 = 10 degrees
  CHECK(cell.j == 74);
}

TEST_CASE("rotating the rx array shifts the scatterer peak by the separation") {
  for (const auto [phi, azimuth] : {std::pair{60.0, -20.0}, std::pair{90.0, -40.0}}) {
    Scene s = colocated_scene();
    s.direct_coupling_gain_db = -std::numeric_limits<double>::infinity();
    s.scatterers = {{azimuth, 4.0, -3.0}};
    s.rx_array.pose.boresight_deg = -phi;
    const auto cell = inr_argmax(s);
    const double theta_tx = -64.0 + cell.i;
    const double theta_rx = -64.0 + cell.j;
    CHECK(std::abs(theta_tx - azimuth) <= 1.0);
    CHECK(std::abs(theta_rx - (theta_tx + phi)) <= 1.0);
  }
}

TEST_CASE("role swap transposes the INR map within 1e-12 relative") {
  Scene s = base_scene();
  s.scatterers = {{-15.0, 3.0, -2.0}, {22.0, 4.0, -5.0}};
  Scene swapped = s;
  std::swap(swapped.tx_array, swapped.rx_array);

  const MeasureFn fwd = make_inr_measure(s);
  const MeasureFn rev = make_inr_measure(swapped);
  for (double a = -60.0; a <= 60.0; a += 7.5) {
    for (double b = -60.0; b <= 60.0; b += 7.5) {
      const double x = fwd(a, b);
      const double y = rev(b, a);
      CHECK(std::abs(x - y) <= 1e-12 * std::max(x, y));
    }
  }
}

TEST_CASE("user_channel: boresight user is proportional to the all-ones response") {
  Scene s = colocated_scene();
  s.users = {{0.0, 4.0, 8.0, {}}};
  const LinkChannel h = user_channel(s, 0, LinkSide::Downlink);
  for (int n = 1; n < 16; ++n)
    CHECK(std::abs(h.vector[n] - h.vector[0]) < 1e-9 * std::abs(h.vector[0]));
}

TEST_CASE("user SNR curve peaks near the user's azimuth") {
  Scene s = base_scene();
  s.users = {{50.0, 4.0, 8.0, {}}};
  const SnrFn snr = make_snr_dl_measure(s, 0);
  double best_angle = -64.0, best = -1.0;
  for (double a = -64.0; a <= 64.0; a += 1.0) {
    const double v = snr(a);
    if (v > best) {
      best = v;
      best_angle = a;
    }
  }
  CHECK(std::abs(best_angle - 50.0) <= 2.0);  // one codebook step is 8 deg
}

TEST_CASE("channels are deterministic given the scene seed") {
  Scene s = base_scene();
  s.scatterers = {{5.0, 3.0, -3.0}};
  s.users = {{-30.0, 4.0, 8.0, {{-12.0, -2.0, nlos_phase_from_seed(42, 0, 0)}}},
             {25.0, 4.0, 7.0, {}}};
  const Scene t = s;
  CHECK(si_channel(s).matrix == si_channel(t).matrix);
  CHECK(user_channel(s, 0, LinkSide::Downlink).vector ==
        user_channel(t, 0, LinkSide::Downlink).vector);
  CHECK(user_channel(s, 1, LinkSide::Uplink).vector ==
        user_channel(t, 1, LinkSide::Uplink).vector);
  CHECK(crosslink_channel(s, 0, 1).scalar == crosslink_channel(t, 0, 1).scalar);
}

TEST_CASE("user errors: unknown index, behind the array") {
  Scene s = base_scene();
  s.users = {{150.0, 4.0, 8.0, {}}};
  CHECK_THROWS_AS((void)user_channel(s, 3, LinkSide::Downlink), std::invalid_argument);
  CHECK_THROWS_AS((void)user_channel(s, 0, LinkSide::Downlink), std::invalid_argument);
}

TEST_CASE("crosslink: symmetry, guarded degenerate cases") {
  Scene s = base_scene();
  s.users = {{-50.0, 4.0, 8.0, {}}, {20.0, 4.0, 8.0, {}}, {20.0, 4.0, 7.0, {}}};
  CHECK(std::abs(crosslink_channel(s, 0, 1).scalar) ==
        doctest::Approx(std::abs(crosslink_channel(s, 1, 0).scalar)).epsilon(1e-15));
  CHECK_THROWS_AS((void)crosslink_channel(s, 0, 0), std::invalid_argument);
  // Users 1 and 2 share a position: zero range is rejected.
  CHECK_THROWS_AS((void)crosslink_channel(s, 1, 2), std::invalid_argument);
}

TEST_CASE("lobby crosslink INR lands in the calibrated band") {
  const Scene s = lobby_scene();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const double v = linear_to_db(inr_cl(crosslink_channel(s, a, b), s.budget));
      CHECK(v >= -12.0);
      CHECK(v <= 5.0);
    }
  }
}

TEST_CASE("perturb_inr: identity, spread, positivity") {
  std::mt19937_64 rng(1234);
  CHECK(perturb_inr(3.7, 0.0, rng) == 3.7);

  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = 10.0 * std::log10(perturb_inr(1.0, 1.0, rng));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(stddev - 1.0) <= 0.05);

  for (int i = 0; i < 100; ++i) CHECK(perturb_inr(1e-9, 3.0, rng) > 0.0);
  CHECK_THROWS_AS((void)perturb_inr(1.0, -0.1, rng), std::invalid_argument);
}
