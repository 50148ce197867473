#include <doctest.h>

#include <cmath>
#include <random>

#include "fdbeam/channel.hpp"
#include "fdbeam/errors.hpp"
#include "fdbeam/select.hpp"

using namespace fdbeam;

namespace {

// Seeded synthetic measurement functions: pure in (angle, seed), so the
// solvers and the oracle see identical values in any evaluation order.
double noise_unit(std::uint64_t seed, long key) {
  std::uint64_t state = seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(
                                                            key + 0x7FFFFFFF));
  return unit_double(splitmix64(state));
}

long angle_key(double theta) { return std::lround(theta * 8.0); }

MeasureFn random_inr(std::uint64_t seed, double lo_db = -15.0, double hi_db = 20.0) {
  return [=](double t, double r) {
    const long key = angle_key(t) * 131071 + angle_key(r);
    return db_to_linear(lo_db + (hi_db - lo_db) * noise_unit(seed, key));
  };
}

SnrFn random_snr(std::uint64_t seed, long stream) {
  return [=](double theta) {
    return db_to_linear(5.0 + 20.0 * noise_unit(seed ^ 0xABCDu, angle_key(theta) + stream));
  };
}

InitialSelection plain_init(double tx = 4.0, double rx = -12.0) {
  InitialSelection init;
  init.theta_tx_init_deg = tx;
  init.theta_rx_init_deg = rx;
  init.snr_dl_init = db_to_linear(18.0);
  init.snr_ul_init = db_to_linear(17.0);
  return init;
}

SteerPlusParams params_of(double delta, double inr_target_db,
                          double se_target = std::numeric_limits<double>::infinity()) {
  SteerPlusParams p;
  p.delta_tx_deg = delta;
  p.delta_rx_deg = delta;
  p.inr_target_db = inr_target_db;
  p.se_target_bps_hz = se_target;
  return p;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("neighborhood_offsets: formula, floor semantics, degenerate") {
  CHECK(neighborhood_offsets(3.0, 1.0) ==
        std::vector<double>{-3, -2, -1, 0, 1, 2, 3});
  CHECK(neighborhood_offsets(2.5, 1.0) == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(neighborhood_offsets(0.0, 1.0) == std::vector<double>{0});
  CHECK_THROWS_AS((void)neighborhood_offsets(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)neighborhood_offsets(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sorted_candidates: zero first, ring ordering, total count") {
  const std::vector<double> offs{-1, 0, 1};
  const auto cands = sorted_candidates(offs, offs);
  REQUIRE(cands.size() == 9);
  CHECK(cands[0].dtx_deg == 0.0);
  CHECK(cands[0].drx_deg == 0.0);
  for (std::size_t k = 1; k <= 4; ++k) CHECK(cands[k].metric() == 1.0);
  for (std::size_t k = 5; k <= 8; ++k) CHECK(cands[k].metric() == 2.0);
  // Documented tie-break: (|dtx|, dtx, drx) lexicographic.
  CHECK(cands[1].dtx_deg == 0.0);
  CHECK(cands[1].drx_deg == -1.0);
  CHECK(cands[2].dtx_deg == 0.0);
  CHECK(cands[2].drx_deg == 1.0);
  CHECK(cands[3].dtx_deg == -1.0);
  CHECK(cands[3].drx_deg == 0.0);
  CHECK(cands[4].dtx_deg == 1.0);
  CHECK(cands[4].drx_deg == 0.0);

  const auto rect = sorted_candidates(neighborhood_offsets(3, 1),
                                      neighborhood_offsets(2, 1));
  CHECK(rect.size() == 7 * 5);
}

TEST_CASE("beam_align: single entry, tie-break, peaked curve") {
  const ArrayGeometry geom{};
  const Codebook single = make_codebook(-8.0, -8.0, 8.0, geom);
  CHECK(beam_align(single, [](double) { return 1.0; }) == -8.0);

  const Codebook cb = make_codebook(-60.0, 60.0, 8.0, geom);
  CHECK(beam_align(cb, [](double) { return 3.0; }) == -60.0);

  const double winner =
      beam_align(cb, [](double t) { return std::exp(-(t - 50.0) * (t - 50.0)); });
  CHECK(winner == 52.0);
  CHECK(std::abs(winner - 50.0) <= 8.0);
}

TEST_CASE("steer: singleton neighborhood returns the initial pair") {
  const auto init = plain_init();
  const auto result = steer(init, params_of(0.0, 0.0), random_inr(1));
  CHECK(result.theta_tx_star_deg == init.theta_tx_init_deg);
  CHECK(result.theta_rx_star_deg == init.theta_rx_init_deg);
  CHECK(result.deviation_deg2 == 0.0);
  CHECK(result.ledger.inr_measurements == 1);
  CHECK_FALSE(result.fallback_used);
}

TEST_CASE("steer: -inf target selects a minimal-INR pair of smallest deviation") {
  const auto init = plain_init();
  const MeasureFn inr = random_inr(77);
  const auto result = steer(init, params_of(3.0, -kInf), inr);

  // Exhaustively find the grid minimum and the smallest metric among the
  // cells attaining it.
  double lo = kInf;
  for (double dt = -3; dt <= 3; ++dt)
    for (double dr = -3; dr <= 3; ++dr)
      lo = std::min(lo, inr(init.theta_tx_init_deg + dt, init.theta_rx_init_deg + dr));
  CHECK(inr(result.theta_tx_star_deg, result.theta_rx_star_deg) == lo);
  CHECK(result.ledger.inr_measurements == 49);
}

TEST_CASE("steer equals the exhaustive oracle on 100 seeded grids") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto init = plain_init();
    const double tgt = -10.0 + static_cast<double>(seed % 25);
    const auto params = params_of(3.0, tgt);
    const MeasureFn inr = random_inr(seed);
    const auto fast = steer(init, params, inr);
    const auto ref = oracle_exhaustive(init, static_cast<const SteerParams&>(params), inr);
    CHECK(fast.theta_tx_star_deg == ref.theta_tx_star_deg);
    CHECK(fast.theta_rx_star_deg == ref.theta_rx_star_deg);
    CHECK(fast.deviation_deg2 == ref.deviation_deg2);
  }
}

TEST_CASE("steer-plus: singleton neighborhood ledger") {
  const auto init = plain_init();
  const auto result = steer_plus(init, params_of(0.0, kInf), random_inr(5),
                                 random_snr(5, 1), random_snr(5, 2), 0.5);
  CHECK(result.theta_tx_star_deg == init.theta_tx_init_deg);
  CHECK(result.ledger.inr_measurements == 1);
  CHECK(result.ledger.snr_dl_measurements == 1);
  CHECK(result.ledger.snr_ul_measurements == 1);
}

TEST_CASE("steer-plus: exact measurement counting on the 7x7 grid") {
  const auto init = plain_init();
  const auto result = steer_plus(init, params_of(3.0, kInf, kInf), random_inr(9),
                                 random_snr(9, 1), random_snr(9, 2), 0.5);
  CHECK(result.ledger.inr_measurements == 49);
  CHECK(result.ledger.snr_dl_measurements == 7);
  CHECK(result.ledger.snr_ul_measurements == 7);
  // Every qualifying pair triggers two lookups; 2*49 - 14 hit the cache.
  CHECK(result.ledger.cache_hits == 84);
  CHECK_FALSE(result.fallback_used);
}

TEST_CASE("steer-plus attains the oracle grid maximum over 200 seeded grids") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto init = plain_init();
    const auto params = params_of(3.0, kInf, kInf);
    const MeasureFn inr = random_inr(seed);
    const SnrFn dl = random_snr(seed, 1), ul = random_snr(seed, 2);
    const double cl = db_to_linear(-5.0 + static_cast<double>(seed % 8));
    const auto fast = steer_plus(init, params, inr, dl, ul, cl);
    const auto ref = oracle_exhaustive(init, params, inr, dl, ul, cl);
    CHECK(fast.r_sum == ref.r_sum);
    CHECK(fast.theta_tx_star_deg == ref.theta_tx_star_deg);
    CHECK(fast.theta_rx_star_deg == ref.theta_rx_star_deg);
  }
}

TEST_CASE("steer-plus with finite targets returns the earliest qualifying pair") {
  for (std::uint64_t seed = 300; seed < 380; ++seed) {
    const auto init = plain_init();
    const auto params = params_of(3.0, 10.0, 7.5);
    const MeasureFn inr = random_inr(seed);
    const SnrFn dl = random_snr(seed, 1), ul = random_snr(seed, 2);
    const auto fast = steer_plus(init, params, inr, dl, ul, 0.5);
    const auto ref = oracle_exhaustive(init, params, inr, dl, ul, 0.5);
    CHECK(fast.theta_tx_star_deg == ref.theta_tx_star_deg);
    CHECK(fast.theta_rx_star_deg == ref.theta_rx_star_deg);
    CHECK(fast.fallback_used == ref.fallback_used);

    if (!fast.fallback_used) {
      // Order-optimality: no candidate earlier in sorted order satisfies
      // both constraints.
      const auto cands = sorted_candidates(neighborhood_offsets(3, 1),
                                           neighborhood_offsets(3, 1));
      for (const Candidate& c : cands) {
        const double t = init.theta_tx_init_deg + c.dtx_deg;
        const double r = init.theta_rx_init_deg + c.drx_deg;
        if (t == fast.theta_tx_star_deg && r == fast.theta_rx_star_deg) break;
        const bool inr_ok = inr(t, r) <= db_to_linear(params.inr_target_db);
        const double rs = rate(sinr(dl(t), 0.5)) + rate(sinr(ul(r), inr(t, r)));
        const bool earlier_qualifies =
            inr_ok && rs >= std::min(params.se_target_bps_hz, ref.r_sum);
        CHECK_FALSE(earlier_qualifies);
      }
    }
  }
}

TEST_CASE("steer-plus and the oracle both fall back when nothing qualifies") {
  const auto init = plain_init();
  const auto params = params_of(2.0, -40.0);  // unreachably low target
  const MeasureFn inr = random_inr(404);
  const SnrFn dl = random_snr(404, 1), ul = random_snr(404, 2);
  const auto fast = steer_plus(init, params, inr, dl, ul, 0.5);
  const auto ref = oracle_exhaustive(init, params, inr, dl, ul, 0.5);
  CHECK(fast.fallback_used);
  CHECK(ref.fallback_used);
  CHECK(fast.theta_tx_star_deg == init.theta_tx_init_deg);
  CHECK(ref.theta_rx_star_deg == init.theta_rx_init_deg);
  // The fallback still reports the initial pair's evaluated rates.
  CHECK(std::isfinite(fast.r_sum));
}

TEST_CASE("baseline containment: unconstrained steer-plus never loses to init") {
  for (std::uint64_t seed = 500; seed < 540; ++seed) {
    const auto init = plain_init();
    const MeasureFn inr = random_inr(seed);
    const SnrFn dl = random_snr(seed, 1), ul = random_snr(seed, 2);
    const double cl = 0.8;
    const auto result = steer_plus(init, params_of(3.0, kInf, kInf), inr, dl, ul, cl);
    const double init_rsum =
        rate(sinr(dl(init.theta_tx_init_deg), cl)) +
        rate(sinr(ul(init.theta_rx_init_deg),
                  inr(init.theta_tx_init_deg, init.theta_rx_init_deg)));
    CHECK(result.r_sum >= init_rsum);
  }
}

TEST_CASE("steer-plus sum rate is non-decreasing in the neighborhood size") {
  for (std::uint64_t seed = 600; seed < 625; ++seed) {
    const auto init = plain_init();
    const MeasureFn inr = random_inr(seed);
    const SnrFn dl = random_snr(seed, 1), ul = random_snr(seed, 2);
    double prev = -1.0;
    for (double delta = 0.0; delta <= 6.0; delta += 1.0) {
      const auto result =
          steer_plus(init, params_of(delta, kInf, kInf), inr, dl, ul, 0.5);
      CHECK(result.r_sum >= prev);
      prev = result.r_sum;
    }
  }
}

TEST_CASE("ledger soundness: bounds and monotone SNR counts in the INR target") {
  for (std::uint64_t seed = 700; seed < 720; ++seed) {
    const auto init = plain_init();
    const MeasureFn inr = random_inr(seed);
    const SnrFn dl = random_snr(seed, 1), ul = random_snr(seed, 2);
    std::int64_t prev_dl = 0, prev_ul = 0;
    for (double tgt : {-12.0, -3.0, 3.0, 10.0, kInf}) {
      const auto result = steer_plus(init, params_of(3.0, tgt, kInf), inr, dl, ul, 0.5);
      CHECK(result.ledger.inr_measurements == 49);
      CHECK(result.ledger.snr_dl_measurements <= 7);
      CHECK(result.ledger.snr_ul_measurements <= 7);
      CHECK(result.ledger.snr_dl_measurements >= prev_dl);
      CHECK(result.ledger.snr_ul_measurements >= prev_ul);
      prev_dl = result.ledger.snr_dl_measurements;
      prev_ul = result.ledger.snr_ul_measurements;
    }
  }
}

TEST_CASE("equal sum rates keep the earliest candidate (strict improvement only)") {
  const auto init = plain_init();
  const MeasureFn inr = [](double, double) { return 0.5; };
  const SnrFn flat = [](double) { return db_to_linear(15.0); };
  const auto result = steer_plus(init, params_of(3.0, kInf, kInf), inr, flat, flat, 0.5);
  CHECK(result.theta_tx_star_deg == init.theta_tx_init_deg);
  CHECK(result.theta_rx_star_deg == init.theta_rx_init_deg);
  CHECK(result.deviation_deg2 == 0.0);
}

TEST_CASE("non-finite measurements are rejected with the offending pair named") {
  const auto init = plain_init(0.0, 0.0);
  const MeasureFn broken = [](double t, double r) {
    return (t == 1.0 && r == -1.0) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  try {
    (void)steer_plus(init, params_of(2.0, kInf, kInf), broken, random_snr(1, 1),
                     random_snr(1, 2), 0.5);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("(1, -1)") != std::string::npos);
  }
}

TEST_CASE("selection JSON round trip") {
  const auto init = plain_init();
  auto result = steer_plus(init, params_of(2.0, kInf, kInf), random_inr(3),
                           random_snr(3, 1), random_snr(3, 2), 0.4);
  const std::string doc = selection_to_json(result);
  const SelectionResult back = selection_from_json(doc);
  CHECK(back.theta_tx_star_deg == result.theta_tx_star_deg);
  CHECK(back.theta_rx_star_deg == result.theta_rx_star_deg);
  CHECK(back.inr_db == result.inr_db);
  CHECK(back.r_sum == result.r_sum);
  CHECK(back.deviation_deg2 == result.deviation_deg2);
  CHECK(back.fallback_used == result.fallback_used);
  CHECK(back.ledger.inr_measurements == result.ledger.inr_measurements);
  CHECK(back.ledger.cache_hits == result.ledger.cache_hits);

  // steer leaves SNR-dependent fields open until finalize_metrics.
  auto partial = steer(init, params_of(1.0, 0.0), random_inr(3));
  CHECK(std::isnan(partial.r_sum));
  finalize_metrics(partial, random_inr(3), random_snr(3, 1), random_snr(3, 2), 0.4);
  CHECK(std::isfinite(partial.r_sum));
  const SelectionResult back2 = selection_from_json(selection_to_json(partial));
  CHECK(back2.r_sum == partial.r_sum);
}

TEST_CASE("scene-backed solvers agree with the oracle on the lobby scene") {
  const Scene scene = lobby_scene();
  const MeasureFn inr = make_inr_measure(scene, 6);
  const SnrFn dl = make_snr_dl_measure(scene, 0, 6);
  const SnrFn ul = make_snr_ul_measure(scene, 2, 6);
  const Codebook cb_tx = make_codebook(-60, 60, 8, scene.tx_array, 6);
  const Codebook cb_rx = make_codebook(-60, 60, 8, scene.rx_array, 6);
  const InitialSelection init = align_initial(cb_tx, cb_rx, dl, ul);
  const double cl = inr_cl(crosslink_channel(scene, 0, 2), scene.budget);

  const auto params = params_of(3.0, kInf, kInf);
  const auto fast = steer_plus(init, params, inr, dl, ul, cl);
  const auto ref = oracle_exhaustive(init, params, inr, dl, ul, cl);
  CHECK(fast.theta_tx_star_deg == ref.theta_tx_star_deg);
  CHECK(fast.theta_rx_star_deg == ref.theta_rx_star_deg);
  CHECK(fast.r_sum == ref.r_sum);

  const auto sparams = params_of(2.0, 0.0);
  const auto s = steer(init, sparams, inr);
  const auto sref = oracle_exhaustive(init, static_cast<const SteerParams&>(sparams), inr);
  CHECK(s.theta_tx_star_deg == sref.theta_tx_star_deg);
  CHECK(s.theta_rx_star_deg == sref.theta_rx_star_deg);
}
