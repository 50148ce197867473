#include "fdbeam/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "fdbeam/errors.hpp"

namespace fdbeam {

namespace {

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double checked_measure(const MeasureFn& inr_fn, double theta_tx, double theta_rx,
                       const char* who) {
  const double v = inr_fn(theta_tx, theta_rx);
  if (!std::isfinite(v) || v < 0.0)
    throw DataError(std::string(who) + ": INR measurement " + fmt_g17(v) + " at (" +
                    fmt_g17(theta_tx) + ", " + fmt_g17(theta_rx) + ")");
  return v;
}

double checked_snr(const SnrFn& fn, double theta, const char* who) {
  const double v = fn(theta);
  if (!std::isfinite(v) || v < 0.0)
    throw DataError(std::string(who) + ": SNR measurement " + fmt_g17(v) + " at " +
                    fmt_g17(theta));
  return v;
}

// Candidate ordering: metric, then (|dtx|, dtx, drx).
bool candidate_less(const Candidate& a, const Candidate& b) {
  return std::make_tuple(a.metric(), std::abs(a.dtx_deg), a.dtx_deg, a.drx_deg) <
         std::make_tuple(b.metric(), std::abs(b.dtx_deg), b.dtx_deg, b.drx_deg);
}

// SNR cache shared by the iterative solver; counts measurements and hits.
class CachedSnr {
 public:
  CachedSnr(const SnrFn& fn, std::int64_t& measured, std::int64_t& hits,
            const char* who)
      : fn_(fn), measured_(measured), hits_(hits), who_(who) {}

  double at(double theta) {
    const auto it = cache_.find(theta);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    const double v = checked_snr(fn_, theta, who_);
    ++measured_;
    cache_.emplace(theta, v);
    return v;
  }

 private:
  const SnrFn& fn_;
  std::int64_t& measured_;
  std::int64_t& hits_;
  const char* who_;
  std::map<double, double> cache_;
};

struct PairRates {
  double sinr_dl = 0.0;
  double sinr_ul = 0.0;
  double r_dl = 0.0;
  double r_ul = 0.0;
  double r_sum = 0.0;
};

PairRates pair_rates(double snr_dl_lin, double snr_ul_lin, double inr_cl_lin,
                     double inr_si_lin) {
  PairRates out;
  out.sinr_dl = sinr(snr_dl_lin, inr_cl_lin);
  out.sinr_ul = sinr(snr_ul_lin, inr_si_lin);
  out.r_dl = rate(out.sinr_dl);
  out.r_ul = rate(out.sinr_ul);
  out.r_sum = out.r_dl + out.r_ul;
  return out;
}

void fill_rate_fields(SelectionResult& r, const PairRates& p) {
  r.sinr_dl_db = linear_to_db_floored(p.sinr_dl);
  r.sinr_ul_db = linear_to_db_floored(p.sinr_ul);
  r.r_dl = p.r_dl;
  r.r_ul = p.r_ul;
  r.r_sum = p.r_sum;
}

}  // namespace

void SteerParams::validate() const {
  if (delta_tx_deg < 0.0 || delta_rx_deg < 0.0)
    throw std::invalid_argument("steer: neighborhood half-widths must be >= 0");
  if (!(res_tx_deg > 0.0) || !(res_rx_deg > 0.0))
    throw std::invalid_argument("steer: resolutions must be > 0");
  if (std::isnan(inr_target_db))
    throw std::invalid_argument("steer: INR target must not be NaN");
}

double beam_align(const Codebook& codebook, const SnrFn& snr_fn) {
  if (codebook.entries.empty())
    throw std::invalid_argument("beam_align: empty codebook");
  double best_angle = codebook.entries.front().angle_deg;
  double best_snr = -1.0;
  for (const CodebookEntry& entry : codebook.entries) {
    const double v = checked_snr(snr_fn, entry.angle_deg, "beam_align");
    if (v > best_snr) {
      best_snr = v;
      best_angle = entry.angle_deg;
    }
  }
  return best_angle;
}

InitialSelection align_initial(const Codebook& tx_codebook, const Codebook& rx_codebook,
                               const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn) {
  InitialSelection init;
  init.theta_tx_init_deg = beam_align(tx_codebook, snr_dl_fn);
  init.theta_rx_init_deg = beam_align(rx_codebook, snr_ul_fn);
  init.snr_dl_init = snr_dl_fn(init.theta_tx_init_deg);
  init.snr_ul_init = snr_ul_fn(init.theta_rx_init_deg);
  return init;
}

std::vector<double> neighborhood_offsets(double delta_deg, double res_deg) {
  if (delta_deg < 0.0) throw std::invalid_argument("offsets: delta must be >= 0");
  if (!(res_deg > 0.0)) throw std::invalid_argument("offsets: resolution must be > 0");
  const int reach = static_cast<int>(std::floor(delta_deg / res_deg + 1e-9));
  std::vector<double> offsets;
  offsets.reserve(static_cast<std::size_t>(2 * reach + 1));
  for (int m = -reach; m <= reach; ++m) offsets.push_back(m * res_deg);
  return offsets;
}

std::vector<Candidate> sorted_candidates(const std::vector<double>& offsets_tx,
                                         const std::vector<double>& offsets_rx) {
  std::vector<Candidate> cands;
  cands.reserve(offsets_tx.size() * offsets_rx.size());
  for (double dtx : offsets_tx)
    for (double drx : offsets_rx) cands.push_back({dtx, drx});
  std::sort(cands.begin(), cands.end(), candidate_less);
  return cands;
}

SelectionResult steer(const InitialSelection& init, const SteerParams& params,
                      const MeasureFn& inr_fn) {
  params.validate();
  const auto cands = sorted_candidates(
      neighborhood_offsets(params.delta_tx_deg, params.res_tx_deg),
      neighborhood_offsets(params.delta_rx_deg, params.res_rx_deg));

  std::vector<double> inr_values(cands.size());
  double grid_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cands.size(); ++k) {
    inr_values[k] = checked_measure(inr_fn, init.theta_tx_init_deg + cands[k].dtx_deg,
                                    init.theta_rx_init_deg + cands[k].drx_deg, "steer");
    grid_min = std::min(grid_min, inr_values[k]);
  }
  const double effective_target = std::max(db_to_linear(params.inr_target_db), grid_min);

  SelectionResult result;
  result.ledger.inr_measurements = static_cast<std::int64_t>(cands.size());
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (inr_values[k] <= effective_target) {
      result.theta_tx_star_deg = init.theta_tx_init_deg + cands[k].dtx_deg;
      result.theta_rx_star_deg = init.theta_rx_init_deg + cands[k].drx_deg;
      result.inr_db = linear_to_db_floored(inr_values[k]);
      result.deviation_deg2 = cands[k].metric();
      return result;
    }
  }
  throw std::logic_error("steer: unreachable (threshold includes the grid minimum)");
}

SelectionResult steer_plus(const InitialSelection& init, const SteerPlusParams& params,
                           const MeasureFn& inr_fn, const SnrFn& snr_dl_fn,
                           const SnrFn& snr_ul_fn, double inr_cl_linear) {
  params.validate();
  if (std::isnan(params.se_target_bps_hz) || params.se_target_bps_hz < 0.0)
    throw std::invalid_argument("steer-plus: SE target must be >= 0");
  const auto cands = sorted_candidates(
      neighborhood_offsets(params.delta_tx_deg, params.res_tx_deg),
      neighborhood_offsets(params.delta_rx_deg, params.res_rx_deg));
  const double inr_target = db_to_linear(params.inr_target_db);

  SelectionResult result;
  CachedSnr dl(snr_dl_fn, result.ledger.snr_dl_measurements, result.ledger.cache_hits,
               "steer-plus");
  CachedSnr ul(snr_ul_fn, result.ledger.snr_ul_measurements, result.ledger.cache_hits,
               "steer-plus");

  // Incumbent starts at the initial pair with a zero sum rate.
  result.theta_tx_star_deg = init.theta_tx_init_deg;
  result.theta_rx_star_deg = init.theta_rx_init_deg;
  bool any_qualified = false;
  bool incumbent_updated = false;
  double best_rsum = 0.0;
  double init_inr_db = 0.0;
  for (const Candidate& c : cands) {
    const double theta_tx = init.theta_tx_init_deg + c.dtx_deg;
    const double theta_rx = init.theta_rx_init_deg + c.drx_deg;
    const double inr_v = checked_measure(inr_fn, theta_tx, theta_rx, "steer-plus");
    ++result.ledger.inr_measurements;
    if (c.dtx_deg == 0.0 && c.drx_deg == 0.0)
      init_inr_db = linear_to_db_floored(inr_v);
    if (inr_v > inr_target) continue;
    any_qualified = true;
    const PairRates rates =
        pair_rates(dl.at(theta_tx), ul.at(theta_rx), inr_cl_linear, inr_v);
    if (rates.r_sum > best_rsum) {
      best_rsum = rates.r_sum;
      incumbent_updated = true;
      result.theta_tx_star_deg = theta_tx;
      result.theta_rx_star_deg = theta_rx;
      result.inr_db = linear_to_db_floored(inr_v);
      result.deviation_deg2 = c.metric();
      fill_rate_fields(result, rates);
      if (best_rsum >= params.se_target_bps_hz) break;
    }
  }

  if (!incumbent_updated) {
    // Either no pair met the INR target (fallback to the initial
    // steering directions) or every qualifying pair had a zero sum
    // rate. Evaluation below is reporting, not measurement.
    result.inr_db = init_inr_db;
    result.deviation_deg2 = 0.0;
    result.fallback_used = !any_qualified;
    const PairRates rates =
        pair_rates(snr_dl_fn(init.theta_tx_init_deg), snr_ul_fn(init.theta_rx_init_deg),
                   inr_cl_linear, inr_fn(init.theta_tx_init_deg, init.theta_rx_init_deg));
    fill_rate_fields(result, rates);
  }
  return result;
}

SelectionResult oracle_exhaustive(const InitialSelection& init, const SteerParams& params,
                                  const MeasureFn& inr_fn) {
  params.validate();
  const auto offsets_tx = neighborhood_offsets(params.delta_tx_deg, params.res_tx_deg);
  const auto offsets_rx = neighborhood_offsets(params.delta_rx_deg, params.res_rx_deg);

  struct Cell {
    Candidate cand;
    double inr = 0.0;
  };
  std::vector<Cell> cells;
  double grid_min = std::numeric_limits<double>::infinity();
  for (double dtx : offsets_tx) {
    for (double drx : offsets_rx) {
      Cell cell;
      cell.cand = {dtx, drx};
      cell.inr = checked_measure(inr_fn, init.theta_tx_init_deg + dtx,
                                 init.theta_rx_init_deg + drx, "oracle");
      grid_min = std::min(grid_min, cell.inr);
      cells.push_back(cell);
    }
  }
  const double effective_target = std::max(db_to_linear(params.inr_target_db), grid_min);

  const Cell* best = nullptr;
  for (const Cell& cell : cells) {
    if (cell.inr > effective_target) continue;
    if (best == nullptr || candidate_less(cell.cand, best->cand)) best = &cell;
  }

  SelectionResult result;
  result.ledger.inr_measurements = static_cast<std::int64_t>(cells.size());
  result.theta_tx_star_deg = init.theta_tx_init_deg + best->cand.dtx_deg;
  result.theta_rx_star_deg = init.theta_rx_init_deg + best->cand.drx_deg;
  result.inr_db = linear_to_db_floored(best->inr);
  result.deviation_deg2 = best->cand.metric();
  return result;
}

SelectionResult oracle_exhaustive(const InitialSelection& init,
                                  const SteerPlusParams& params, const MeasureFn& inr_fn,
                                  const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn,
                                  double inr_cl_linear) {
  params.validate();
  const auto offsets_tx = neighborhood_offsets(params.delta_tx_deg, params.res_tx_deg);
  const auto offsets_rx = neighborhood_offsets(params.delta_rx_deg, params.res_rx_deg);
  const double inr_target = db_to_linear(params.inr_target_db);

  struct Cell {
    Candidate cand;
    double inr = 0.0;
    PairRates rates;
    bool inr_ok = false;
  };
  std::vector<Cell> cells;
  double init_inr = 0.0;
  double se_max = -std::numeric_limits<double>::infinity();
  std::map<double, double> snr_dl_cache, snr_ul_cache;
  auto cached = [](std::map<double, double>& cache, const SnrFn& fn, double theta) {
    const auto it = cache.find(theta);
    if (it != cache.end()) return it->second;
    return cache.emplace(theta, fn(theta)).first->second;
  };

  for (double dtx : offsets_tx) {
    for (double drx : offsets_rx) {
      Cell cell;
      cell.cand = {dtx, drx};
      const double theta_tx = init.theta_tx_init_deg + dtx;
      const double theta_rx = init.theta_rx_init_deg + drx;
      cell.inr = checked_measure(inr_fn, theta_tx, theta_rx, "oracle");
      if (dtx == 0.0 && drx == 0.0) init_inr = cell.inr;
      cell.inr_ok = cell.inr <= inr_target;
      if (cell.inr_ok) {
        cell.rates = pair_rates(cached(snr_dl_cache, snr_dl_fn, theta_tx),
                                cached(snr_ul_cache, snr_ul_fn, theta_rx),
                                inr_cl_linear, cell.inr);
        se_max = std::max(se_max, cell.rates.r_sum);
      }
      cells.push_back(cell);
    }
  }

  SelectionResult result;
  result.ledger.inr_measurements = static_cast<std::int64_t>(cells.size());
  result.ledger.snr_dl_measurements = static_cast<std::int64_t>(snr_dl_cache.size());
  result.ledger.snr_ul_measurements = static_cast<std::int64_t>(snr_ul_cache.size());

  if (!std::isfinite(se_max)) {
    // Infeasible INR constraint: default to the initial pair.
    result.theta_tx_star_deg = init.theta_tx_init_deg;
    result.theta_rx_star_deg = init.theta_rx_init_deg;
    result.inr_db = linear_to_db_floored(init_inr);
    result.fallback_used = true;
    const PairRates rates =
        pair_rates(snr_dl_fn(init.theta_tx_init_deg), snr_ul_fn(init.theta_rx_init_deg),
                   inr_cl_linear, init_inr);
    fill_rate_fields(result, rates);
    return result;
  }

  const double se_needed = std::min(params.se_target_bps_hz, se_max);
  const Cell* best = nullptr;
  for (const Cell& cell : cells) {
    if (!cell.inr_ok || cell.rates.r_sum < se_needed) continue;
    if (best == nullptr || candidate_less(cell.cand, best->cand)) best = &cell;
  }
  result.theta_tx_star_deg = init.theta_tx_init_deg + best->cand.dtx_deg;
  result.theta_rx_star_deg = init.theta_rx_init_deg + best->cand.drx_deg;
  result.inr_db = linear_to_db_floored(best->inr);
  result.deviation_deg2 = best->cand.metric();
  fill_rate_fields(result, best->rates);
  return result;
}

void finalize_metrics(SelectionResult& result, const MeasureFn& inr_fn,
                      const SnrFn& snr_dl_fn, const SnrFn& snr_ul_fn,
                      double inr_cl_linear) {
  const double inr_v =
      inr_fn(result.theta_tx_star_deg, result.theta_rx_star_deg);
  const PairRates rates =
      pair_rates(snr_dl_fn(result.theta_tx_star_deg),
                 snr_ul_fn(result.theta_rx_star_deg), inr_cl_linear, inr_v);
  result.inr_db = linear_to_db_floored(inr_v);
  fill_rate_fields(result, rates);
}

std::string selection_to_json(const SelectionResult& r) {
  nlohmann::ordered_json j;
  j["theta_tx_star_deg"] = r.theta_tx_star_deg;
  j["theta_rx_star_deg"] = r.theta_rx_star_deg;
  j["inr_db"] = r.inr_db;
  j["sinr_dl_db"] = r.sinr_dl_db;
  j["sinr_ul_db"] = r.sinr_ul_db;
  j["r_dl_bps_hz"] = r.r_dl;
  j["r_ul_bps_hz"] = r.r_ul;
  j["r_sum_bps_hz"] = r.r_sum;
  j["deviation_deg2"] = r.deviation_deg2;
  j["fallback_used"] = r.fallback_used;
  j["ledger"] = {{"inr_measurements", r.ledger.inr_measurements},
                 {"snr_dl_measurements", r.ledger.snr_dl_measurements},
                 {"snr_ul_measurements", r.ledger.snr_ul_measurements},
                 {"cache_hits", r.ledger.cache_hits}};
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  SelectionResult r;
  r.theta_tx_star_deg = num("theta_tx_star_deg");
  r.theta_rx_star_deg = num("theta_rx_star_deg");
  r.inr_db = num("inr_db");
  r.sinr_dl_db = num("sinr_dl_db");
  r.sinr_ul_db = num("sinr_ul_db");
  r.r_dl = num("r_dl_bps_hz");
  r.r_ul = num("r_ul_bps_hz");
  r.r_sum = num("r_sum_bps_hz");
  r.deviation_deg2 = num("deviation_deg2");
  r.fallback_used = j.at("fallback_used").get<bool>();
  const auto& ledger = j.at("ledger");
  r.ledger.inr_measurements = ledger.at("inr_measurements").get<std::int64_t>();
  r.ledger.snr_dl_measurements = ledger.at("snr_dl_measurements").get<std::int64_t>();
  r.ledger.snr_ul_measurements = ledger.at("snr_ul_measurements").get<std::int64_t>();
  r.ledger.cache_hits = ledger.at("cache_hits").get<std::int64_t>();
  return r;
}

}  // namespace fdbeam
