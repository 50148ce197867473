#include "fdbeam/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdbeam/channel.hpp"
#include "fdbeam/errors.hpp"
#include "kv.hpp"

namespace fdbeam {

namespace {

using kv::expect_tokens;
using kv::fail;
using kv::fmt_num;
using kv::Line;
using kv::parse_double;
using kv::parse_range_spec;
using kv::parse_u64;
using kv::read_lines;

std::vector<double> expand_delta_spec(const Line& l, const std::string& origin) {
  std::vector<double> deltas;
  if (l.tokens.size() == 1 && l.tokens[0].find(':') != std::string::npos) {
    const auto [start, step, stop] = parse_range_spec(l.tokens[0], origin, l.number);
    if (!(step > 0.0) || start > stop) fail(origin, l.number, "bad delta range");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) deltas.push_back(start + i * step);
  } else {
    for (const std::string& tok : l.tokens)
      deltas.push_back(parse_double(tok, origin, l.number));
  }
  if (deltas.empty()) fail(origin, l.number, "delta list must be non-empty");
  return deltas;
}

std::vector<std::pair<int, int>> parse_pairs(const Line& l, const std::string& origin) {
  std::vector<std::pair<int, int>> pairs;
  if (l.tokens.size() == 1 && l.tokens[0] == "all") return pairs;
  for (const std::string& tok : l.tokens) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      fail(origin, l.number, "expected DL:UL pair, got '" + tok + "'");
    pairs.emplace_back(
        static_cast<int>(parse_double(tok.substr(0, colon), origin, l.number)),
        static_cast<int>(parse_double(tok.substr(colon + 1), origin, l.number)));
  }
  return pairs;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  bool saw_version = false;
  bool saw_scene = false;
  for (const Line& l : read_lines(in, path)) {
    auto num = [&](std::size_t i) { return parse_double(l.tokens[i], path, l.number); };
    if (l.key == "schema_version") {
      expect_tokens(l, path, 1);
      if (l.tokens[0] != "1") fail(path, l.number, "unsupported schema_version");
      saw_version = true;
    } else if (l.key == "scene") {
      expect_tokens(l, path, 1);
      cfg.scene_path = l.tokens[0];
      saw_scene = true;
    } else if (l.key == "output_dir") {
      expect_tokens(l, path, 1);
      cfg.output_dir = l.tokens[0];
    } else if (l.key == "deltas") {
      cfg.delta_list_deg = expand_delta_spec(l, path);
    } else if (l.key == "res_deg") {
      expect_tokens(l, path, 1);
      cfg.res_deg = num(0);
    } else if (l.key == "codebook") {
      expect_tokens(l, path, 1);
      const auto [start, step, stop] = parse_range_spec(l.tokens[0], path, l.number);
      cfg.codebook_start_deg = start;
      cfg.codebook_step_deg = step;
      cfg.codebook_stop_deg = stop;
    } else if (l.key == "quantization_bits") {
      expect_tokens(l, path, 1);
      if (l.tokens[0] == "none")
        cfg.quantization_bits.reset();
      else
        cfg.quantization_bits = static_cast<int>(num(0));
    } else if (l.key == "steer_inr_target_db") {
      expect_tokens(l, path, 1);
      cfg.steer_inr_target_db = num(0);
    } else if (l.key == "steer_plus_inr_target_db") {
      expect_tokens(l, path, 1);
      cfg.steer_plus_inr_target_db = num(0);
    } else if (l.key == "steer_plus_se_target") {
      expect_tokens(l, path, 1);
      cfg.steer_plus_se_target = num(0);
    } else if (l.key == "crosslink_inr_approx_db") {
      expect_tokens(l, path, 1);
      cfg.crosslink_inr_approx_db = num(0);
    } else if (l.key == "pairs") {
      cfg.pairs = parse_pairs(l, path);
    } else if (l.key == "seed") {
      expect_tokens(l, path, 1);
      cfg.seed_override = parse_u64(l.tokens[0], path, l.number);
    } else if (l.key == "plots") {
      expect_tokens(l, path, 1);
      if (l.tokens[0] == "true") cfg.plots = true;
      else if (l.tokens[0] == "false") cfg.plots = false;
      else fail(path, l.number, "plots expects true or false");
    } else {
      fail(path, l.number, "unknown key '" + l.key + "'");
    }
  }
  if (!saw_version) throw ConfigError(path + ": missing schema_version");
  if (!saw_scene) throw ConfigError(path + ": missing scene");
  // Relative scene paths resolve against the config file's directory.
  const std::filesystem::path scene_path(cfg.scene_path);
  if (scene_path.is_relative())
    cfg.scene_path = (std::filesystem::path(path).parent_path() / scene_path).string();
  if (!std::filesystem::exists(cfg.scene_path))
    throw ConfigError(path + ": scene file '" + cfg.scene_path + "' does not exist");
  return cfg;
}

ScenarioReport run_scenario_paper(const ExperimentConfig& config, const Scene& scene) {
  if (scene.users.size() < 2)
    throw ConfigError("scenario: scene needs at least two users");
  if (config.delta_list_deg.empty())
    throw ConfigError("scenario: delta list must be non-empty");

  ScenarioReport report;
  report.scene_digest = scene_digest(scene);
  report.seed = scene.seed;

  const Codebook tx_cb = make_codebook(config.codebook_start_deg, config.codebook_stop_deg,
                                       config.codebook_step_deg, scene.tx_array,
                                       config.quantization_bits);
  const Codebook rx_cb = make_codebook(config.codebook_start_deg, config.codebook_stop_deg,
                                       config.codebook_step_deg, scene.rx_array,
                                       config.quantization_bits);
  const MeasureFn inr_fn = make_inr_measure(scene, config.quantization_bits);

  std::vector<SnrFn> dl_fns, ul_fns;
  for (int u = 0; u < static_cast<int>(scene.users.size()); ++u) {
    dl_fns.push_back(make_snr_dl_measure(scene, u, config.quantization_bits));
    ul_fns.push_back(make_snr_ul_measure(scene, u, config.quantization_bits));
  }

  std::vector<std::pair<int, int>> pairs = config.pairs;
  if (pairs.empty()) {
    for (int dl = 0; dl < static_cast<int>(scene.users.size()); ++dl)
      for (int ul = 0; ul < static_cast<int>(scene.users.size()); ++ul)
        if (dl != ul) pairs.emplace_back(dl, ul);
  }

  for (const auto& [dl_user, ul_user] : pairs) {
    if (dl_user == ul_user)
      throw ConfigError("scenario: downlink and uplink user must differ");
    const SnrFn& snr_dl_fn = dl_fns.at(static_cast<std::size_t>(dl_user));
    const SnrFn& snr_ul_fn = ul_fns.at(static_cast<std::size_t>(ul_user));
    const InitialSelection init = align_initial(tx_cb, rx_cb, snr_dl_fn, snr_ul_fn);
    const double capacity = codebook_capacity(init.snr_dl_init, init.snr_ul_init);
    const double cl = config.crosslink_inr_approx_db
                          ? db_to_linear(*config.crosslink_inr_approx_db)
                          : inr_cl(crosslink_channel(scene, dl_user, ul_user),
                                   scene.budget);

    for (double delta : config.delta_list_deg) {
      auto common = [&](const SelectionResult& sel, const char* name) {
        ScenarioRecord rec;
        rec.dl_user = dl_user;
        rec.ul_user = ul_user;
        rec.delta_deg = delta;
        rec.algorithm = name;
        rec.theta_tx_init_deg = init.theta_tx_init_deg;
        rec.theta_rx_init_deg = init.theta_rx_init_deg;
        rec.theta_tx_deg = sel.theta_tx_star_deg;
        rec.theta_rx_deg = sel.theta_rx_star_deg;
        rec.inr_db = sel.inr_db;
        rec.sinr_dl_db = sel.sinr_dl_db;
        rec.sinr_ul_db = sel.sinr_ul_db;
        rec.r_dl = sel.r_dl;
        rec.r_ul = sel.r_ul;
        rec.r_sum = sel.r_sum;
        rec.normalized_se = sel.r_sum / capacity;
        rec.fallback_used = sel.fallback_used;
        rec.ledger = sel.ledger;
        report.records.push_back(std::move(rec));
      };

      SteerParams sp;
      sp.delta_tx_deg = delta;
      sp.delta_rx_deg = delta;
      sp.res_tx_deg = config.res_deg;
      sp.res_rx_deg = config.res_deg;
      sp.inr_target_db = config.steer_inr_target_db;
      SelectionResult s = steer(init, sp, inr_fn);
      finalize_metrics(s, inr_fn, snr_dl_fn, snr_ul_fn, cl);
      common(s, "steer");

      SteerPlusParams spp;
      static_cast<SteerParams&>(spp) = sp;
      spp.inr_target_db = config.steer_plus_inr_target_db;
      spp.se_target_bps_hz = config.steer_plus_se_target;
      common(steer_plus(init, spp, inr_fn, snr_dl_fn, snr_ul_fn, cl), "steer-plus");
    }
  }
  return report;
}

namespace {

constexpr const char* kReportHeader =
    "dl_user,ul_user,delta_deg,algorithm,theta_tx_init_deg,theta_rx_init_deg,"
    "theta_tx_deg,theta_rx_deg,inr_db,sinr_dl_db,sinr_ul_db,r_dl_bps_hz,"
    "r_ul_bps_hz,r_sum_bps_hz,normalized_se,fallback_used,inr_measurements,"
    "snr_dl_measurements,snr_ul_measurements,cache_hits";

}  // namespace

void export_report(const ScenarioReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv_path = (std::filesystem::path(dir) / "report.csv").string();
  std::ofstream csv(csv_path);
  if (!csv) throw DataError("report: cannot write '" + csv_path + "'");
  csv << kReportHeader << "\n";
  for (const ScenarioRecord& r : report.records) {
    csv << r.dl_user << "," << r.ul_user << "," << fmt_num(r.delta_deg) << ","
        << r.algorithm << "," << fmt_num(r.theta_tx_init_deg) << ","
        << fmt_num(r.theta_rx_init_deg) << "," << fmt_num(r.theta_tx_deg) << ","
        << fmt_num(r.theta_rx_deg) << "," << fmt_num(r.inr_db) << ","
        << fmt_num(r.sinr_dl_db) << "," << fmt_num(r.sinr_ul_db) << ","
        << fmt_num(r.r_dl) << "," << fmt_num(r.r_ul) << "," << fmt_num(r.r_sum) << ","
        << fmt_num(r.normalized_se) << "," << (r.fallback_used ? 1 : 0) << ","
        << r.ledger.inr_measurements << "," << r.ledger.snr_dl_measurements << ","
        << r.ledger.snr_ul_measurements << "," << r.ledger.cache_hits << "\n";
  }
  csv.close();

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["scene_digest"] = report.scene_digest;
  j["seed"] = report.seed;
  j["record_count"] = report.records.size();
  double steer_se = 0.0, plus_se = 0.0;
  std::size_t steer_n = 0, plus_n = 0;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const ScenarioRecord& r : report.records) {
    nlohmann::ordered_json rec;
    rec["dl_user"] = r.dl_user;
    rec["ul_user"] = r.ul_user;
    rec["delta_deg"] = r.delta_deg;
    rec["algorithm"] = r.algorithm;
    rec["theta_tx_init_deg"] = r.theta_tx_init_deg;
    rec["theta_rx_init_deg"] = r.theta_rx_init_deg;
    rec["theta_tx_deg"] = r.theta_tx_deg;
    rec["theta_rx_deg"] = r.theta_rx_deg;
    rec["inr_db"] = r.inr_db;
    rec["sinr_dl_db"] = r.sinr_dl_db;
    rec["sinr_ul_db"] = r.sinr_ul_db;
    rec["r_dl_bps_hz"] = r.r_dl;
    rec["r_ul_bps_hz"] = r.r_ul;
    rec["r_sum_bps_hz"] = r.r_sum;
    rec["normalized_se"] = r.normalized_se;
    rec["fallback_used"] = r.fallback_used;
    rec["ledger"] = {{"inr_measurements", r.ledger.inr_measurements},
                     {"snr_dl_measurements", r.ledger.snr_dl_measurements},
                     {"snr_ul_measurements", r.ledger.snr_ul_measurements},
                     {"cache_hits", r.ledger.cache_hits}};
    records.push_back(std::move(rec));
    if (r.algorithm == "steer") {
      steer_se += r.normalized_se;
      ++steer_n;
    } else {
      plus_se += r.normalized_se;
      ++plus_n;
    }
  }
  j["mean_normalized_se"] = {
      {"steer", steer_n ? steer_se / static_cast<double>(steer_n) : 0.0},
      {"steer-plus", plus_n ? plus_se / static_cast<double>(plus_n) : 0.0}};
  j["records"] = std::move(records);
  const std::string json_path = (std::filesystem::path(dir) / "report.json").string();
  std::ofstream js(json_path);
  if (!js) throw DataError("report: cannot write '" + json_path + "'");
  js << j.dump(2) << "\n";
}

std::vector<ScenarioRecord> import_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("report: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kReportHeader)
    throw DataError(path + ": unexpected header");
  std::vector<ScenarioRecord> records;
  std::string raw;
  int line = 1;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = raw.find(',', start);
      fields.push_back(raw.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 20)
      throw DataError(path + ":" + std::to_string(line) + ": expected 20 fields");
    auto num = [&](std::size_t i) { return parse_double(fields[i], path, line); };
    ScenarioRecord r;
    r.dl_user = static_cast<int>(num(0));
    r.ul_user = static_cast<int>(num(1));
    r.delta_deg = num(2);
    r.algorithm = fields[3];
    r.theta_tx_init_deg = num(4);
    r.theta_rx_init_deg = num(5);
    r.theta_tx_deg = num(6);
    r.theta_rx_deg = num(7);
    r.inr_db = num(8);
    r.sinr_dl_db = num(9);
    r.sinr_ul_db = num(10);
    r.r_dl = num(11);
    r.r_ul = num(12);
    r.r_sum = num(13);
    r.normalized_se = num(14);
    r.fallback_used = fields[15] == "1";
    r.ledger.inr_measurements = static_cast<std::int64_t>(num(16));
    r.ledger.snr_dl_measurements = static_cast<std::int64_t>(num(17));
    r.ledger.snr_ul_measurements = static_cast<std::int64_t>(num(18));
    r.ledger.cache_hits = static_cast<std::int64_t>(num(19));
    records.push_back(std::move(r));
  }
  return records;
}

InrMap import_sweep(const std::string& path) { return import_sweep_csv(path); }

}  // namespace fdbeam
