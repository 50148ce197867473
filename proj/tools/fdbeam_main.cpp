// fdbeam: full-duplex mmWave beamforming simulator CLI.
//
// Subcommands: sweep, analyze (cdf|neighborhood|reciprocity),
// select (steer|steer-plus), scenario, plot (heatmap|cdf|bars), import.
// Exit codes: 0 success, 2 config error, 3 data error, 4 verification
// mismatch.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "fdbeam/channel.hpp"
#include "fdbeam/errors.hpp"
#include "fdbeam/render.hpp"
#include "fdbeam/scenario.hpp"
#include "fdbeam/scene.hpp"
#include "fdbeam/select.hpp"
#include "fdbeam/sweep.hpp"

namespace {

using namespace fdbeam;

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("FDBEAM_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == nullptr || *end != '\0')
    throw ConfigError("FDBEAM_SEED must be an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

// Flag beats environment beats scene/config file.
std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  return env_seed();
}

std::optional<int> parse_bits(const std::string& text) {
  if (text == "none") return std::nullopt;
  try {
    return std::stoi(text);
  } catch (const std::exception&) {
    throw ConfigError("--bits expects an integer or 'none'");
  }
}

SpatialProfile parse_profile_spec(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("profile spec must be START:STEP:STOP, got '" + spec + "'");
  auto num = [&](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw ConfigError("bad profile number '" + s + "'");
    }
  };
  return make_profile(num(spec.substr(0, c1)), num(spec.substr(c1 + 1, c2 - c1 - 1)),
                      num(spec.substr(c2 + 1)));
}

double parse_target(const std::string& text, const char* what) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + " expects a number or 'inf'");
  }
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

struct SweepArgs {
  std::string scene_path;
  std::string output;
  std::string tx_spec = "-64:1:64";
  std::string rx_spec = "-64:1:64";
  std::string bits = "6";
  std::optional<std::uint64_t> seed;
  double jitter_db = 0.0;
};

int run_sweep_cmd(const SweepArgs& args) {
  const Scene scene = load_scene(args.scene_path, effective_seed(args.seed));
  const auto bits = parse_bits(args.bits);
  const SpatialProfile tx = parse_profile_spec(args.tx_spec);
  const SpatialProfile rx = parse_profile_spec(args.rx_spec);
  InrMap map = run_sweep(make_inr_measure(scene, bits), tx, rx);
  if (args.jitter_db > 0.0) {
    std::mt19937_64 rng(scene.seed);
    for (Eigen::Index i = 0; i < map.values.rows(); ++i)
      for (Eigen::Index j = 0; j < map.values.cols(); ++j)
        map.values(i, j) = perturb_inr(map.values(i, j), args.jitter_db, rng);
  }
  ensure_parent_dir(args.output);
  export_sweep_csv(map, args.output);
  SweepMeta meta;
  meta.tx_profile_spec = args.tx_spec;
  meta.rx_profile_spec = args.rx_spec;
  meta.scene_digest = scene_digest(scene);
  meta.seed = scene.seed;
  meta.beam_bits = args.bits;
  export_sweep_meta(meta, args.output);
  std::cout << "sweep: " << map.tx_profile.size() << "x" << map.rx_profile.size()
            << " cells -> " << args.output << "\n";
  return 0;
}

int run_analyze_cdf(const std::string& input, const std::string& output) {
  const InrMap map = import_sweep_csv(input);
  const EmpiricalCdf c = cdf(map);
  ensure_parent_dir(output);
  std::ofstream out(output);
  if (!out) throw DataError("analyze: cannot write '" + output + "'");
  out << "inr_db,probability\n";
  const auto& samples = c.samples_db();
  for (std::size_t i = 0; i < samples.size(); ++i)
    out << fmt_g17(samples[i]) << ","
        << fmt_g17(static_cast<double>(i + 1) / static_cast<double>(samples.size()))
        << "\n";
  std::cout << "cdf: " << samples.size() << " samples, median "
            << fmt_g17(c.quantile(0.5)) << " dB -> " << output << "\n";
  return 0;
}

int run_analyze_neighborhood(const std::string& input, double nbr_tx, double nbr_rx,
                             const std::string& outdir) {
  const InrMap map = import_sweep_csv(input);
  const NeighborhoodStats stats = stats_maps(map, nbr_tx, nbr_rx);
  std::filesystem::create_directories(outdir);
  const auto dir = std::filesystem::path(outdir);

  InrMap min_map;
  min_map.tx_profile = map.tx_profile;
  min_map.rx_profile = map.rx_profile;
  min_map.values = stats.inr_min;
  export_sweep_csv(min_map, (dir / "inr_min.csv").string());

  std::ofstream rng_out(dir / "inr_rng.csv");
  if (!rng_out) throw DataError("analyze: cannot write inr_rng.csv");
  rng_out << "theta_tx_deg,theta_rx_deg,rng_db\n";
  for (std::size_t i = 0; i < map.tx_profile.size(); ++i)
    for (std::size_t j = 0; j < map.rx_profile.size(); ++j)
      rng_out << fmt_g17(map.tx_profile[i]) << "," << fmt_g17(map.rx_profile[j]) << ","
              << fmt_g17(stats.inr_rng_db(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j)))
              << "\n";

  const EmpiricalCdf min_cdf = cdf_of_stat(stats, StatKind::Min);
  const EmpiricalCdf rng_cdf = cdf_of_stat(stats, StatKind::Range);
  auto dump_cdf = [&](const EmpiricalCdf& c, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("analyze: cannot write " + name);
    out << "value_db,probability\n";
    const auto& samples = c.samples_db();
    for (std::size_t i = 0; i < samples.size(); ++i)
      out << fmt_g17(samples[i]) << ","
          << fmt_g17(static_cast<double>(i + 1) / static_cast<double>(samples.size()))
          << "\n";
  };
  dump_cdf(min_cdf, "min_cdf.csv");
  dump_cdf(rng_cdf, "rng_cdf.csv");

  // Diagnostic echo of the reachable-interference statistic; the
  // measured-system reference point is roughly 30% at a 1-degree shift.
  const double frac_below_0db = min_cdf.probability_at(0.0);
  std::cout << "neighborhood (" << nbr_tx << ", " << nbr_rx << ") deg: "
            << 100.0 * frac_below_0db
            << "% of beam pairs can reach INR <= 0 dB (reference ballpark: >30% "
               "at 1 deg)\n";
  std::cout << "outputs -> " << outdir << "\n";
  return 0;
}

int run_analyze_reciprocity(const std::string& input_a, const std::string& input_b) {
  const InrMap a = import_sweep_csv(input_a);
  const InrMap b = import_sweep_csv(input_b);
  std::cout << "reciprocity: max |dB delta after transpose| = "
            << fmt_g17(reciprocity_delta_db(a, b)) << " dB\n";
  return 0;
}

struct SelectArgs {
  std::string algorithm;
  std::string scene_path;
  std::string dataset;
  int dl_user = 0;
  int ul_user = 1;
  double init_tx = std::numeric_limits<double>::quiet_NaN();
  double init_rx = std::numeric_limits<double>::quiet_NaN();
  double nbr = 3.0;
  double res = 1.0;
  std::string inr_target = "inf";
  std::string se_target = "inf";
  std::string bits = "6";
  std::optional<std::uint64_t> seed;
  bool verify = false;
  std::string output;
};

MeasureFn dataset_measure(const InrMap& map) {
  auto lookup_index = [](const std::vector<double>& angles, double theta) {
    for (std::size_t i = 0; i < angles.size(); ++i)
      if (std::abs(angles[i] - theta) <= 1e-9) return i;
    throw DataError("select: angle " + fmt_g17(theta) + " not present in dataset");
  };
  return [map, lookup_index](double theta_tx, double theta_rx) {
    const auto i = lookup_index(map.tx_profile.angles_deg, theta_tx);
    const auto j = lookup_index(map.rx_profile.angles_deg, theta_rx);
    return map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
}

int run_select_cmd(const SelectArgs& args) {
  const bool plus = args.algorithm == "steer-plus";
  SteerPlusParams params;
  params.delta_tx_deg = args.nbr;
  params.delta_rx_deg = args.nbr;
  params.res_tx_deg = args.res;
  params.res_rx_deg = args.res;
  params.inr_target_db = parse_target(args.inr_target, "--inr-target");
  params.se_target_bps_hz = parse_target(args.se_target, "--se-target");

  MeasureFn inr_fn;
  SnrFn snr_dl_fn, snr_ul_fn;
  InitialSelection init;
  double cl = 0.0;

  if (!args.dataset.empty()) {
    if (plus)
      throw ConfigError("select: steer-plus needs --scene (SNR measurements)");
    if (std::isnan(args.init_tx) || std::isnan(args.init_rx))
      throw ConfigError("select: dataset replay needs --init-tx and --init-rx");
    inr_fn = dataset_measure(import_sweep_csv(args.dataset));
    init.theta_tx_init_deg = args.init_tx;
    init.theta_rx_init_deg = args.init_rx;
  } else if (!args.scene_path.empty()) {
    const Scene scene = load_scene(args.scene_path, effective_seed(args.seed));
    if (args.dl_user == args.ul_user)
      throw ConfigError("select: --dl-user and --ul-user must differ");
    const auto bits = parse_bits(args.bits);
    inr_fn = make_inr_measure(scene, bits);
    snr_dl_fn = make_snr_dl_measure(scene, args.dl_user, bits);
    snr_ul_fn = make_snr_ul_measure(scene, args.ul_user, bits);
    const Codebook tx_cb = make_codebook(-60.0, 60.0, 8.0, scene.tx_array, bits);
    const Codebook rx_cb = make_codebook(-60.0, 60.0, 8.0, scene.rx_array, bits);
    init = align_initial(tx_cb, rx_cb, snr_dl_fn, snr_ul_fn);
    cl = inr_cl(crosslink_channel(scene, args.dl_user, args.ul_user), scene.budget);
  } else {
    throw ConfigError("select: need --scene or --dataset");
  }

  SelectionResult result;
  if (plus) {
    result = steer_plus(init, params, inr_fn, snr_dl_fn, snr_ul_fn, cl);
    if (args.verify) {
      const SelectionResult ref =
          oracle_exhaustive(init, params, inr_fn, snr_dl_fn, snr_ul_fn, cl);
      if (ref.theta_tx_star_deg != result.theta_tx_star_deg ||
          ref.theta_rx_star_deg != result.theta_rx_star_deg ||
          ref.fallback_used != result.fallback_used)
        throw VerifyError("steer-plus disagrees with the exhaustive oracle: got (" +
                          fmt_g17(result.theta_tx_star_deg) + ", " +
                          fmt_g17(result.theta_rx_star_deg) + "), oracle (" +
                          fmt_g17(ref.theta_tx_star_deg) + ", " +
                          fmt_g17(ref.theta_rx_star_deg) + ")");
    }
  } else {
    result = steer(init, static_cast<const SteerParams&>(params), inr_fn);
    if (args.verify) {
      const SelectionResult ref =
          oracle_exhaustive(init, static_cast<const SteerParams&>(params), inr_fn);
      if (ref.theta_tx_star_deg != result.theta_tx_star_deg ||
          ref.theta_rx_star_deg != result.theta_rx_star_deg ||
          ref.deviation_deg2 != result.deviation_deg2)
        throw VerifyError("steer disagrees with the exhaustive oracle");
    }
    if (snr_dl_fn && snr_ul_fn) finalize_metrics(result, inr_fn, snr_dl_fn, snr_ul_fn, cl);
  }

  const std::string doc = selection_to_json(result);
  if (args.output.empty()) {
    std::cout << doc;
  } else {
    ensure_parent_dir(args.output);
    std::ofstream out(args.output);
    if (!out) throw DataError("select: cannot write '" + args.output + "'");
    out << doc;
    std::cout << "selection -> " << args.output << "\n";
  }
  return 0;
}

struct ScenarioArgs {
  std::string config_path;
  std::string scene_path;
  std::string output;
  std::optional<std::uint64_t> seed;
};

int run_scenario_cmd(const ScenarioArgs& args) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = parse_config(args.config_path);
  } else if (!args.scene_path.empty()) {
    config.scene_path = args.scene_path;
  } else {
    throw ConfigError("scenario: need --config or --scene");
  }
  if (!args.output.empty()) config.output_dir = args.output;
  auto seed = effective_seed(args.seed);
  if (!seed) seed = config.seed_override;
  const Scene scene = load_scene(config.scene_path, seed);
  const ScenarioReport report = run_scenario_paper(config, scene);
  export_report(report, config.output_dir);

  if (config.plots) {
    const auto dir = std::filesystem::path(config.output_dir);
    const MeasureFn inr_fn = make_inr_measure(scene, config.quantization_bits);
    const InrMap map = run_sweep(inr_fn, make_profile(-64, 1, 64), make_profile(-64, 1, 64));
    export_sweep_csv(map, (dir / "sweep.csv").string());
    render_heatmap(map, (dir / "sweep_heatmap.svg").string());
    render_cdf(cdf(map), (dir / "sweep_cdf.svg").string());
    render_bars(report.records, "steer-plus", (dir / "bars_steer_plus.svg").string());
    render_bars(report.records, "steer", (dir / "bars_steer.svg").string());
  }
  std::cout << "scenario: " << report.records.size() << " records -> "
            << config.output_dir << "\n";
  return 0;
}

int run_plot_cmd(const std::string& kind, const std::string& input,
                 const std::string& output, double vmin, double vmax,
                 const std::string& algorithm) {
  ensure_parent_dir(output);
  if (kind == "heatmap") {
    HeatmapOptions options;
    options.vmin_db = vmin;
    options.vmax_db = vmax;
    render_heatmap(import_sweep_csv(input), output, options);
  } else if (kind == "cdf") {
    render_cdf(cdf(import_sweep_csv(input)), output);
  } else if (kind == "bars") {
    render_bars(import_report_csv(input), algorithm, output);
  } else {
    throw ConfigError("plot: unknown kind '" + kind + "'");
  }
  std::cout << "plot " << kind << " -> " << output << "\n";
  return 0;
}

int run_import_cmd(const std::string& input) {
  const InrMap map = import_sweep(input);
  const EmpiricalCdf c = cdf(map);
  std::cout << "import: " << map.tx_profile.size() << "x" << map.rx_profile.size()
            << " = " << map.tx_profile.size() * map.rx_profile.size()
            << " cells, tx [" << fmt_g17(map.tx_profile.angles_deg.front()) << ", "
            << fmt_g17(map.tx_profile.angles_deg.back()) << "] deg, median "
            << fmt_g17(c.quantile(0.5)) << " dB\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"full-duplex mmWave beamforming simulator"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "exhaustive tx/rx beam sweep");
  sweep_cmd->add_option("--scene", sweep_args.scene_path)->required();
  sweep_cmd->add_option("--output", sweep_args.output)->required();
  sweep_cmd->add_option("--tx-profile", sweep_args.tx_spec);
  sweep_cmd->add_option("--rx-profile", sweep_args.rx_spec);
  sweep_cmd->add_option("--bits", sweep_args.bits);
  sweep_cmd->add_option("--seed", sweep_args.seed);
  sweep_cmd->add_option("--jitter-db", sweep_args.jitter_db);

  auto* analyze_cmd = app.add_subcommand("analyze", "sweep dataset analysis");
  analyze_cmd->require_subcommand(1);
  std::string an_input, an_input_b, an_output = "analysis";
  double an_nbr_tx = 1.0, an_nbr_rx = 1.0;
  auto* cdf_cmd = analyze_cmd->add_subcommand("cdf", "empirical CDF of a sweep");
  cdf_cmd->add_option("--input", an_input)->required();
  cdf_cmd->add_option("--output", an_output)->required();
  auto* nbr_cmd =
      analyze_cmd->add_subcommand("neighborhood", "spatial neighborhood min/range maps");
  nbr_cmd->add_option("--input", an_input)->required();
  nbr_cmd->add_option("--nbr", an_nbr_tx);
  nbr_cmd->add_option("--nbr-rx", an_nbr_rx);
  nbr_cmd->add_option("--output", an_output);
  auto* rec_cmd =
      analyze_cmd->add_subcommand("reciprocity", "compare a sweep with a role-swapped one");
  rec_cmd->add_option("--input", an_input)->required();
  rec_cmd->add_option("--input-b", an_input_b)->required();

  SelectArgs select_args;
  auto* select_cmd = app.add_subcommand("select", "run a beam-selection solver");
  select_cmd->add_option("algorithm", select_args.algorithm)
      ->required()
      ->check(CLI::IsMember({"steer", "steer-plus"}));
  select_cmd->add_option("--scene", select_args.scene_path);
  select_cmd->add_option("--dataset", select_args.dataset);
  select_cmd->add_option("--dl-user", select_args.dl_user);
  select_cmd->add_option("--ul-user", select_args.ul_user);
  select_cmd->add_option("--init-tx", select_args.init_tx);
  select_cmd->add_option("--init-rx", select_args.init_rx);
  select_cmd->add_option("--nbr", select_args.nbr);
  select_cmd->add_option("--res", select_args.res);
  select_cmd->add_option("--inr-target", select_args.inr_target);
  select_cmd->add_option("--se-target", select_args.se_target);
  select_cmd->add_option("--bits", select_args.bits);
  select_cmd->add_option("--seed", select_args.seed);
  select_cmd->add_flag("--verify", select_args.verify);
  select_cmd->add_option("--output", select_args.output);

  ScenarioArgs scenario_args;
  auto* scenario_cmd = app.add_subcommand("scenario", "full multi-user evaluation");
  scenario_cmd->add_option("--config", scenario_args.config_path);
  scenario_cmd->add_option("--scene", scenario_args.scene_path);
  scenario_cmd->add_option("--output", scenario_args.output);
  scenario_cmd->add_option("--seed", scenario_args.seed);

  std::string plot_kind, plot_input, plot_output, plot_alg = "steer-plus";
  double plot_vmin = -20.0, plot_vmax = 30.0;
  auto* plot_cmd = app.add_subcommand("plot", "render a figure from exported data");
  plot_cmd->add_option("kind", plot_kind)
      ->required()
      ->check(CLI::IsMember({"heatmap", "cdf", "bars"}));
  plot_cmd->add_option("--input", plot_input)->required();
  plot_cmd->add_option("--output", plot_output)->required();
  plot_cmd->add_option("--vmin", plot_vmin);
  plot_cmd->add_option("--vmax", plot_vmax);
  plot_cmd->add_option("--algorithm", plot_alg);

  std::string import_input;
  auto* import_cmd = app.add_subcommand("import", "validate an external sweep dataset");
  import_cmd->add_option("--input", import_input)->required();

  try {
    app.parse(argc, argv);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_args);
    if (analyze_cmd->parsed()) {
      if (cdf_cmd->parsed()) return run_analyze_cdf(an_input, an_output);
      if (nbr_cmd->parsed())
        return run_analyze_neighborhood(an_input, an_nbr_tx, an_nbr_rx, an_output);
      if (rec_cmd->parsed()) return run_analyze_reciprocity(an_input, an_input_b);
    }
    if (select_cmd->parsed()) return run_select_cmd(select_args);
    if (scenario_cmd->parsed()) return run_scenario_cmd(scenario_args);
    if (plot_cmd->parsed())
      return run_plot_cmd(plot_kind, plot_input, plot_output, plot_vmin, plot_vmax,
                          plot_alg);
    if (import_cmd->parsed()) return run_import_cmd(import_input);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const VerifyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
