#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fdbeam/channel.hpp"
#include "fdbeam/errors.hpp"
#include "fdbeam/render.hpp"
#include "fdbeam/scenario.hpp"

using namespace fdbeam;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string write_config(const std::string& body, const std::string& name) {
  const auto dir = temp_dir("fdbeam_cfg");
  const auto path = dir / name;
  std::ofstream out(path);
  out << "schema_version = 1\n";
  out << "scene = " << std::string(FDBEAM_SCENES_DIR) << "/lobby.scene\n";
  out << body;
  return path.string();
}

ExperimentConfig quick_config(std::vector<double> deltas = {0.0, 3.0}) {
  ExperimentConfig cfg;
  cfg.delta_list_deg = std::move(deltas);
  return cfg;
}

}  // namespace

TEST_CASE("scene files match the built-in scenes") {
  const Scene file_lobby =
      load_scene(std::string(FDBEAM_SCENES_DIR) + "/lobby.scene");
  const Scene builtin = lobby_scene();
  CHECK(save_scene_string(file_lobby) == save_scene_string(builtin));
  CHECK(scene_digest(file_lobby) == scene_digest(builtin));

  const Scene file_lab = load_scene(std::string(FDBEAM_SCENES_DIR) + "/lab.scene");
  CHECK(save_scene_string(file_lab) == save_scene_string(lab_scene()));
}

TEST_CASE("scene save/load round trip and seed override") {
  Scene s = lab_scene();
  std::ostringstream out;
  save_scene(s, out);
  std::istringstream in(out.str());
  const Scene back = parse_scene(in, "mem");
  CHECK(save_scene_string(back) == save_scene_string(s));

  // Overriding the seed re-resolves the open NLOS phases.
  std::istringstream in_lobby(slurp(std::string(FDBEAM_SCENES_DIR) + "/lobby.scene"));
  const Scene reseeded = parse_scene(in_lobby, "mem", 99);
  CHECK(reseeded.seed == 99);
  CHECK(reseeded.users[0].nlos_rays[0].phase_rad ==
        nlos_phase_from_seed(99, 0, 0));
}

TEST_CASE("scene parser rejects unknown keys and bad structure") {
  auto parse_text = [](const std::string& text) {
    std::istringstream in(text);
    return parse_scene(in, "mem");
  };
  CHECK_THROWS_WITH_AS(
      (void)parse_text("schema_version = 1\nfoo = 1\n"),
      doctest::Contains("unknown key 'foo'"), ConfigError);
  CHECK_THROWS_WITH_AS((void)parse_text("carrier_hz = 60e9\n"),
                       doctest::Contains("schema_version"), ConfigError);
  CHECK_THROWS_AS((void)parse_text("schema_version = 1\nscatterer.1 = 0 1 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)parse_text("schema_version = 1\nuser.0 = 0 4 0\nuser.0.nlos.0 = 0 5\n"),
      ConfigError);  // NLOS gain above LOS
  CHECK_THROWS_AS((void)parse_text("schema_version = 1\ncarrier_hz = -1\n"),
                  ConfigError);
}

TEST_CASE("parse_config: defaults, ranges, unknown keys") {
  const ExperimentConfig minimal = parse_config(write_config("", "minimal.cfg"));
  CHECK(minimal.delta_list_deg.size() == 7);
  CHECK(minimal.codebook_step_deg == 8.0);
  CHECK(minimal.quantization_bits == 6);
  CHECK(minimal.steer_inr_target_db == 0.0);
  CHECK(std::isinf(minimal.steer_plus_se_target));

  const ExperimentConfig ranged =
      parse_config(write_config("deltas = 0:1:6\n", "range.cfg"));
  CHECK(ranged.delta_list_deg == std::vector<double>{0, 1, 2, 3, 4, 5, 6});

  const ExperimentConfig listed =
      parse_config(write_config("deltas = 0 2 6\npairs = 0:2 3:1\n", "list.cfg"));
  CHECK(listed.delta_list_deg == std::vector<double>{0, 2, 6});
  REQUIRE(listed.pairs.size() == 2);
  CHECK(listed.pairs[0] == std::pair{0, 2});

  CHECK_THROWS_WITH_AS(
      (void)parse_config(write_config("frobnicate = yes\n", "bad.cfg")),
      doctest::Contains("unknown key 'frobnicate'"), ConfigError);
  CHECK_THROWS_AS(
      (void)parse_config(write_config("scene = missing.scene\n", "nofile.cfg")),
      ConfigError);
}

TEST_CASE("scenario cardinality and record layout") {
  const Scene scene = lobby_scene();
  const ScenarioReport report = run_scenario_paper(quick_config(), scene);
  CHECK(report.records.size() == 12 * 2 * 2);  // pairs x deltas x algorithms
  for (const auto& rec : report.records) {
    CHECK(rec.dl_user != rec.ul_user);
    CHECK(rec.normalized_se >= 0.0);
    CHECK((rec.algorithm == "steer" || rec.algorithm == "steer-plus"));
  }
}

TEST_CASE("scenario: delta 0 makes the two solvers identical") {
  const Scene scene = lobby_scene();
  const ScenarioReport report = run_scenario_paper(quick_config({0.0}), scene);
  REQUIRE(report.records.size() == 24);
  for (std::size_t k = 0; k < report.records.size(); k += 2) {
    const auto& a = report.records[k];
    const auto& b = report.records[k + 1];
    CHECK(a.theta_tx_deg == b.theta_tx_deg);
    CHECK(a.theta_rx_deg == b.theta_rx_deg);
    CHECK(a.r_sum == doctest::Approx(b.r_sum).epsilon(1e-12));
  }
}

TEST_CASE("scenario: rate-maximizing records are monotone in delta per pair") {
  const Scene scene = lobby_scene();
  const ScenarioReport report = run_scenario_paper(quick_config({0.0, 2.0, 4.0}), scene);
  std::map<std::pair<int, int>, double> prev;
  for (const auto& rec : report.records) {
    if (rec.algorithm != "steer-plus") continue;
    const auto key = std::pair{rec.dl_user, rec.ul_user};
    if (prev.count(key)) CHECK(rec.normalized_se >= prev[key] - 1e-12);
    prev[key] = rec.normalized_se;
  }
}

TEST_CASE("report export: determinism, empty report, CSV round trip") {
  const Scene scene = lobby_scene();
  const ScenarioReport report = run_scenario_paper(quick_config(), scene);
  const auto dir_a = temp_dir("fdbeam_report_a");
  const auto dir_b = temp_dir("fdbeam_report_b");
  export_report(report, dir_a.string());
  const ScenarioReport again = run_scenario_paper(quick_config(), scene);
  export_report(again, dir_b.string());
  CHECK(slurp(dir_a / "report.csv") == slurp(dir_b / "report.csv"));
  CHECK(slurp(dir_a / "report.json") == slurp(dir_b / "report.json"));

  const auto records = import_report_csv((dir_a / "report.csv").string());
  REQUIRE(records.size() == report.records.size());
  CHECK(records[5].r_sum == report.records[5].r_sum);
  CHECK(records[5].ledger.inr_measurements == report.records[5].ledger.inr_measurements);

  ScenarioReport empty;
  export_report(empty, dir_a.string());
  const std::string csv = slurp(dir_a / "report.csv");
  CHECK(csv.find("dl_user,ul_user") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);  // header only
}

TEST_CASE("import_sweep: paper-shaped dataset and identity round trip") {
  const auto dir = temp_dir("fdbeam_import");
  const SpatialProfile p = make_profile(-64.0, 1.0, 64.0);
  const InrMap map =
      run_sweep([](double t, double r) { return db_to_linear(0.01 * t - 0.02 * r); },
                p, p);
  const std::string path = (dir / "paper_shape.csv").string();
  export_sweep_csv(map, path);
  const InrMap back = import_sweep(path);
  CHECK(back.values.size() == 16641);
  CHECK(back.tx_profile.angles_deg == map.tx_profile.angles_deg);

  const std::string path2 = (dir / "paper_shape2.csv").string();
  export_sweep_csv(back, path2);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("render: heatmap, cdf, and grouped bars emit well-formed SVG") {
  const auto dir = temp_dir("fdbeam_render");

  const InrMap flat = run_sweep([](double, double) { return 1.0; },
                                make_profile(-10, 1, 10), make_profile(-10, 1, 10));
  render_heatmap(flat, (dir / "heat.svg").string());
  const std::string heat = slurp(dir / "heat.svg");
  CHECK(heat.find("<svg") == 0);
  CHECK(heat.find("theta_rx (deg)") != std::string::npos);
  CHECK(heat.rfind("</svg>\n") == heat.size() - 7);

  const EmpiricalCdf two({0.0, 0.0, 10.0, 10.0});
  render_cdf(two, (dir / "cdf.svg").string());
  const std::string cdf_svg = slurp(dir / "cdf.svg");
  CHECK(cdf_svg.find("<polyline") != std::string::npos);

  // 12 pairs x 3 deltas -> 36 bars (+ background and frame rects).
  const Scene scene = lobby_scene();
  const ScenarioReport report =
      run_scenario_paper(quick_config({0.0, 2.0, 4.0}), scene);
  render_bars(report.records, "steer-plus", (dir / "bars.svg").string());
  const std::string bars = slurp(dir / "bars.svg");
  std::size_t rects = 0;
  for (std::size_t at = bars.find("<rect"); at != std::string::npos;
       at = bars.find("<rect", at + 1))
    ++rects;
  CHECK(rects == 36 + 2);
  CHECK_THROWS_AS(render_bars(report.records, "nope", (dir / "x.svg").string()),
                  DataError);
}

TEST_CASE("scenario honors explicit pair lists and user-count guard") {
  const Scene scene = lobby_scene();
  ExperimentConfig cfg = quick_config({1.0});
  cfg.pairs = {{0, 1}, {2, 3}};
  const ScenarioReport report = run_scenario_paper(cfg, scene);
  CHECK(report.records.size() == 2 * 1 * 2);

  Scene lonely = scene;
  lonely.users.resize(1);
  CHECK_THROWS_AS((void)run_scenario_paper(cfg, lonely), ConfigError);
}
