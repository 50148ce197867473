#include "fdbeam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fdbeam/errors.hpp"
#include "kv.hpp"

namespace fdbeam {

namespace {

using kv::expect_tokens;
using kv::fail;
using kv::fmt_num;
using kv::Line;
using kv::parse_double;
using kv::parse_index;
using kv::parse_u64;
using kv::read_lines;
using kv::split_key;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x00000100000001B3ull;
  }
  return h;
}

template <class T>
std::vector<T> densify(const std::map<std::size_t, T>& items, const std::string& what,
                       const std::string& origin) {
  std::vector<T> out;
  out.reserve(items.size());
  std::size_t expected = 0;
  for (const auto& [idx, value] : items) {
    if (idx != expected)
      throw ConfigError(origin + ": " + what + " indices must be dense from 0 (missing " +
                        what + "." + std::to_string(expected) + ")");
    out.push_back(value);
    ++expected;
  }
  return out;
}

}  // namespace

void Scene::validate() const {
  if (!(carrier_hz > 0.0)) throw ConfigError("scene: carrier_hz must be > 0");
  if (tx_array.num_elements < 1 || rx_array.num_elements < 1)
    throw ConfigError("scene: arrays need at least one element");
  if (!(tx_array.spacing_wavelengths > 0.0) || !(rx_array.spacing_wavelengths > 0.0))
    throw ConfigError("scene: element spacing must be > 0");
  if (!((tx_array.pose.position - rx_array.pose.position).norm() > 0.0))
    throw ConfigError("scene: tx and rx array centers must not coincide");
  for (std::size_t k = 0; k < scatterers.size(); ++k)
    if (!(scatterers[k].range_m > 0.0))
      throw ConfigError("scene: scatterer." + std::to_string(k) + " range must be > 0");
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (!(users[u].range_m > 0.0))
      throw ConfigError("scene: user." + std::to_string(u) + " range must be > 0");
    for (const NlosRay& ray : users[u].nlos_rays)
      if (ray.gain_db > users[u].los_gain_db)
        throw ConfigError("scene: user." + std::to_string(u) +
                          " NLOS ray gain exceeds LOS gain");
  }
  budget.validate();
}

double nlos_phase_from_seed(std::uint64_t seed, std::size_t user_index,
                            std::size_t ray_index) {
  std::uint64_t state =
      seed ^ (0x00000100000001B3ull * (user_index * 4096 + ray_index + 1));
  return 2.0 * kPi * unit_double(splitmix64(state));
}

Scene parse_scene(std::istream& in, const std::string& origin,
                  std::optional<std::uint64_t> seed_override) {
  Scene scene;
  struct PendingRay {
    NlosRay ray;
    bool has_phase = false;
  };
  std::map<std::size_t, Scatterer> scatterers;
  std::map<std::size_t, UserNode> users;
  std::map<std::size_t, std::map<std::size_t, PendingRay>> rays;
  bool saw_version = false;

  for (const Line& l : read_lines(in, origin)) {
    const auto parts = split_key(l.key);
    auto num = [&](std::size_t i) { return parse_double(l.tokens[i], origin, l.number); };

    if (l.key == "schema_version") {
      expect_tokens(l, origin, 1);
      if (l.tokens[0] != "1") fail(origin, l.number, "unsupported schema_version");
      saw_version = true;
    } else if (l.key == "carrier_hz") {
      expect_tokens(l, origin, 1);
      scene.carrier_hz = num(0);
    } else if (l.key == "seed") {
      expect_tokens(l, origin, 1);
      scene.seed = parse_u64(l.tokens[0], origin, l.number);
    } else if (l.key == "direct_coupling_gain_db") {
      expect_tokens(l, origin, 1);
      scene.direct_coupling_gain_db = num(0);
    } else if (l.key == "crosslink_gain_db") {
      expect_tokens(l, origin, 1);
      scene.crosslink_gain_db = num(0);
    } else if (parts.size() == 2 && (parts[0] == "tx_array" || parts[0] == "rx_array")) {
      ArrayGeometry& arr = parts[0] == "tx_array" ? scene.tx_array : scene.rx_array;
      if (parts[1] == "num_elements") {
        expect_tokens(l, origin, 1);
        arr.num_elements = static_cast<int>(num(0));
      } else if (parts[1] == "spacing_wavelengths") {
        expect_tokens(l, origin, 1);
        arr.spacing_wavelengths = num(0);
      } else if (parts[1] == "position_m") {
        expect_tokens(l, origin, 3);
        arr.pose.position = {num(0), num(1), num(2)};
      } else if (parts[1] == "boresight_deg") {
        expect_tokens(l, origin, 1);
        arr.pose.boresight_deg = num(0);
      } else {
        fail(origin, l.number, "unknown key '" + l.key + "'");
      }
    } else if (parts.size() == 2 && parts[0] == "budget") {
      expect_tokens(l, origin, 1);
      if (parts[1] == "p_bs_dbm") scene.budget.p_bs_dbm = num(0);
      else if (parts[1] == "p_ue_dbm") scene.budget.p_ue_dbm = num(0);
      else if (parts[1] == "noise_bs_dbm") scene.budget.noise_bs_dbm = num(0);
      else if (parts[1] == "noise_ue_dbm") scene.budget.noise_ue_dbm = num(0);
      else fail(origin, l.number, "unknown key '" + l.key + "'");
    } else if (parts.size() == 2 && parts[0] == "scatterer") {
      const auto idx = parse_index(parts[1]);
      if (!idx) fail(origin, l.number, "unknown key '" + l.key + "'");
      expect_tokens(l, origin, 3);
      scatterers[*idx] = {num(0), num(1), num(2)};
    } else if (parts.size() == 2 && parts[0] == "user") {
      const auto idx = parse_index(parts[1]);
      if (!idx) fail(origin, l.number, "unknown key '" + l.key + "'");
      expect_tokens(l, origin, 3);
      UserNode user;
      user.azimuth_deg = num(0);
      user.range_m = num(1);
      user.los_gain_db = num(2);
      users[*idx] = user;
    } else if (parts.size() == 4 && parts[0] == "user" && parts[2] == "nlos") {
      const auto uidx = parse_index(parts[1]);
      const auto ridx = parse_index(parts[3]);
      if (!uidx || !ridx) fail(origin, l.number, "unknown key '" + l.key + "'");
      if (l.tokens.size() != 2 && l.tokens.size() != 3)
        fail(origin, l.number, "key '" + l.key + "' expects 2 or 3 values");
      PendingRay pr;
      pr.ray.azimuth_deg = num(0);
      pr.ray.gain_db = num(1);
      if (l.tokens.size() == 3) {
        pr.ray.phase_rad = num(2);
        pr.has_phase = true;
      }
      rays[*uidx][*ridx] = pr;
    } else {
      fail(origin, l.number, "unknown key '" + l.key + "'");
    }
  }

  if (!saw_version) throw ConfigError(origin + ": missing schema_version");
  if (seed_override) scene.seed = *seed_override;
  scene.scatterers = densify(scatterers, "scatterer", origin);
  scene.users = densify(users, "user", origin);
  for (auto& [uidx, user_rays] : rays) {
    if (uidx >= scene.users.size())
      throw ConfigError(origin + ": user." + std::to_string(uidx) +
                        ".nlos.* given but user." + std::to_string(uidx) + " is not");
    auto dense = densify(user_rays, "user." + std::to_string(uidx) + ".nlos", origin);
    for (std::size_t r = 0; r < dense.size(); ++r) {
      NlosRay ray = dense[r].ray;
      if (!dense[r].has_phase)
        ray.phase_rad = nlos_phase_from_seed(scene.seed, uidx, r);
      scene.users[uidx].nlos_rays.push_back(ray);
    }
  }
  scene.validate();
  return scene;
}

Scene load_scene(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scene: cannot open '" + path + "'");
  return parse_scene(in, path, seed_override);
}

void save_scene(const Scene& scene, std::ostream& out) {
  out << "# fdbeam scene\n";
  out << "schema_version = 1\n";
  out << "carrier_hz = " << fmt_num(scene.carrier_hz) << "\n";
  out << "seed = " << scene.seed << "\n";
  out << "direct_coupling_gain_db = " << fmt_num(scene.direct_coupling_gain_db) << "\n";
  out << "crosslink_gain_db = " << fmt_num(scene.crosslink_gain_db) << "\n";
  const auto dump_array = [&](const char* name, const ArrayGeometry& arr) {
    out << name << ".num_elements = " << arr.num_elements << "\n";
    out << name << ".spacing_wavelengths = " << fmt_num(arr.spacing_wavelengths) << "\n";
    out << name << ".position_m = " << fmt_num(arr.pose.position.x()) << " "
        << fmt_num(arr.pose.position.y()) << " " << fmt_num(arr.pose.position.z())
        << "\n";
    out << name << ".boresight_deg = " << fmt_num(arr.pose.boresight_deg) << "\n";
  };
  dump_array("tx_array", scene.tx_array);
  dump_array("rx_array", scene.rx_array);
  out << "budget.p_bs_dbm = " << fmt_num(scene.budget.p_bs_dbm) << "\n";
  out << "budget.p_ue_dbm = " << fmt_num(scene.budget.p_ue_dbm) << "\n";
  out << "budget.noise_bs_dbm = " << fmt_num(scene.budget.noise_bs_dbm) << "\n";
  out << "budget.noise_ue_dbm = " << fmt_num(scene.budget.noise_ue_dbm) << "\n";
  for (std::size_t k = 0; k < scene.scatterers.size(); ++k) {
    const Scatterer& s = scene.scatterers[k];
    out << "scatterer." << k << " = " << fmt_num(s.azimuth_deg) << " "
        << fmt_num(s.range_m) << " " << fmt_num(s.reflection_gain_db) << "\n";
  }
  for (std::size_t u = 0; u < scene.users.size(); ++u) {
    const UserNode& user = scene.users[u];
    out << "user." << u << " = " << fmt_num(user.azimuth_deg) << " "
        << fmt_num(user.range_m) << " " << fmt_num(user.los_gain_db) << "\n";
    for (std::size_t r = 0; r < user.nlos_rays.size(); ++r) {
      const NlosRay& ray = user.nlos_rays[r];
      out << "user." << u << ".nlos." << r << " = " << fmt_num(ray.azimuth_deg) << " "
          << fmt_num(ray.gain_db) << " " << fmt_num(ray.phase_rad) << "\n";
    }
  }
}

std::string save_scene_string(const Scene& scene) {
  std::ostringstream out;
  save_scene(scene, out);
  return out.str();
}

std::string scene_digest(const Scene& scene) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(save_scene_string(scene))));
  return buf;
}

Scene lobby_scene() {
  Scene s;
  s.seed = 1;
  s.tx_array.pose.position = {0.0, -0.05, 0.0};
  s.rx_array.pose.position = {0.0, 0.05, 0.0};
  s.scatterers = {{-20.0, 3.5, -2.0}, {12.0, 5.0, -4.0}, {45.0, 2.5, -6.0}};
  s.users = {{-50.0, 4.0, 8.0, {{-10.0, -0.5, 0.0}}},
             {-20.0, 4.0, 7.0, {{35.0, -1.0, 0.0}}},
             {20.0, 4.0, 8.0, {{-5.0, -2.0, 0.0}}},
             {50.0, 4.0, 7.0, {{8.0, -3.0, 0.0}}}};
  for (std::size_t u = 0; u < s.users.size(); ++u)
    for (std::size_t r = 0; r < s.users[u].nlos_rays.size(); ++r)
      s.users[u].nlos_rays[r].phase_rad = nlos_phase_from_seed(s.seed, u, r);
  s.validate();
  return s;
}

Scene lab_scene() {
  Scene s;
  s.seed = 2;
  s.direct_coupling_gain_db = 0.0;
  s.tx_array.pose.position = {0.0, -0.1, 0.0};
  s.rx_array.pose.position = {0.0, 0.1, 0.0};
  s.scatterers = {{-35.0, 2.0, -1.0}, {5.0, 3.0, -2.0}, {25.0, 1.8, -3.0},
                  {55.0, 4.0, -5.0}};
  s.users = {{-45.0, 3.0, 8.0, {{-25.0, -2.0, 0.0}}},
             {-15.0, 3.5, 7.0, {{10.0, -1.5, 0.0}}},
             {25.0, 3.0, 8.0, {{40.0, -2.5, 0.0}}},
             {55.0, 3.5, 7.0, {{30.0, -3.0, 0.0}}}};
  for (std::size_t u = 0; u < s.users.size(); ++u)
    for (std::size_t r = 0; r < s.users[u].nlos_rays.size(); ++r)
      s.users[u].nlos_rays[r].phase_rad = nlos_phase_from_seed(s.seed, u, r);
  s.validate();
  return s;
}

}  // namespace fdbeam
