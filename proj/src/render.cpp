#include "fdbeam/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fdbeam/errors.hpp"

namespace fdbeam {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Compact viridis-like ramp, linearly interpolated.
struct Rgb {
  double r, g, b;
};

Rgb colormap(double t) {
  static const Rgb stops[] = {{0.267, 0.005, 0.329}, {0.283, 0.141, 0.458},
                              {0.254, 0.265, 0.530}, {0.207, 0.372, 0.553},
                              {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
                              {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441},
                              {0.478, 0.821, 0.318}, {0.741, 0.873, 0.150},
                              {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * 10.0;
  const int i = std::min(9, static_cast<int>(x));
  const double f = x - i;
  return {stops[i].r + f * (stops[i + 1].r - stops[i].r),
          stops[i].g + f * (stops[i + 1].g - stops[i].g),
          stops[i].b + f * (stops[i + 1].b - stops[i].b)};
}

std::string color_hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(c.r * 255.0)),
                static_cast<int>(std::lround(c.g * 255.0)),
                static_cast<int>(std::lround(c.b * 255.0)));
  return buf;
}

std::ofstream open_svg(const std::string& path, int width, int height) {
  std::ofstream out(path);
  if (!out) throw DataError("render: cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  return out;
}

void text(std::ofstream& out, double x, double y, const std::string& s,
          const std::string& anchor = "middle", int size = 12) {
  out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\""
      << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\">" << s
      << "</text>\n";
}

}  // namespace

void render_heatmap(const InrMap& map, const std::string& path,
                    const HeatmapOptions& options) {
  const int plot = 480, margin_l = 70, margin_t = 40, margin_b = 60, margin_r = 90;
  const int width = margin_l + plot + margin_r;
  const int height = margin_t + plot + margin_b;
  auto out = open_svg(path, width, height);
  text(out, margin_l + plot / 2.0, 22, options.title);

  const auto rows = static_cast<std::size_t>(map.values.rows());
  const auto cols = static_cast<std::size_t>(map.values.cols());
  const double cw = static_cast<double>(plot) / static_cast<double>(cols);
  const double ch = static_cast<double>(plot) / static_cast<double>(rows);
  // Rows (theta_tx) grow upward, matching the map orientation.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double db = linear_to_db_floored(
          map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      const double t = (db - options.vmin_db) / (options.vmax_db - options.vmin_db);
      const double x = margin_l + static_cast<double>(j) * cw;
      const double y = margin_t + plot - static_cast<double>(i + 1) * ch;
      out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(cw + 0.5) << "\" height=\"" << fmt(ch + 0.5) << "\" fill=\""
          << color_hex(colormap(t)) << "\"/>\n";
    }
  }
  out << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << plot
      << "\" height=\"" << plot << "\" fill=\"none\" stroke=\"black\"/>\n";
  text(out, margin_l + plot / 2.0, margin_t + plot + 40, "theta_rx (deg)");
  out << "<g transform=\"translate(20," << margin_t + plot / 2.0
      << ") rotate(-90)\">\n";
  text(out, 0, 0, "theta_tx (deg)");
  out << "</g>\n";
  text(out, margin_l, margin_t + plot + 18, fmt(map.rx_profile.angles_deg.front()));
  text(out, margin_l + plot, margin_t + plot + 18, fmt(map.rx_profile.angles_deg.back()));
  text(out, margin_l - 8, margin_t + plot, fmt(map.tx_profile.angles_deg.front()), "end");
  text(out, margin_l - 8, margin_t + 10, fmt(map.tx_profile.angles_deg.back()), "end");

  // Colorbar.
  const int bar_x = margin_l + plot + 25, bar_w = 18;
  const int segments = 64;
  const double seg_h = static_cast<double>(plot) / segments;
  for (int s = 0; s < segments; ++s) {
    const double t = (segments - 1 - s) / static_cast<double>(segments - 1);
    out << "<rect x=\"" << bar_x << "\" y=\"" << fmt(margin_t + s * seg_h)
        << "\" width=\"" << bar_w << "\" height=\"" << fmt(seg_h + 0.5) << "\" fill=\""
        << color_hex(colormap(t)) << "\"/>\n";
  }
  text(out, bar_x + bar_w + 6, margin_t + 12, fmt(options.vmax_db) + " dB", "start", 11);
  text(out, bar_x + bar_w + 6, margin_t + plot, fmt(options.vmin_db) + " dB", "start", 11);
  out << "</svg>\n";
}

void render_cdf(const EmpiricalCdf& cdf, const std::string& path,
                const std::string& x_label, const std::string& title) {
  const int width = 560, height = 420, margin_l = 60, margin_t = 40, margin_b = 50,
            margin_r = 20;
  const int pw = width - margin_l - margin_r, ph = height - margin_t - margin_b;
  auto out = open_svg(path, width, height);
  text(out, margin_l + pw / 2.0, 22, title);

  const auto& samples = cdf.samples_db();
  double lo = samples.front(), hi = samples.back();
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto sx = [&](double v) { return margin_l + (v - lo) / (hi - lo) * pw; };
  auto sy = [&](double p) { return margin_t + (1.0 - p) * ph; };

  for (int g = 0; g <= 4; ++g) {
    const double p = g / 4.0;
    out << "<line x1=\"" << margin_l << "\" y1=\"" << fmt(sy(p)) << "\" x2=\""
        << margin_l + pw << "\" y2=\"" << fmt(sy(p))
        << "\" stroke=\"#dddddd\"/>\n";
    text(out, margin_l - 6, sy(p) + 4, fmt(p), "end", 11);
  }

  // Step curve through the sorted samples.
  std::ostringstream points;
  points << fmt(sx(samples.front())) << "," << fmt(sy(0.0));
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double p = static_cast<double>(i + 1) / n;
    points << " " << fmt(sx(samples[i])) << "," << fmt(sy(static_cast<double>(i) / n));
    points << " " << fmt(sx(samples[i])) << "," << fmt(sy(p));
  }
  out << "<polyline points=\"" << points.str()
      << "\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>\n";
  out << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  text(out, margin_l + pw / 2.0, height - 12, x_label);
  text(out, margin_l, margin_t + ph + 16, fmt(lo), "middle", 11);
  text(out, margin_l + pw, margin_t + ph + 16, fmt(hi), "middle", 11);
  out << "</svg>\n";
}

void render_bars(const std::vector<ScenarioRecord>& records,
                 const std::string& algorithm, const std::string& path) {
  std::vector<const ScenarioRecord*> kept;
  std::set<std::pair<int, int>> pair_set;
  std::set<double> delta_set;
  for (const ScenarioRecord& r : records) {
    if (r.algorithm != algorithm) continue;
    kept.push_back(&r);
    pair_set.insert({r.dl_user, r.ul_user});
    delta_set.insert(r.delta_deg);
  }
  if (kept.empty()) throw DataError("render: no records for algorithm '" + algorithm + "'");
  const std::vector<std::pair<int, int>> pairs(pair_set.begin(), pair_set.end());
  const std::vector<double> deltas(delta_set.begin(), delta_set.end());

  const int margin_l = 60, margin_t = 40, margin_b = 60, margin_r = 20;
  const int group_w = static_cast<int>(deltas.size()) * 14 + 14;
  const int pw = group_w * static_cast<int>(pairs.size());
  const int ph = 300;
  const int width = margin_l + pw + margin_r, height = margin_t + ph + margin_b;
  auto out = open_svg(path, width, height);
  text(out, margin_l + pw / 2.0, 22, "normalized sum SE (" + algorithm + ")");

  double max_se = 1.0;
  for (const auto* r : kept) max_se = std::max(max_se, r->normalized_se);
  auto sy = [&](double v) { return margin_t + ph - (v / max_se) * ph; };

  for (int g = 0; g <= 4; ++g) {
    const double v = max_se * g / 4.0;
    out << "<line x1=\"" << margin_l << "\" y1=\"" << fmt(sy(v)) << "\" x2=\""
        << margin_l + pw << "\" y2=\"" << fmt(sy(v)) << "\" stroke=\"#dddddd\"/>\n";
    text(out, margin_l - 6, sy(v) + 4, fmt(v), "end", 11);
  }
  // Half-duplex TDD reference line at 0.5.
  out << "<line x1=\"" << margin_l << "\" y1=\"" << fmt(sy(0.5)) << "\" x2=\""
      << margin_l + pw << "\" y2=\"" << fmt(sy(0.5))
      << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";

  std::map<std::pair<int, int>, int> pair_pos;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    pair_pos[pairs[p]] = static_cast<int>(p);
  std::map<double, int> delta_pos;
  for (std::size_t d = 0; d < deltas.size(); ++d)
    delta_pos[deltas[d]] = static_cast<int>(d);

  for (const auto* r : kept) {
    const int gx = margin_l + pair_pos[{r->dl_user, r->ul_user}] * group_w;
    const int bx = gx + 7 + delta_pos[r->delta_deg] * 14;
    const double t = deltas.size() > 1
                         ? delta_pos[r->delta_deg] / static_cast<double>(deltas.size() - 1)
                         : 0.5;
    out << "<rect x=\"" << bx << "\" y=\"" << fmt(sy(r->normalized_se))
        << "\" width=\"12\" height=\"" << fmt(margin_t + ph - sy(r->normalized_se))
        << "\" fill=\"" << color_hex(colormap(0.15 + 0.7 * t)) << "\"/>\n";
  }
  for (std::size_t p = 0; p < pairs.size(); ++p)
    text(out, margin_l + p * group_w + group_w / 2.0, margin_t + ph + 18,
         "D" + std::to_string(pairs[p].first) + "-U" + std::to_string(pairs[p].second),
         "middle", 10);
  out << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  text(out, margin_l + pw / 2.0, height - 12, "user pair / neighborhood size");
  out << "</svg>\n";
}

}  // namespace fdbeam
