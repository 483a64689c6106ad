#include "hmmtrack/experiments/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hmmtrack::experiments {

namespace {

void check_size(const hmm::Vector& belief, const grid::GridMap& map) {
  if (belief.size() != map.state_count()) {
    throw hmm::DimensionMismatch("belief has " + std::to_string(belief.size()) + " entries, map has " +
                                 std::to_string(map.state_count()) + " floor tiles");
  }
}

}  // namespace

std::string heatmap_csv(const hmm::Vector& belief, const grid::GridMap& map) {
  check_size(belief, map);
  std::string out;
  char buf[32];
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (x) out += ',';
      if (auto s = map.index({x, y})) {
        std::snprintf(buf, sizeof buf, "%.6f", belief[*s]);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<Rgb> heatmap_pixels(const hmm::Vector& belief, const grid::GridMap& map) {
  check_size(belief, map);
  constexpr Rgb kWall{0, 0, 0};
  constexpr Rgb kWhite{255, 255, 255};
  constexpr Rgb kDarkRed{139, 0, 0};
  const double peak = belief.empty() ? 0.0 : *std::max_element(belief.begin(), belief.end());

  auto lerp = [](std::uint8_t from, std::uint8_t to, double f) {
    return static_cast<std::uint8_t>(std::lround(from + (to - from) * f));
  };
  std::vector<Rgb> px;
  px.reserve(static_cast<std::size_t>(map.width()) * map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto s = map.index({x, y});
      if (!s) {
        px.push_back(kWall);
        continue;
      }
      const double v = belief[*s];
      if (v <= 0.0 || peak <= 0.0) {
        px.push_back(kWhite);
        continue;
      }
      const double f = v / peak;
      px.push_back({lerp(kWhite.r, kDarkRed.r, f), lerp(kWhite.g, kDarkRed.g, f), lerp(kWhite.b, kDarkRed.b, f)});
    }
  }
  return px;
}

std::string heatmap_ppm(const hmm::Vector& belief, const grid::GridMap& map) {
  const auto px = heatmap_pixels(belief, map);
  std::string out = "P6\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n255\n";
  for (const auto& p : px) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

void export_heatmap(const hmm::Vector& belief, const grid::GridMap& map, const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto ppm = stem;
  ppm += ".ppm";
  write_text_file(csv, heatmap_csv(belief, map));
  write_text_file(ppm, heatmap_ppm(belief, map));
}

std::string learning_curve_csv(const StatsReport& report) {
  std::string out = "game_index,variant,mean_distance\n";
  char buf[40];
  for (const auto& curve : report.curves) {
    for (std::size_t g = 0; g < curve.per_game_mean_distance.size(); ++g) {
      std::snprintf(buf, sizeof buf, "%.17g", curve.per_game_mean_distance[g]);
      out += std::to_string(g + 1) + "," + std::string(to_string(curve.variant)) + "," + buf + "\n";
    }
  }
  return out;
}

void export_learning_curve(const StatsReport& report, const std::filesystem::path& path) {
  if (report.curves.empty()) throw std::invalid_argument("export_learning_curve: empty report");
  write_text_file(path, learning_curve_csv(report));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace hmmtrack::experiments
