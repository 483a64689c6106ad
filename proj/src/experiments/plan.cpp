#include "hmmtrack/experiments/plan.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hmmtrack::experiments {

std::string_view to_string(PlanKind k) {
  switch (k) {
    case PlanKind::Repeat: return "repeat";
    case PlanKind::Switch: return "switch";
    case PlanKind::Alternate: return "alternate";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::UniformStatic: return "uniform_static";
    case Variant::PretrainedStatic: return "pretrained_static";
    case Variant::Adaptive: return "adaptive";
  }
  return "?";
}

std::optional<PlanKind> plan_kind_from(std::string_view s) {
  for (PlanKind k : {PlanKind::Repeat, PlanKind::Switch, PlanKind::Alternate}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Variant> variant_from(std::string_view s) {
  for (Variant v : {Variant::UniformStatic, Variant::PretrainedStatic, Variant::Adaptive}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

void ExperimentPlan::validate() const {
  if (games < 1) throw std::invalid_argument("games must be positive");
  switch (kind) {
    case PlanKind::Repeat:
      if (strategies.size() != 1) throw std::invalid_argument("a repeat plan needs exactly 1 strategy");
      break;
    case PlanKind::Switch:
      if (strategies.size() != 2) throw std::invalid_argument("a switch plan needs exactly 2 strategies");
      if (switch_at < 1 || switch_at >= games) throw std::invalid_argument("switch_at must satisfy 1 <= switch_at < games");
      break;
    case PlanKind::Alternate:
      if (strategies.size() != 2) throw std::invalid_argument("an alternate plan needs exactly 2 strategies");
      break;
  }
  if (variants.empty()) throw std::invalid_argument("at least one variant is required");
  if (!(hesitation >= 0.0 && hesitation < 1.0)) throw std::invalid_argument("hesitation must lie in [0,1)");
  if (!(blend_lambda >= 0.0 && blend_lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
  if (short_window == 0) throw std::invalid_argument("short_window must be positive");
  if (compare_games) {
    auto [lo, hi] = *compare_games;
    if (lo < 1 || hi < lo || hi > games) throw std::invalid_argument("compare_games range outside the plan");
  }
  rules.validate();
}

const ScriptedStrategy& ExperimentPlan::strategy_for(int game_index) const {
  switch (kind) {
    case PlanKind::Repeat: return strategies.at(0);
    case PlanKind::Switch: return strategies.at(game_index <= switch_at ? 0 : 1);
    case PlanKind::Alternate: return strategies.at(game_index % 2 == 1 ? 0 : 1);
  }
  return strategies.at(0);
}

ConfigError::ConfigError(const std::string& file, std::size_t line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), file_(file), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(source_, line_, message); }

  template <typename T>
  T number(std::string_view key, std::string_view value) const {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || value.empty()) {
      fail("'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
    }
    return out;
  }

  bool boolean(std::string_view key, std::string_view value) const {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail("'" + std::string(key) + "' expects true or false, got '" + std::string(value) + "'");
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

}  // namespace

ExperimentPlan parse_plan(std::string_view text, const std::string& source, const std::filesystem::path& base_dir) {
  ExperimentPlan plan;
  bool saw_variants = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const LineParser p(source, line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) p.fail("'" + std::string(key) + "' has no value");

    try {
      if (key == "kind") {
        auto k = plan_kind_from(value);
        if (!k) p.fail("unknown plan kind '" + std::string(value) + "'");
        plan.kind = *k;
      } else if (key == "map") {
        plan.map_path = base_dir / std::filesystem::path(std::string(value));
      } else if (key == "games") {
        plan.games = p.number<int>(key, value);
      } else if (key == "switch_at") {
        plan.switch_at = p.number<int>(key, value);
      } else if (key == "variant" || key == "variants") {
        if (!saw_variants) plan.variants.clear();
        saw_variants = true;
        for (auto name : split(value, ',')) {
          auto v = variant_from(name);
          if (!v) p.fail("unknown variant '" + std::string(name) + "'");
          plan.variants.push_back(*v);
        }
      } else if (key == "seed") {
        plan.seed = p.number<std::uint64_t>(key, value);
      } else if (key == "hesitation") {
        plan.hesitation = p.number<double>(key, value);
      } else if (key == "strategy") {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) p.fail("strategy expects name:MOVES");
        ScriptedStrategy s;
        s.name = std::string(trim(value.substr(0, colon)));
        if (s.name.empty()) p.fail("strategy has an empty name");
        try {
          s.moves = grid::parse_moves(value.substr(colon + 1));
        } catch (const std::invalid_argument& e) {
          p.fail(std::string("strategy '") + s.name + "': " + e.what());
        }
        plan.strategies.push_back(std::move(s));
      } else if (key == "heatmap_turns") {
        plan.heatmap_turns.clear();
        for (auto t : split(value, ',')) plan.heatmap_turns.push_back(p.number<int>(key, t));
      } else if (key == "compare_games") {
        auto parts = split(value, '-');
        if (parts.size() != 2) p.fail("compare_games expects FIRST-LAST");
        plan.compare_games = std::pair{p.number<int>(key, parts[0]), p.number<int>(key, parts[1])};
      } else if (key == "lambda") {
        plan.blend_lambda = p.number<double>(key, value);
      } else if (key == "short_window") {
        plan.short_window = p.number<std::size_t>(key, value);
      } else if (key == "bw_max_iters") {
        plan.baum_welch.max_iters = p.number<int>(key, value);
      } else if (key == "bw_tol") {
        plan.baum_welch.tol = p.number<double>(key, value);
      } else if (key == "bw_smoothing_eps") {
        plan.baum_welch.smoothing_eps = p.number<double>(key, value);
      } else if (key == "warmup_store") {
        plan.warmup_store = base_dir / std::filesystem::path(std::string(value));
      } else if (key == "player_vision_radius") {
        plan.rules.player_vision_radius = p.number<int>(key, value);
      } else if (key == "ai_vision_radius") {
        plan.rules.ai_vision_radius = p.number<int>(key, value);
      } else if (key == "occupy_turns_to_win") {
        plan.rules.occupy_turns_to_win = p.number<int>(key, value);
      } else if (key == "touch_rule") {
        auto r = touch_rule_from(value);
        if (!r) p.fail("unknown touch_rule '" + std::string(value) + "'");
        plan.rules.touch_rule = *r;
      } else if (key == "max_turns") {
        plan.rules.max_turns = p.number<int>(key, value);
      } else if (key == "occlusion") {
        plan.rules.occlusion = p.boolean(key, value);
      } else if (key == "distance_metric") {
        auto m = distance_metric_from(value);
        if (!m) p.fail("unknown distance_metric '" + std::string(value) + "'");
        plan.rules.distance_metric = *m;
      } else if (key == "exclude_sighted_turns") {
        plan.rules.exclude_sighted_turns = p.boolean(key, value);
      } else {
        p.fail("unknown key '" + std::string(key) + "'");
      }
    } catch (const std::invalid_argument& e) {
      p.fail(e.what());
    }
  }

  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    // Whole-plan inconsistencies are reported at the end of the file.
    throw ConfigError(source, line_no, e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open plan file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str(), path.string(), path.parent_path());
}

}  // namespace hmmtrack::experiments
