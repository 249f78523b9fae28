#include "grindwatch/simgrind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "grindwatch/error.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace grindwatch {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based stream: the n-th draw depends only on (key, n).
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Uniform in (0, 1).
  double uniform(std::uint64_t counter) const {
    const std::uint64_t bits = splitmix64(key_ ^ splitmix64(counter));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
};

std::uint64_t trace_key(const WheelScenario& s, std::uint64_t parts, std::size_t unit) {
  std::uint64_t k = splitmix64(s.seed);
  k = splitmix64(k ^ hash_string(s.wheel_id));
  k = splitmix64(k ^ parts);
  k = splitmix64(k ^ static_cast<std::uint64_t>(unit));
  return k;
}

std::size_t sample_count(double trace_length_s) {
  return static_cast<std::size_t>(std::floor(trace_length_s * kSampleRateHz + 1e-9)) + 1;
}

WheelScenario reference_wheel(std::string id, std::vector<Checkpoint> checkpoints, std::uint64_t onset,
                              std::uint64_t seed) {
  WheelScenario w;
  w.wheel_id = std::move(id);
  w.checkpoints = std::move(checkpoints);
  w.burn_onset_parts = onset;
  // Wear is normalised to each wheel's own burn onset, so burning starts at
  // the same peak height on every wheel.
  w.wear_capacity_parts = static_cast<double>(onset);
  w.seed = seed;
  return w;
}

}  // namespace

void validate(const WheelScenario& s) {
  const auto bad = [&](const std::string& what) {
    throw Error(Errc::InvalidConfig, what, std::nullopt, s.wheel_id);
  };
  if (s.wheel_id.empty()) bad("wheel_id is empty");
  for (std::size_t i = 1; i < s.checkpoints.size(); ++i) {
    if (s.checkpoints[i].parts_ground <= s.checkpoints[i - 1].parts_ground) {
      bad("checkpoints must be strictly ascending in parts_ground");
    }
  }
  if (s.burn_onset_parts < 1) bad("burn_onset_parts must be positive");
  if (!(s.trace_length_s >= 1.0 / kSampleRateHz)) bad("trace_length_s too short for two samples");
  if (!(s.baseline_kw > 0.0)) bad("baseline_kw must be positive");
  if (s.n_cuts < 1) bad("n_cuts must be >= 1");
  if (!(s.peak_kw_new > 0.0)) bad("peak_kw_new must be positive");
  if (!(s.wear_gain >= 0.0)) bad("wear_gain must be non-negative");
  if (!(s.wear_capacity_parts > 0.0)) bad("wear_capacity_parts must be positive");
  if (!(s.noise_kw >= 0.0)) bad("noise_kw must be non-negative");
}

const WheelScenario& ScenarioPreset::wheel(std::string_view wheel_id) const {
  for (const auto& w : wheels) {
    if (w.wheel_id == wheel_id) return w;
  }
  throw Error(Errc::InvalidConfig, "preset '" + name + "' has no wheel '" + std::string(wheel_id) + "'");
}

ScenarioPreset default_preset(std::uint64_t seed) {
  ScenarioPreset p;
  p.name = "default";
  p.wheels.push_back(reference_wheel("wheel1", {{160, 20}, {689, 20}, {753, 20}, {1147, 20}, {1367, 20}},
                                     1200, seed));
  p.wheels.push_back(reference_wheel("wheel2", {{180, 20}, {709, 20}, {774, 20}, {1125, 20}, {1400, 20}},
                                     1300, seed));
  p.wheels.push_back(reference_wheel("wheel3", {{200, 20}, {680, 20}, {900, 20}, {1200, 20}, {1600, 20}},
                                     1400, seed));
  return p;
}

ScenarioPreset table2_counts_preset(std::uint64_t seed) {
  ScenarioPreset p = default_preset(seed);
  p.name = "table2-counts";
  p.wheels[1].checkpoints = {{180, 17}, {709, 17}, {774, 16}, {1125, 16}, {1400, 3}};
  p.wheels[2].checkpoints = {{200, 12}, {680, 12}, {900, 12}, {1200, 11}, {1600, 3}};
  return p;
}

WheelScenario lifetime_scenario(const WheelScenario& base, std::uint64_t step) {
  if (step < 1) throw Error(Errc::InvalidConfig, "lifetime step must be >= 1");
  WheelScenario w = base;
  w.checkpoints.clear();
  const auto end = base.burn_onset_parts + base.burn_onset_parts * 3 / 10;
  for (std::uint64_t parts = step; parts <= end; parts += step) w.checkpoints.push_back({parts, 1});
  return w;
}

double peak_amplitude(const WheelScenario& s, std::uint64_t parts_ground) {
  const double wear = std::min(static_cast<double>(parts_ground) / s.wear_capacity_parts, 1.5);
  return s.peak_kw_new * (1.0 + s.wear_gain * wear);
}

std::string unit_id_for(const WheelScenario& s, std::uint64_t parts_ground, std::size_t unit_index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "-p%05llu-u%02zu", static_cast<unsigned long long>(parts_ground),
                unit_index);
  return s.wheel_id + buf;
}

PowerTrace generate_trace(const WheelScenario& s, std::uint64_t parts_ground, std::size_t unit_index) {
  validate(s);
  const std::size_t n = sample_count(s.trace_length_s);
  const double amplitude = peak_amplitude(s, parts_ground);
  const double half_width = 0.35 * s.trace_length_s / static_cast<double>(s.n_cuts);
  const CounterRng rng(trace_key(s, parts_ground, unit_index));

  std::vector<double> centers(s.n_cuts);
  for (std::size_t c = 0; c < s.n_cuts; ++c) {
    const double frac = (static_cast<double>(c) + 0.5) / static_cast<double>(s.n_cuts);
    const double idx = std::round(frac * static_cast<double>(n - 1));
    centers[c] = idx / kSampleRateHz;
  }

  PowerTrace trace;
  trace.meta.unit_id = unit_id_for(s, parts_ground, unit_index);
  trace.meta.wheel_id = s.wheel_id;
  trace.meta.parts_ground = parts_ground;
  trace.meta.burn_rank = parts_ground >= s.burn_onset_parts ? 2 : 1;
  trace.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    double p = s.baseline_kw;
    for (double tc : centers) {
      const double u = (t - tc) / half_width;
      if (std::abs(u) < 1.0) p += amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * u));
    }
    if (s.noise_kw > 0.0) p += s.noise_kw * rng.normal(i);
    trace.samples[i] = {t, p};
  }
  return trace;
}

std::vector<PowerTrace> generate_wheel(const WheelScenario& s) {
  validate(s);
  std::vector<PowerTrace> out;
  for (const auto& cp : s.checkpoints) {
    for (std::size_t u = 0; u < cp.units_recorded; ++u) out.push_back(generate_trace(s, cp.parts_ground, u));
  }
  return out;
}

CampaignManifest generate_campaign(const ScenarioPreset& preset, const std::filesystem::path& out) {
  CampaignManifest combined;
  combined.base_dir = out;
  for (const auto& wheel : preset.wheels) {
    validate(wheel);
    CampaignManifest per_wheel;
    per_wheel.base_dir = out;
    for (const auto& cp : wheel.checkpoints) {
      for (std::size_t u = 0; u < cp.units_recorded; ++u) {
        const PowerTrace trace = generate_trace(wheel, cp.parts_ground, u);
        const std::filesystem::path rel = std::filesystem::path(wheel.wheel_id) / (trace.meta.unit_id + ".csv");
        std::error_code ec;
        std::filesystem::create_directories(out / wheel.wheel_id, ec);
        if (ec) {
          throw Error(Errc::IoError, ec.message(), std::nullopt, (out / wheel.wheel_id).string());
        }
        write_trace_file(trace, out / rel);
        per_wheel.entries.push_back({rel, trace.meta});
      }
    }
    if (!per_wheel.entries.empty()) {
      write_manifest_file(per_wheel, out / (wheel.wheel_id + ".csv"));
      combined.entries.insert(combined.entries.end(), per_wheel.entries.begin(), per_wheel.entries.end());
    }
  }
  if (!combined.entries.empty()) write_manifest_file(combined, out / "manifest.csv");
  return combined;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

using nlohmann::json;

json wheel_to_json(const WheelScenario& w) {
  json cps = json::array();
  for (const auto& cp : w.checkpoints) cps.push_back(json::array({cp.parts_ground, cp.units_recorded}));
  return json{{"wheel_id", w.wheel_id},
              {"checkpoints", std::move(cps)},
              {"burn_onset_parts", w.burn_onset_parts},
              {"trace_length_s", w.trace_length_s},
              {"baseline_kw", w.baseline_kw},
              {"n_cuts", w.n_cuts},
              {"peak_kw_new", w.peak_kw_new},
              {"wear_gain", w.wear_gain},
              {"wear_capacity_parts", w.wear_capacity_parts},
              {"noise_kw", w.noise_kw},
              {"seed", w.seed}};
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::SchemaError, std::string("missing field '") + key + "'", std::nullopt, where);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::SchemaError, std::string("bad type for '") + key + "'", std::nullopt, where);
  }
}

WheelScenario wheel_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::SchemaError, "expected an object", std::nullopt, where);
  static const std::set<std::string> keys = {"wheel_id",   "checkpoints", "burn_onset_parts", "trace_length_s",
                                             "baseline_kw", "n_cuts",     "peak_kw_new",      "wear_gain",
                                             "wear_capacity_parts",       "noise_kw",         "seed"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) throw Error(Errc::SchemaError, "unknown field '" + k + "'", std::nullopt, where);
  }
  WheelScenario w;
  w.wheel_id = get_field<std::string>(j, "wheel_id", where);
  const auto found = j.find("checkpoints");
  if (found == j.end()) throw Error(Errc::SchemaError, "missing field 'checkpoints'", std::nullopt, where);
  const json& cps = *found;
  if (!cps.is_array()) throw Error(Errc::SchemaError, "checkpoints must be an array", std::nullopt, where);
  for (const auto& cp : cps) {
    if (!cp.is_array() || cp.size() != 2 || !cp[0].is_number_unsigned() || !cp[1].is_number_unsigned()) {
      throw Error(Errc::SchemaError, "checkpoint must be [parts_ground, units_recorded]", std::nullopt, where);
    }
    w.checkpoints.push_back({cp[0].get<std::uint64_t>(), cp[1].get<std::size_t>()});
  }
  w.burn_onset_parts = get_field<std::uint64_t>(j, "burn_onset_parts", where);
  w.trace_length_s = get_field<double>(j, "trace_length_s", where);
  w.baseline_kw = get_field<double>(j, "baseline_kw", where);
  w.n_cuts = get_field<std::size_t>(j, "n_cuts", where);
  w.peak_kw_new = get_field<double>(j, "peak_kw_new", where);
  w.wear_gain = get_field<double>(j, "wear_gain", where);
  w.wear_capacity_parts = get_field<double>(j, "wear_capacity_parts", where);
  w.noise_kw = get_field<double>(j, "noise_kw", where);
  w.seed = get_field<std::uint64_t>(j, "seed", where);
  validate(w);
  return w;
}

}  // namespace

std::string serialize_preset_json(const ScenarioPreset& preset) {
  json wheels = json::array();
  for (const auto& w : preset.wheels) wheels.push_back(wheel_to_json(w));
  return json{{"name", preset.name}, {"wheels", std::move(wheels)}}.dump(2) + "\n";
}

ScenarioPreset parse_preset_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, e.what());
  }
  if (!doc.is_object() || !doc.contains("wheels") || !doc["wheels"].is_array()) {
    throw Error(Errc::SchemaError, "expected {\"name\": ..., \"wheels\": [...]}");
  }
  ScenarioPreset p;
  p.name = doc.contains("name") ? get_field<std::string>(doc, "name", "") : std::string("custom");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["wheels"].size(); ++i) {
    p.wheels.push_back(wheel_from_json(doc["wheels"][i], "/wheels/" + std::to_string(i)));
    if (!ids.insert(p.wheels.back().wheel_id).second) {
      throw Error(Errc::SchemaError, "duplicate wheel_id '" + p.wheels.back().wheel_id + "'");
    }
  }
  return p;
}

ScenarioPreset load_preset(std::string_view name_or_path, std::optional<std::uint64_t> seed) {
  ScenarioPreset p;
  if (name_or_path == "default") {
    p = default_preset();
  } else if (name_or_path == "table2-counts") {
    p = table2_counts_preset();
  } else {
    const std::filesystem::path path{std::string(name_or_path)};
    const auto text = detail::read_file(path);
    try {
      p = parse_preset_json(text);
    } catch (const Error& e) {
      throw e.with_context(path.string());
    }
  }
  if (seed) {
    for (auto& w : p.wheels) w.seed = *seed;
  }
  return p;
}

}  // namespace grindwatch
