#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grindwatch/trace.hpp"

namespace grindwatch {

struct Checkpoint {
  std::uint64_t parts_ground = 0;
  std::size_t units_recorded = 0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Synthetic wheel lifetime. A trace is a constant baseline plus `n_cuts`
/// raised-cosine engagement peaks whose height grows linearly with wear
/// (parts_ground / wear_capacity_parts, capped at 1.5), plus Gaussian noise.
struct WheelScenario {
  std::string wheel_id;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t burn_onset_parts = 1;
  double trace_length_s = 60.0;
  double baseline_kw = 0.4;
  std::size_t n_cuts = 6;
  double peak_kw_new = 1.2;
  double wear_gain = 0.5;
  double wear_capacity_parts = 1200.0;
  double noise_kw = 0.01;
  std::uint64_t seed = 42;

  friend bool operator==(const WheelScenario&, const WheelScenario&) = default;
};

void validate(const WheelScenario& scenario);

struct ScenarioPreset {
  std::string name;
  std::vector<WheelScenario> wheels;

  const WheelScenario& wheel(std::string_view wheel_id) const;
};

/// Three wheels with the checkpoints of the reference experiment, 20 units
/// each. Wheel 3's burn onset (1400 parts) is an assumption; the source
/// records only that its last checkpoint burned.
ScenarioPreset default_preset(std::uint64_t seed = 42);

/// Same wheels, with wheel 2 reduced to 66 NoBurn + 3 Burn units and wheel 3
/// to 47 NoBurn + 3 Burn units.
ScenarioPreset table2_counts_preset(std::uint64_t seed = 42);

/// One unit every `step` parts from `step` to 1.3 x burn onset, for
/// streaming runs over a wheel's whole life.
WheelScenario lifetime_scenario(const WheelScenario& base, std::uint64_t step = 20);

/// Resolves "default" / "table2-counts", or reads a scenario JSON file. A
/// given seed replaces every wheel's seed.
ScenarioPreset load_preset(std::string_view name_or_path, std::optional<std::uint64_t> seed = std::nullopt);

ScenarioPreset parse_preset_json(std::string_view text);
std::string serialize_preset_json(const ScenarioPreset& preset);

double peak_amplitude(const WheelScenario& scenario, std::uint64_t parts_ground);

/// Deterministic in (seed, wheel_id, parts_ground, unit_index).
PowerTrace generate_trace(const WheelScenario& scenario, std::uint64_t parts_ground,
                          std::size_t unit_index);

/// Every trace of one wheel, in checkpoint order.
std::vector<PowerTrace> generate_wheel(const WheelScenario& scenario);

std::string unit_id_for(const WheelScenario& scenario, std::uint64_t parts_ground, std::size_t unit_index);

/// Writes `<out>/<wheel_id>/<unit_id>.csv` for every unit, one manifest per
/// wheel (`<out>/<wheel_id>.csv`) and a combined `<out>/manifest.csv`.
/// Returns the combined manifest.
CampaignManifest generate_campaign(const ScenarioPreset& preset, const std::filesystem::path& out);

}  // namespace grindwatch
