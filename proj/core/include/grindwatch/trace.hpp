#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace grindwatch {

/// Power traces are recorded at 20 Hz.
inline constexpr double kSampleRateHz = 20.0;
inline constexpr std::size_t kDefaultResampleLength = 512;

enum class HealthClass { NoBurn, Burn };

std::string_view health_class_name(HealthClass c) noexcept;
std::optional<HealthClass> parse_health_class(std::string_view name) noexcept;

/// Burn rank 1 is "none"; 2 ("small") and 3 ("dark") both count as Burn.
HealthClass class_from_burn_rank(int burn_rank);

struct Sample {
  double time_s = 0.0;
  double power_kw = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Identity and provenance of one ground unit.
struct TraceMeta {
  std::string unit_id;
  std::string wheel_id;
  std::uint64_t parts_ground = 0;
  std::optional<int> burn_rank;

  std::optional<HealthClass> label() const;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

/// Power-vs-time series for the grinding of a single unit.
struct PowerTrace {
  TraceMeta meta;
  std::vector<Sample> samples;

  double duration_s() const;

  friend bool operator==(const PowerTrace&, const PowerTrace&) = default;
};

/// Parses a `time_s,power_kw` CSV. Times must be strictly increasing and
/// every value finite; nothing is imputed. Throws grindwatch::Error.
PowerTrace parse_trace_csv(std::string_view text);
PowerTrace parse_trace_csv(std::istream& in);
PowerTrace read_trace_file(const std::filesystem::path& path);

/// Writes samples in shortest round-trip decimal form.
std::string serialize_trace_csv(const PowerTrace& trace);
void write_trace_file(const PowerTrace& trace, const std::filesystem::path& path);

/// Linear interpolation onto `length` equally spaced times over
/// [t_first, t_last]. Both endpoints are reproduced exactly.
Eigen::VectorXd resample(const PowerTrace& trace, std::size_t length);

// ---------------------------------------------------------------------------
// Campaign manifests

struct ManifestEntry {
  std::filesystem::path trace_file;
  TraceMeta meta;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CampaignManifest {
  /// Relative `trace_file` entries are resolved against this directory.
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& entry) const;
};

/// Checks unit_id uniqueness per wheel and that, in manifest order, each
/// wheel's parts_ground never decreases.
void validate_manifest(const CampaignManifest& manifest);

CampaignManifest parse_manifest_csv(std::string_view text, std::filesystem::path base_dir = {});
CampaignManifest read_manifest_file(const std::filesystem::path& path);
std::string serialize_manifest_csv(const CampaignManifest& manifest);
void write_manifest_file(const CampaignManifest& manifest, const std::filesystem::path& path);

/// n aligned observations by L resampled power variables (kW).
struct TraceMatrix {
  Eigen::MatrixXd values;
  std::vector<TraceMeta> meta;
  std::size_t resample_length = 0;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Reads, resamples and stacks every trace of the manifest in order. Errors
/// carry the offending file path in their context.
TraceMatrix build_matrix(const CampaignManifest& manifest, std::size_t length);

/// Stacks traces that are already in memory.
TraceMatrix build_matrix(const std::vector<PowerTrace>& traces, std::size_t length);

/// FNV-1a 64-bit digest of a byte string, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace grindwatch
