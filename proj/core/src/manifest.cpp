#include <map>
#include <set>

#include "grindwatch/error.hpp"
#include "grindwatch/trace.hpp"
#include "text_util.hpp"

namespace grindwatch {

namespace {

constexpr std::string_view kManifestHeader = "trace_file,unit_id,wheel_id,parts_ground,burn_rank";

}  // namespace

std::filesystem::path CampaignManifest::resolve(const ManifestEntry& entry) const {
  if (entry.trace_file.is_absolute() || base_dir.empty()) return entry.trace_file;
  return base_dir / entry.trace_file;
}

void validate_manifest(const CampaignManifest& manifest) {
  std::map<std::string, std::set<std::string>> units_by_wheel;
  std::map<std::string, std::uint64_t> last_parts;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& m = manifest.entries[i].meta;
    const std::size_t row = i + 1;
    if (m.unit_id.empty()) throw Error(Errc::ManifestError, "empty unit_id", row);
    if (m.burn_rank && (*m.burn_rank < 1 || *m.burn_rank > 3)) {
      throw Error(Errc::ManifestError, "burn_rank must be 1, 2 or 3", row);
    }
    if (!units_by_wheel[m.wheel_id].insert(m.unit_id).second) {
      throw Error(Errc::ManifestError,
                  "duplicate unit_id '" + m.unit_id + "' for wheel '" + m.wheel_id + "'", row);
    }
    auto [it, fresh] = last_parts.try_emplace(m.wheel_id, m.parts_ground);
    if (!fresh) {
      if (m.parts_ground < it->second) {
        throw Error(Errc::ManifestError,
                    "parts_ground decreases within wheel '" + m.wheel_id + "'", row);
      }
      it->second = m.parts_ground;
    }
  }
}

CampaignManifest parse_manifest_csv(std::string_view text, std::filesystem::path base_dir) {
  auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines.front()) != kManifestHeader) {
    throw Error(Errc::MalformedHeader, "expected header '" + std::string(kManifestHeader) + "'");
  }
  CampaignManifest manifest;
  manifest.base_dir = std::move(base_dir);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i;
    const auto f = detail::split_fields(lines[i]);
    if (f.size() != 5) {
      throw Error(Errc::ManifestError, "expected 5 fields, got " + std::to_string(f.size()), row);
    }
    ManifestEntry e;
    if (f[0].empty()) throw Error(Errc::ManifestError, "empty trace_file", row);
    e.trace_file = std::filesystem::path(std::string(f[0]));
    e.meta.unit_id = std::string(f[1]);
    e.meta.wheel_id = std::string(f[2]);
    if (!detail::parse_u64(f[3], e.meta.parts_ground)) {
      throw Error(Errc::NonNumericField, "parts_ground is not a non-negative integer", row);
    }
    if (!f[4].empty()) {
      int rank = 0;
      if (!detail::parse_int(f[4], rank)) {
        throw Error(Errc::NonNumericField, "burn_rank is not an integer", row);
      }
      e.meta.burn_rank = rank;
    }
    manifest.entries.push_back(std::move(e));
  }
  validate_manifest(manifest);
  return manifest;
}

CampaignManifest read_manifest_file(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  try {
    return parse_manifest_csv(text, path.parent_path());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string serialize_manifest_csv(const CampaignManifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : manifest.entries) {
    out += e.trace_file.generic_string();
    out += ',';
    out += e.meta.unit_id;
    out += ',';
    out += e.meta.wheel_id;
    out += ',';
    out += std::to_string(e.meta.parts_ground);
    out += ',';
    if (e.meta.burn_rank) out += std::to_string(*e.meta.burn_rank);
    out += '\n';
  }
  return out;
}

void write_manifest_file(const CampaignManifest& manifest, const std::filesystem::path& path) {
  detail::write_file(path, serialize_manifest_csv(manifest));
}

TraceMatrix build_matrix(const CampaignManifest& manifest, std::size_t length) {
  if (length < 2) {
    throw Error(Errc::BadResampleLength, "resample length must be >= 2, got " + std::to_string(length));
  }
  if (manifest.entries.empty()) {
    throw Error(Errc::EmptyCampaign, "manifest has no entries");
  }
  TraceMatrix m;
  m.resample_length = length;
  m.values.resize(static_cast<Eigen::Index>(manifest.entries.size()),
                  static_cast<Eigen::Index>(length));
  m.meta.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& entry = manifest.entries[i];
    const auto path = manifest.resolve(entry);
    PowerTrace trace = read_trace_file(path);
    m.values.row(static_cast<Eigen::Index>(i)) = resample(trace, length).transpose();
    m.meta.push_back(entry.meta);
  }
  return m;
}

TraceMatrix build_matrix(const std::vector<PowerTrace>& traces, std::size_t length) {
  if (length < 2) {
    throw Error(Errc::BadResampleLength, "resample length must be >= 2, got " + std::to_string(length));
  }
  if (traces.empty()) {
    throw Error(Errc::EmptyCampaign, "no traces");
  }
  TraceMatrix m;
  m.resample_length = length;
  m.values.resize(static_cast<Eigen::Index>(traces.size()), static_cast<Eigen::Index>(length));
  for (std::size_t i = 0; i < traces.size(); ++i) {
    try {
      m.values.row(static_cast<Eigen::Index>(i)) = resample(traces[i], length).transpose();
    } catch (const Error& e) {
      throw e.with_context(traces[i].meta.unit_id);
    }
    m.meta.push_back(traces[i].meta);
  }
  return m;
}

}  // namespace grindwatch
