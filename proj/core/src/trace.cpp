#include "grindwatch/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "grindwatch/error.hpp"
#include "text_util.hpp"

namespace grindwatch {

std::string_view health_class_name(HealthClass c) noexcept {
  return c == HealthClass::Burn ? "Burn" : "NoBurn";
}

std::optional<HealthClass> parse_health_class(std::string_view name) noexcept {
  if (name == "NoBurn") return HealthClass::NoBurn;
  if (name == "Burn") return HealthClass::Burn;
  return std::nullopt;
}

HealthClass class_from_burn_rank(int burn_rank) {
  if (burn_rank < 1 || burn_rank > 3) {
    throw Error(Errc::InvalidValue, "burn_rank must be 1, 2 or 3, got " + std::to_string(burn_rank));
  }
  return burn_rank >= 2 ? HealthClass::Burn : HealthClass::NoBurn;
}

std::optional<HealthClass> TraceMeta::label() const {
  if (!burn_rank) return std::nullopt;
  return class_from_burn_rank(*burn_rank);
}

double PowerTrace::duration_s() const {
  if (samples.empty()) return 0.0;
  return samples.back().time_s - samples.front().time_s;
}

PowerTrace parse_trace_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines.front()) != "time_s,power_kw") {
    throw Error(Errc::MalformedHeader, "expected header 'time_s,power_kw'");
  }

  PowerTrace trace;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i;
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 2) {
      throw Error(Errc::NonNumericField, "expected 2 fields, got " + std::to_string(fields.size()),
                  row);
    }
    Sample s;
    if (!detail::parse_double(fields[0], s.time_s) || !detail::parse_double(fields[1], s.power_kw)) {
      throw Error(Errc::NonNumericField, "unparseable number", row);
    }
    if (!std::isfinite(s.time_s) || !std::isfinite(s.power_kw)) {
      throw Error(Errc::InvalidValue, "non-finite value", row);
    }
    if (!trace.samples.empty() && !(s.time_s > trace.samples.back().time_s)) {
      throw Error(Errc::NonMonotoneTime, "time does not increase", row);
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() < 2) {
    throw Error(Errc::TooFewSamples,
                "need at least 2 samples, got " + std::to_string(trace.samples.size()));
  }
  return trace;
}

PowerTrace parse_trace_csv(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_trace_csv(std::string_view{text});
}

PowerTrace read_trace_file(const std::filesystem::path& path) {
  try {
    return parse_trace_csv(detail::read_file(path));
  } catch (const Error& e) {
    if (e.context() == path.string()) throw;
    throw e.with_context(path.string());
  }
}

std::string serialize_trace_csv(const PowerTrace& trace) {
  std::string out = "time_s,power_kw\n";
  out.reserve(out.size() + trace.samples.size() * 24);
  for (const auto& s : trace.samples) {
    detail::append_double(out, s.time_s);
    out += ',';
    detail::append_double(out, s.power_kw);
    out += '\n';
  }
  return out;
}

void write_trace_file(const PowerTrace& trace, const std::filesystem::path& path) {
  detail::write_file(path, serialize_trace_csv(trace));
}

Eigen::VectorXd resample(const PowerTrace& trace, std::size_t length) {
  if (length < 2) {
    throw Error(Errc::BadResampleLength, "resample length must be >= 2, got " + std::to_string(length));
  }
  const auto& s = trace.samples;
  if (s.size() < 2) {
    throw Error(Errc::TooFewSamples, "cannot resample fewer than 2 samples");
  }

  Eigen::VectorXd out(static_cast<Eigen::Index>(length));
  const double t0 = s.front().time_s;
  const double t1 = s.back().time_s;
  const double step = (t1 - t0) / static_cast<double>(length - 1);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < length; ++i) {
    const Eigen::Index idx = static_cast<Eigen::Index>(i);
    if (i == 0) {
      out[idx] = s.front().power_kw;
      continue;
    }
    if (i == length - 1) {
      out[idx] = s.back().power_kw;
      continue;
    }
    const double t = t0 + step * static_cast<double>(i);
    while (seg + 2 < s.size() && s[seg + 1].time_s <= t) ++seg;
    const Sample& a = s[seg];
    const Sample& b = s[seg + 1];
    const double frac = (t - a.time_s) / (b.time_s - a.time_s);
    out[idx] = a.power_kw + frac * (b.power_kw - a.power_kw);
  }
  return out;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace grindwatch
