#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace grindwatch {

enum class Errc {
  // trace and manifest ingestion
  MalformedHeader,
  NonNumericField,
  NonMonotoneTime,
  TooFewSamples,
  InvalidValue,
  BadResampleLength,
  EmptyCampaign,
  MissingFile,
  ManifestError,
  UnlabeledRow,
  // statistical core
  InsufficientObservations,
  BadComponentCount,
  ZeroVariance,
  DimensionMismatch,
  DegenerateClasses,
  SingularWithinScatter,
  ZeroDirection,
  // persistence and configuration
  VersionMismatch,
  SchemaError,
  CorruptModel,
  InvalidConfig,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

/// Exception carried by every failing operation in the library. `row` is the
/// 1-based data row for parse errors; `context` names the file or document
/// path the error refers to, when there is one.
class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message, std::optional<std::size_t> row = std::nullopt,
        std::string context = {});

  Errc code() const noexcept { return code_; }
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::string& context() const noexcept { return context_; }

  /// Same error, with `path` prefixed to its context.
  Error with_context(const std::string& path) const;

private:
  Errc code_;
  std::optional<std::size_t> row_;
  std::string context_;
  std::string message_;
};

}  // namespace grindwatch
