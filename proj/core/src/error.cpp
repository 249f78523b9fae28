#include "grindwatch/error.hpp"

namespace grindwatch {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::NonNumericField: return "NonNumericField";
    case Errc::NonMonotoneTime: return "NonMonotoneTime";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::BadResampleLength: return "BadResampleLength";
    case Errc::EmptyCampaign: return "EmptyCampaign";
    case Errc::MissingFile: return "MissingFile";
    case Errc::ManifestError: return "ManifestError";
    case Errc::UnlabeledRow: return "UnlabeledRow";
    case Errc::InsufficientObservations: return "InsufficientObservations";
    case Errc::BadComponentCount: return "BadComponentCount";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateClasses: return "DegenerateClasses";
    case Errc::SingularWithinScatter: return "SingularWithinScatter";
    case Errc::ZeroDirection: return "ZeroDirection";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::CorruptModel: return "CorruptModel";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string render(Errc code, const std::string& message, const std::optional<std::size_t>& row,
                   const std::string& context) {
  std::string out;
  if (!context.empty()) {
    out += context;
    out += ": ";
  }
  out += errc_name(code);
  if (row) {
    out += "(" + std::to_string(*row) + ")";
  }
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}

}  // namespace

Error::Error(Errc code, std::string message, std::optional<std::size_t> row, std::string context)
    : std::runtime_error(render(code, message, row, context)),
      code_(code),
      row_(row),
      context_(std::move(context)),
      message_(std::move(message)) {}

Error Error::with_context(const std::string& path) const {
  std::string ctx = context_.empty() ? path : path + ": " + context_;
  return Error(code_, message_, row_, std::move(ctx));
}

}  // namespace grindwatch
