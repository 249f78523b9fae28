#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "grindwatch/monitor.hpp"

namespace grindwatch {

/// Canonical JSON document: keys sorted, doubles in shortest round-trip form,
/// loadings as one array per component. Saving a loaded model reproduces
/// the input bytes.
std::string save_model(const ModelBundle& bundle);
void save_model(const ModelBundle& bundle, std::ostream& sink);
void save_model_file(const ModelBundle& bundle, const std::filesystem::path& path);

/// Rejects unknown keys and other format versions (VersionMismatch), missing
/// or mistyped fields (SchemaError, context = JSON pointer), and dimension
/// inconsistencies (CorruptModel).
ModelBundle load_model(std::string_view document);
ModelBundle load_model(std::istream& source);
ModelBundle load_model_file(const std::filesystem::path& path);

}  // namespace grindwatch
