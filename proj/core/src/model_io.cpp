#include "grindwatch/model_io.hpp"

#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>

#include "grindwatch/error.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace grindwatch {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "class_means_ld", "direction",   "explained_variance_ratio", "format_version",
      "hold_count",     "loadings",    "mean",                     "n_train",
      "priors",         "resample_length", "ridge",               "scale",
      "singular_values", "threshold",  "training_fingerprint",     "warning_fraction",
  };
  return keys;
}

json to_array(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
  throw Error(Errc::SchemaError, what, std::nullopt, pointer);
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) schema_error(std::string("/") + key, "missing field");
  return *it;
}

double as_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) schema_error(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(pointer, "expected a finite number");
  return v;
}

std::uint64_t as_count(const json& j, const std::string& pointer) {
  if (!j.is_number_unsigned()) schema_error(pointer, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& pointer) {
  if (!j.is_array()) schema_error(pointer, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], pointer + "/" + std::to_string(i));
  }
  return v;
}

}  // namespace

std::string save_model(const ModelBundle& b) {
  validate(b);
  json doc = json::object();
  doc["format_version"] = b.format_version;
  doc["resample_length"] = b.resample_length;
  doc["mean"] = to_array(b.pca.mean);
  doc["scale"] = to_array(b.pca.scale);
  json loadings = json::array();
  for (Eigen::Index j = 0; j < b.pca.loadings.cols(); ++j) {
    loadings.push_back(to_array(b.pca.loadings.col(j)));
  }
  doc["loadings"] = std::move(loadings);
  doc["singular_values"] = to_array(b.pca.singular_values);
  doc["explained_variance_ratio"] = to_array(b.pca.explained_variance_ratio);
  doc["n_train"] = b.pca.n_train;
  doc["direction"] = to_array(b.lda.direction);
  doc["class_means_ld"] = json::array({b.lda.mean_no_burn, b.lda.mean_burn});
  doc["threshold"] = b.lda.threshold;
  doc["priors"] = json::array({b.lda.priors.no_burn, b.lda.priors.burn});
  doc["ridge"] = b.lda.ridge;
  doc["warning_fraction"] = b.monitor.warning_fraction;
  doc["hold_count"] = b.monitor.hold_count;
  doc["training_fingerprint"] = b.training_fingerprint;
  return doc.dump(1, '\t') + "\n";
}

void save_model(const ModelBundle& bundle, std::ostream& sink) {
  sink << save_model(bundle);
  if (!sink) throw Error(Errc::IoError, "model write failed");
}

void save_model_file(const ModelBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path, save_model(bundle));
}

ModelBundle load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    schema_error("", std::string("not a well-formed document: ") + e.what());
  }
  if (!doc.is_object()) schema_error("", "expected a JSON object");

  const json& version = field(doc, "format_version");
  if (!version.is_number_integer()) schema_error("/format_version", "expected an integer");
  if (version.get<long long>() != ModelBundle::kFormatVersion) {
    throw Error(Errc::VersionMismatch, "unsupported format_version " + version.dump() + " (expected " +
                                           std::to_string(ModelBundle::kFormatVersion) + ")");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) {
      throw Error(Errc::VersionMismatch, "unknown field '" + key + "' for format_version " +
                                             std::to_string(ModelBundle::kFormatVersion));
    }
  }

  ModelBundle b;
  b.format_version = ModelBundle::kFormatVersion;
  b.resample_length = as_count(field(doc, "resample_length"), "/resample_length");
  b.pca.mean = as_vector(field(doc, "mean"), "/mean");
  b.pca.scale = as_vector(field(doc, "scale"), "/scale");

  const json& loadings = field(doc, "loadings");
  if (!loadings.is_array()) schema_error("/loadings", "expected an array of components");
  b.pca.loadings.resize(b.pca.mean.size(), static_cast<Eigen::Index>(loadings.size()));
  for (std::size_t j = 0; j < loadings.size(); ++j) {
    const std::string ptr = "/loadings/" + std::to_string(j);
    Eigen::VectorXd col = as_vector(loadings[j], ptr);
    if (col.size() != b.pca.mean.size()) {
      throw Error(Errc::CorruptModel, "loading length differs from mean length", std::nullopt, ptr);
    }
    b.pca.loadings.col(static_cast<Eigen::Index>(j)) = col;
  }
  b.pca.singular_values = as_vector(field(doc, "singular_values"), "/singular_values");
  b.pca.explained_variance_ratio =
      as_vector(field(doc, "explained_variance_ratio"), "/explained_variance_ratio");
  b.pca.n_train = as_count(field(doc, "n_train"), "/n_train");

  b.lda.direction = as_vector(field(doc, "direction"), "/direction");
  const Eigen::VectorXd means = as_vector(field(doc, "class_means_ld"), "/class_means_ld");
  if (means.size() != 2) schema_error("/class_means_ld", "expected [no_burn, burn]");
  b.lda.mean_no_burn = means[0];
  b.lda.mean_burn = means[1];
  b.lda.threshold = as_number(field(doc, "threshold"), "/threshold");
  const Eigen::VectorXd priors = as_vector(field(doc, "priors"), "/priors");
  if (priors.size() != 2) schema_error("/priors", "expected [no_burn, burn]");
  b.lda.priors = {priors[0], priors[1]};
  b.lda.ridge = as_number(field(doc, "ridge"), "/ridge");

  b.monitor.warning_fraction = as_number(field(doc, "warning_fraction"), "/warning_fraction");
  b.monitor.hold_count = as_count(field(doc, "hold_count"), "/hold_count");

  const json& fp = field(doc, "training_fingerprint");
  if (!fp.is_string()) schema_error("/training_fingerprint", "expected a string");
  b.training_fingerprint = fp.get<std::string>();

  try {
    validate(b);
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptModel) throw;
    throw Error(Errc::CorruptModel, e.what());
  }
  return b;
}

ModelBundle load_model(std::istream& source) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return load_model(std::string_view{text});
}

ModelBundle load_model_file(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  try {
    return load_model(std::string_view{text});
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace grindwatch
