#include "grindwatch/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "grindwatch/error.hpp"
#include "grindwatch/stats.hpp"
#include "text_util.hpp"

namespace grindwatch {

std::vector<HealthClass> require_labels(const TraceMatrix& matrix) {
  std::vector<HealthClass> labels;
  labels.reserve(matrix.meta.size());
  for (std::size_t i = 0; i < matrix.meta.size(); ++i) {
    const auto label = matrix.meta[i].label();
    if (!label) {
      throw Error(Errc::UnlabeledRow, "unit '" + matrix.meta[i].unit_id + "' has no burn_rank", i + 1);
    }
    labels.push_back(*label);
  }
  return labels;
}

std::string training_fingerprint(const TraceMatrix& matrix) {
  std::string bytes;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto& m = matrix.meta[i];
    bytes += m.unit_id + ',' + m.wheel_id + ',' + std::to_string(m.parts_ground) + ',';
    if (m.burn_rank) bytes += std::to_string(*m.burn_rank);
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      bytes += ',';
      detail::append_double(bytes, matrix.values(static_cast<Eigen::Index>(i), j));
    }
    bytes += '\n';
  }
  return "fnv1a64:" + fnv1a64_hex(bytes);
}

FitResult fit_model(const TraceMatrix& matrix, const FitOptions& options) {
  validate(options.monitor);
  if (matrix.rows() == 0) throw Error(Errc::EmptyCampaign, "no training observations");
  if (matrix.resample_length != options.resample_length || matrix.cols() != options.resample_length) {
    throw Error(Errc::DimensionMismatch, "matrix was not resampled to the requested length");
  }
  const auto labels = require_labels(matrix);

  PcaOptions pca_opts = options.pca;
  if (matrix.rows() > 2) {
    const std::size_t cap = matrix.rows() - 2;
    pca_opts.max_components = pca_opts.max_components > 0 ? std::min(pca_opts.max_components, cap) : cap;
  }

  FitResult out;
  ModelBundle& b = out.bundle;
  b.resample_length = options.resample_length;
  b.pca = fit_pca(matrix, pca_opts);
  const Eigen::MatrixXd scores = project_rows(b.pca, matrix.values);
  b.lda = fit_lda(scores, labels, options.lda);
  b.monitor = options.monitor;
  b.training_fingerprint = training_fingerprint(matrix);
  validate(b);

  FitSummary& s = out.summary;
  s.n = matrix.rows();
  s.resample_length = options.resample_length;
  s.components = b.pca.components();
  s.explained = explained_variance_report(b.pca);
  s.n_burn = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), HealthClass::Burn));
  s.n_no_burn = labels.size() - s.n_burn;
  s.threshold = b.lda.threshold;
  s.warning_limit = b.warning_limit();
  return out;
}

std::vector<Prediction> predict(const ModelBundle& bundle, const TraceMatrix& matrix) {
  if (matrix.cols() != bundle.resample_length) {
    throw Error(Errc::DimensionMismatch, "matrix length differs from the model's resample length");
  }
  const Eigen::MatrixXd scores = project_rows(bundle.pca, matrix.values);
  std::vector<Prediction> out;
  out.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto v = classify(bundle.lda, scores.row(static_cast<Eigen::Index>(i)).transpose(),
                            matrix.meta[i].unit_id);
    out.push_back({matrix.meta[i], v.ld1, v.health, matrix.meta[i].label()});
  }
  return out;
}

namespace {

std::size_t class_index(HealthClass c) { return c == HealthClass::Burn ? 1 : 0; }

}  // namespace

std::size_t ConfusionMatrix::at(HealthClass predicted, HealthClass actual) const {
  return counts[class_index(predicted)][class_index(actual)];
}

std::size_t ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

std::optional<ConfusionMatrix> confusion_matrix(const std::vector<Prediction>& predictions) {
  ConfusionMatrix cm;
  bool any = false;
  for (const auto& p : predictions) {
    if (!p.actual) continue;
    any = true;
    ++cm.counts[class_index(p.predicted)][class_index(*p.actual)];
  }
  if (!any) return std::nullopt;
  return cm;
}

std::string format_predictions_csv(const std::vector<Prediction>& predictions) {
  std::string out = "unit_id,wheel_id,parts_ground,ld1,predicted,actual\n";
  for (const auto& p : predictions) {
    out += p.meta.unit_id + ',' + p.meta.wheel_id + ',' + std::to_string(p.meta.parts_ground) + ',';
    detail::append_double(out, p.ld1);
    out += ',';
    out += health_class_name(p.predicted);
    out += ',';
    if (p.actual) out += health_class_name(*p.actual);
    out += '\n';
  }
  return out;
}

std::string format_confusion(const ConfusionMatrix& cm) {
  std::string out = "predicted \\ actual,NoBurn,Burn\n";
  out += "NoBurn," + std::to_string(cm.counts[0][0]) + ',' + std::to_string(cm.counts[0][1]) + '\n';
  out += "Burn," + std::to_string(cm.counts[1][0]) + ',' + std::to_string(cm.counts[1][1]) + '\n';
  return out;
}

ScoreReport build_report(const ModelBundle& bundle, const TraceMatrix& matrix) {
  if (matrix.cols() != bundle.resample_length) {
    throw Error(Errc::DimensionMismatch, "matrix length differs from the model's resample length");
  }
  ScoreReport r;
  r.meta = matrix.meta;
  r.pc_scores = project_rows(bundle.pca, matrix.values);
  r.threshold = bundle.lda.threshold;
  r.warning_limit = bundle.warning_limit();
  for (Eigen::Index i = 0; i < r.pc_scores.rows(); ++i) {
    const auto v = classify(bundle.lda, r.pc_scores.row(i).transpose());
    r.ld1.push_back(v.ld1);
    r.predicted.push_back(v.health);
  }

  std::vector<double> index(matrix.rows());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
  double best = -1.0;
  for (Eigen::Index j = 0; j < r.pc_scores.cols(); ++j) {
    std::vector<double> col(r.pc_scores.col(j).data(), r.pc_scores.col(j).data() + r.pc_scores.rows());
    const double c = std::abs(spearman(col, index));
    r.pc_index_correlation.push_back(c);
    if (c > best) {
      best = c;
      r.wear_axis = static_cast<std::size_t>(j);
    }
  }
  r.ld1_index_correlation = std::abs(spearman(r.ld1, index));
  return r;
}

std::string format_report_csv(const ScoreReport& r) {
  std::string out = "observation,unit_id,wheel_id,parts_ground,burn_rank";
  for (Eigen::Index j = 0; j < r.pc_scores.cols(); ++j) out += ",pc" + std::to_string(j + 1);
  out += ",ld1,predicted,threshold,warning_limit,wear_axis\n";
  const std::string wear_axis = "pc" + std::to_string(r.wear_axis + 1);
  for (std::size_t i = 0; i < r.meta.size(); ++i) {
    const auto& m = r.meta[i];
    out += std::to_string(i + 1) + ',' + m.unit_id + ',' + m.wheel_id + ',' + std::to_string(m.parts_ground) + ',';
    if (m.burn_rank) out += std::to_string(*m.burn_rank);
    for (Eigen::Index j = 0; j < r.pc_scores.cols(); ++j) {
      out += ',';
      detail::append_double(out, r.pc_scores(static_cast<Eigen::Index>(i), j));
    }
    out += ',';
    detail::append_double(out, r.ld1[i]);
    out += ',';
    out += health_class_name(r.predicted[i]);
    out += ',';
    detail::append_double(out, r.threshold);
    out += ',';
    detail::append_double(out, r.warning_limit);
    out += ',' + wear_axis + '\n';
  }
  return out;
}

MonitorRun run_monitor(const ModelBundle& bundle, const std::vector<PowerTrace>& traces) {
  MonitorRun run;
  run.final_state = MonitorState::start(bundle);
  for (const auto& trace : traces) {
    Observation step = observe(run.final_state, bundle, trace);
    run.events.push_back(std::move(step.event));
    run.final_state = std::move(step.state);
  }
  return run;
}

}  // namespace grindwatch
