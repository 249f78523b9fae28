// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are fixed here and never tuned at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "grindwatch/model_io.hpp"
#include "grindwatch/pipeline.hpp"
#include "grindwatch/simgrind.hpp"
#include "oracles/jacobi_eigen.hpp"
#include "support.hpp"

using namespace grindwatch;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kTable2MaxSeconds = 5.0;
constexpr double kEigTol = 1e-8;
constexpr double kCosineTol = 1e-8;
constexpr double kFisherSlack = 1e-9;
constexpr double kGridAngleDeg = 0.5;
constexpr double kLd1IndexRho = 0.9;
constexpr double kPcIndexRho = 0.8;
constexpr double kReloadTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

FitResult fit_wheel1(std::uint64_t seed, std::size_t length = kDefaultResampleLength) {
  const auto x = build_matrix(generate_wheel(default_preset(seed).wheel("wheel1")), length);
  FitOptions o;
  o.resample_length = length;
  return fit_model(x, o);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// 1 -------------------------------------------------------------------------
Outcome table2_reproduction() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  testing::TempDir dir;
  generate_campaign(default_preset(kSeed), dir / "default");
  generate_campaign(table2_counts_preset(kSeed), dir / "table2");

  const auto train = build_matrix(read_manifest_file(dir / "default/wheel1.csv"), kDefaultResampleLength);
  const auto model = fit_model(train).bundle;

  const std::pair<const char*, ConfusionMatrix> expected[] = {
      {"wheel2", ConfusionMatrix{{{{66, 0}, {0, 3}}}}},
      {"wheel3", ConfusionMatrix{{{{47, 0}, {0, 3}}}}},
  };
  std::string summary;
  for (const auto& [wheel, want] : expected) {
    const auto x = build_matrix(read_manifest_file(dir / "table2" / (std::string(wheel) + ".csv")),
                                model.resample_length);
    const auto cm = confusion_matrix(predict(model, x));
    o.require(cm.has_value(), std::string(wheel) + ": no labels");
    if (!cm) continue;
    summary += std::string(wheel) + " [[" + std::to_string(cm->counts[0][0]) + "," +
               std::to_string(cm->counts[0][1]) + "],[" + std::to_string(cm->counts[1][0]) + "," +
               std::to_string(cm->counts[1][1]) + "]] ";
    o.require(*cm == want, std::string(wheel) + " confusion matrix differs: " + summary);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < kTable2MaxSeconds, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = summary + "in " + fmt(secs) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome pca_oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 8);
  double worst_eig = 0.0, worst_cos = 1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng), l = dim(rng);
    const Eigen::MatrixXd x = testing::random_matrix(rng, n, l);
    const auto k = static_cast<std::size_t>(std::min(n - 1, l));
    const auto model = fit_pca(x, {ComponentCount{k}});

    oracle::Matrix rows(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(l)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < l; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x(i, j);
    const auto eig = oracle::jacobi_eigen(oracle::sample_covariance(rows));

    for (std::size_t c = 0; c < k; ++c) {
      const double sv = model.singular_values[static_cast<Eigen::Index>(c)];
      const double err = std::abs(sv * sv / (n - 1) - eig.values[c]);
      worst_eig = std::max(worst_eig, err);
      // Sign convention applied to the oracle vector before comparing.
      Eigen::MatrixXd v(l, 1);
      for (int j = 0; j < l; ++j) v(j, 0) = eig.vectors[c][static_cast<std::size_t>(j)];
      apply_sign_convention(v);
      const double cosine = v.col(0).dot(model.loadings.col(static_cast<Eigen::Index>(c))) / v.col(0).norm();
      worst_cos = std::min(worst_cos, cosine);
    }
  }
  o.require(worst_eig <= kEigTol, "eigenvalue error " + fmt(worst_eig));
  o.require(worst_cos >= 1.0 - kCosineTol, "min cosine 1-" + fmt(1.0 - worst_cos));
  if (o.pass) o.detail = "200 matrices, max |eig err| " + fmt(worst_eig) + ", min cosine 1-" + fmt(1.0 - worst_cos);
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome lda_optimality() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> kdist(1, 3);
  std::uniform_int_distribution<int> ndist(8, 40);
  double worst_angle = 0.0;
  int grid_checked = 0;
  for (int problem = 0; problem < 50; ++problem) {
    const int k = kdist(rng);
    const int n_nb = ndist(rng), n_b = ndist(rng);
    const Eigen::MatrixXd mix = testing::random_matrix(rng, k, k) + 0.5 * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd offset = testing::random_matrix(rng, k, 1, 2.0);
    Eigen::MatrixXd scores(n_nb + n_b, k);
    std::vector<HealthClass> labels;
    for (int i = 0; i < n_nb + n_b; ++i) {
      Eigen::VectorXd v = mix * testing::random_matrix(rng, k, 1);
      if (i >= n_nb) v += offset;
      scores.row(i) = v.transpose();
      labels.push_back(i >= n_nb ? HealthClass::Burn : HealthClass::NoBurn);
    }
    const auto model = fit_lda(scores, labels);
    const double best = fisher_ratio(scores, labels, model.direction);
    for (int s = 0; s < 10000; ++s) {
      Eigen::VectorXd w = testing::random_matrix(rng, k, 1);
      w.normalize();
      const double r = fisher_ratio(scores, labels, w);
      if (r > best + kFisherSlack * std::max(1.0, best)) {
        o.require(false, "problem " + std::to_string(problem) + ": random ratio " + fmt(r) + " > fitted " + fmt(best));
        break;
      }
    }
    if (k <= 2) {
      ++grid_checked;
      double grid_best = -1.0;
      Eigen::VectorXd grid_dir;
      if (k == 1) {
        grid_dir = Eigen::VectorXd::Ones(1);
      } else {
        for (int i = 0; i < 36000; ++i) {
          const double a = std::numbers::pi * i / 36000.0;
          const Eigen::Vector2d w(std::cos(a), std::sin(a));
          const double r = fisher_ratio(scores, labels, w);
          if (r > grid_best) {
            grid_best = r;
            grid_dir = w;
          }
        }
      }
      const double cosine = std::min(1.0, std::abs(grid_dir.dot(model.direction)));
      const double angle = std::acos(cosine) * 180.0 / std::numbers::pi;
      worst_angle = std::max(worst_angle, angle);
      o.require(angle <= kGridAngleDeg, "grid angle " + fmt(angle) + " deg");
    }
  }
  if (o.pass) {
    o.detail = "50 problems x 10^4 directions; " + std::to_string(grid_checked) + " grid checks, max angle " +
               fmt(worst_angle) + " deg";
  }
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome wear_trend() {
  Outcome o;
  const auto x = build_matrix(generate_wheel(default_preset(kSeed).wheel("wheel1")), kDefaultResampleLength);
  const auto model = fit_model(x).bundle;
  const auto report = build_report(model, x);
  const double pc_best = report.pc_index_correlation[report.wear_axis];
  o.require(report.ld1_index_correlation >= kLd1IndexRho, "|rho(ld1)| = " + fmt(report.ld1_index_correlation));
  o.require(pc_best >= kPcIndexRho, "best |rho(pc)| = " + fmt(pc_best));
  if (o.pass) {
    o.detail = "|rho(ld1)| " + fmt(report.ld1_index_correlation) + ", wear axis pc" +
               std::to_string(report.wear_axis + 1) + " |rho| " + fmt(pc_best);
  }
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome early_warning() {
  Outcome o;
  std::uint64_t min_lead = std::numeric_limits<std::uint64_t>::max();
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto model = fit_wheel1(seed).bundle;
    for (const auto& base : default_preset(seed).wheels) {
      const auto wheel = lifetime_scenario(base);
      const auto traces = generate_wheel(wheel);
      const auto run = run_monitor(model, traces);
      ++runs;
      std::optional<std::uint64_t> warn_at, burn_at;
      for (std::size_t i = 0; i < run.events.size(); ++i) {
        if (!run.events[i].alert) continue;
        if (run.events[i].state == ToolState::Warning) warn_at = traces[i].meta.parts_ground;
        if (run.events[i].state == ToolState::Burn) burn_at = traces[i].meta.parts_ground;
      }
      const std::string tag = "seed " + std::to_string(seed) + " " + wheel.wheel_id;
      o.require(warn_at.has_value(), tag + ": no Warning transition");
      o.require(burn_at.has_value(), tag + ": no Burn transition");
      if (!warn_at || !burn_at) continue;
      o.require(*warn_at < wheel.burn_onset_parts, tag + ": warning at " + std::to_string(*warn_at));
      o.require(*burn_at >= wheel.burn_onset_parts, tag + ": burn at " + std::to_string(*burn_at));
      if (*warn_at < wheel.burn_onset_parts) min_lead = std::min(min_lead, wheel.burn_onset_parts - *warn_at);
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " lifetime runs, min warning lead " + std::to_string(min_lead) + " parts";
  return o;
}

// 6 -------------------------------------------------------------------------
bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    if (!fs::exists(b / rel)) {
      why = "missing " + rel.string();
      return false;
    }
    std::ifstream fa(entry.path(), std::ios::binary), fb(b / rel, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      why = "differs: " + rel.string();
      return false;
    }
    ++files;
  }
  std::size_t files_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b)) files_b += entry.is_regular_file();
  if (files != files_b) {
    why = "file counts differ";
    return false;
  }
  return true;
}

Outcome determinism_and_persistence() {
  Outcome o;
  const auto model = fit_wheel1(kSeed).bundle;
  const std::string first = save_model(model);
  const auto loaded = load_model(first);
  o.require(save_model(loaded) == first, "save->load->save not byte-identical");

  double worst = 0.0;
  const auto preset = table2_counts_preset(kSeed);
  for (const auto& wheel : preset.wheels) {
    const auto x = build_matrix(generate_wheel(wheel), model.resample_length);
    const auto a = predict(model, x);
    const auto b = predict(loaded, x);
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a[i].ld1 - b[i].ld1));
      o.require(a[i].predicted == b[i].predicted, "verdict changed after reload");
    }
  }
  o.require(worst <= kReloadTol, "reload LD1 drift " + fmt(worst));

  testing::TempDir dir;
  generate_campaign(default_preset(kSeed), dir / "a");
  generate_campaign(default_preset(kSeed), dir / "b");
  std::string why;
  o.require(same_tree(dir / "a", dir / "b", why), "campaign " + why);
  generate_campaign(table2_counts_preset(kSeed), dir / "c");
  generate_campaign(table2_counts_preset(kSeed), dir / "d");
  o.require(same_tree(dir / "c", dir / "d", why), "campaign " + why);

  if (o.pass) o.detail = "model bytes stable, max reload |dLD1| " + fmt(worst) + ", campaigns identical";
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome state_machine_exhaustive() {
  Outcome o;
  const double warning_limit = 0.0, threshold = 1.0;
  // Representatives of each LD1 region, including both boundaries.
  const std::vector<double> readings = {-5.0, std::nextafter(warning_limit, -1.0), warning_limit, 0.5,
                                        std::nextafter(threshold, 0.0), threshold, 5.0};
  const ToolState states[] = {ToolState::Healthy, ToolState::Warning, ToolState::Burn};

  std::size_t combos = 0;
  for (std::size_t hold = 1; hold <= 4; ++hold) {
    const MonitorConfig cfg{0.8, hold};
    for (auto st : states) {
      for (std::size_t counter = 0; counter < hold; ++counter) {
        for (double ld1 : readings) {
          MonitorState s;
          s.state = st;
          s.warning_limit = warning_limit;
          s.consecutive_above = counter;
          HealthVerdict v{"u", ld1, ld1 >= threshold ? HealthClass::Burn : HealthClass::NoBurn, ld1 - threshold};
          const auto next = advance(s, cfg, threshold, v);
          ++combos;
          const int before = static_cast<int>(st), after = static_cast<int>(next.state.state);
          o.require(after >= before, "backward transition");
          o.require(after - before <= 1, "skipped a state");
          o.require(next.state.consecutive_above < hold, "counter escaped range");
          o.require(next.event.alert == (after != before), "alert flag mismatch");
          o.require(next.event.post_failure == (st == ToolState::Burn), "post_failure flag mismatch");
        }
      }
    }
  }

  // Every non-decreasing sequence over the representatives, length <= 8.
  std::size_t sequences = 0;
  const MonitorConfig cfg{0.8, 1};
  std::function<void(std::vector<double>&, std::size_t)> walk = [&](std::vector<double>& seq, std::size_t from) {
    if (!seq.empty()) {
      ++sequences;
      MonitorState s;
      s.warning_limit = warning_limit;
      std::optional<std::size_t> warn, burn;
      for (std::size_t i = 0; i < seq.size(); ++i) {
        HealthVerdict v{"u", seq[i], seq[i] >= threshold ? HealthClass::Burn : HealthClass::NoBurn, seq[i] - threshold};
        auto next = advance(s, cfg, threshold, v);
        if (next.event.alert && next.event.state == ToolState::Warning) warn = i;
        if (next.event.alert && next.event.state == ToolState::Burn) burn = i;
        s = std::move(next.state);
      }
      if (burn) o.require(warn && *warn < *burn, "Burn without earlier Warning");
    }
    if (seq.size() == 8) return;
    for (std::size_t r = from; r < readings.size(); ++r) {
      seq.push_back(readings[r]);
      walk(seq, r);
      seq.pop_back();
    }
  };
  std::vector<double> seq;
  walk(seq, 0);
  if (o.pass) {
    o.detail = std::to_string(combos) + " (state, region, counter, hold) transitions, " + std::to_string(sequences) +
               " non-decreasing sequences";
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 Table 2 reproduction", table2_reproduction},
      {"2 PCA oracle equivalence", pca_oracle_equivalence},
      {"3 LDA optimality", lda_optimality},
      {"4 Wear-trend property", wear_trend},
      {"5 Early-warning property", early_warning},
      {"6 Determinism & persistence", determinism_and_persistence},
      {"7 State-machine exhaustive check", state_machine_exhaustive},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s: %s\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str());
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
