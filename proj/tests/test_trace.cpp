#include <algorithm>
#include <fstream>
#include <numeric>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "grindwatch/error.hpp"
#include "grindwatch/simgrind.hpp"
#include "grindwatch/trace.hpp"
#include "support.hpp"

using namespace grindwatch;

namespace {

Errc parse_error_code(std::string_view text, std::optional<std::size_t>* row = nullptr) {
  try {
    parse_trace_csv(text);
  } catch (const Error& e) {
    if (row) *row = e.row();
    return e.code();
  }
  FAIL("expected a parse error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("parse_trace_csv reads samples in file order") {
  const auto t = parse_trace_csv("time_s,power_kw\n0.00,0.1\n0.05,0.9\n0.10,0.2");
  REQUIRE(t.samples.size() == 3);
  CHECK(t.samples[0] == Sample{0.0, 0.1});
  CHECK(t.samples[1] == Sample{0.05, 0.9});
  CHECK(t.samples[2] == Sample{0.10, 0.2});
  CHECK(t.samples[1].time_s - t.samples[0].time_s == doctest::Approx(0.05));
}

TEST_CASE("parse_trace_csv accepts CRLF, a BOM and trailing blank lines") {
  const auto t = parse_trace_csv("\xEF\xBB\xBFtime_s,power_kw\r\n0,1\r\n1,2\r\n\r\n");
  REQUIRE(t.samples.size() == 2);
  CHECK(t.samples[1].power_kw == 2.0);
}

TEST_CASE("parse_trace_csv error contract") {
  std::optional<std::size_t> row;
  CHECK(parse_error_code("time_s,power_kw\n0.0,1.0\n0.0,2.0", &row) == Errc::NonMonotoneTime);
  CHECK(row == 2u);

  CHECK(parse_error_code("time,power\n0,1\n1,2") == Errc::MalformedHeader);
  CHECK(parse_error_code("") == Errc::MalformedHeader);

  CHECK(parse_error_code("time_s,power_kw\n0,1\n1,abc", &row) == Errc::NonNumericField);
  CHECK(row == 2u);
  CHECK(parse_error_code("time_s,power_kw\n0,1,3\n1,2", &row) == Errc::NonNumericField);
  CHECK(row == 1u);
  CHECK(parse_error_code("time_s,power_kw\n0,\n1,2") == Errc::NonNumericField);

  CHECK(parse_error_code("time_s,power_kw\n0,nan\n1,2", &row) == Errc::InvalidValue);
  CHECK(row == 1u);
  CHECK(parse_error_code("time_s,power_kw\n0,1\ninf,2") == Errc::InvalidValue);

  CHECK(parse_error_code("time_s,power_kw\n0,1") == Errc::TooFewSamples);
  CHECK(parse_error_code("time_s,power_kw\n") == Errc::TooFewSamples);
  CHECK(parse_error_code("time_s,power_kw\n1,1\n0.5,2", &row) == Errc::NonMonotoneTime);
}

TEST_CASE("2048 simulated rows at 50 ms span 102.35 s") {
  WheelScenario s = default_preset().wheels[0];
  s.trace_length_s = 102.35;
  const auto generated = generate_trace(s, 500, 0);
  const auto parsed = parse_trace_csv(serialize_trace_csv(generated));
  REQUIRE(parsed.samples.size() == 2048);
  CHECK(parsed.duration_s() == doctest::Approx((2048 - 1) * 0.05).epsilon(1e-12));
}

TEST_CASE("serialize then parse reproduces every double exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> step(1e-6, 3.0);
  std::normal_distribution<double> power(0.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    PowerTrace t;
    double time = power(rng);
    const int n = 2 + trial * 7;
    for (int i = 0; i < n; ++i) {
      t.samples.push_back({time, power(rng) * std::pow(10.0, trial % 9 - 4)});
      time += step(rng);
    }
    const auto back = parse_trace_csv(serialize_trace_csv(t));
    REQUIRE(back.samples == t.samples);
  }
}

TEST_CASE("resample linear interpolation") {
  const auto t = testing::make_trace({{0.0, 0.0}, {0.05, 1.0}, {0.10, 2.0}});
  const auto r = resample(t, 5);
  REQUIRE(r.size() == 5);
  const double expected[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  for (int i = 0; i < 5; ++i) CHECK(r[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(r[0] == 0.0);
  CHECK(r[4] == 2.0);

  CHECK_THROWS_AS(resample(t, 1), Error);
  try {
    resample(t, 0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadResampleLength);
  }
}

TEST_CASE("resample at native length on uniform spacing is the identity") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(3.0, 1.0);
  std::vector<Sample> s;
  for (int i = 0; i < 300; ++i) s.push_back({i / 20.0, dist(rng)});
  const auto r = resample(testing::make_trace(s), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(r[static_cast<Eigen::Index>(i)] - s[i].power_kw) < 1e-12);
}

TEST_CASE("sine resampled up and back down round-trips within 1e-3") {
  std::vector<Sample> s;
  for (int i = 0; i < 100; ++i) {
    const double t = i / 20.0;
    s.push_back({t, std::sin(2.0 * std::numbers::pi * t / 4.95)});
  }
  const auto up = resample(testing::make_trace(s), 1000);
  std::vector<Sample> fine;
  const double t_last = s.back().time_s;
  for (Eigen::Index i = 0; i < up.size(); ++i) fine.push_back({t_last * static_cast<double>(i) / 999.0, up[i]});
  const auto down = resample(testing::make_trace(fine), 100);
  double max_err = 0.0;
  for (int i = 0; i < 100; ++i) max_err = std::max(max_err, std::abs(down[i] - s[static_cast<std::size_t>(i)].power_kw));
  CHECK(max_err < 1e-3);
}

TEST_CASE("resample is exact on affine signals for any length") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> gap(0.001, 0.5);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<std::size_t> len(2, 700);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = coef(rng), b = coef(rng);
    std::vector<Sample> s;
    double t = coef(rng);
    const int n = 2 + trial;
    for (int i = 0; i < n; ++i) {
      s.push_back({t, a + b * t});
      t += gap(rng);
    }
    const std::size_t l = len(rng);
    const auto r = resample(testing::make_trace(s), l);
    const double t0 = s.front().time_s, t1 = s.back().time_s;
    for (std::size_t i = 0; i < l; ++i) {
      const double ti = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(l - 1);
      REQUIRE(std::abs(r[static_cast<Eigen::Index>(i)] - (a + b * ti)) < 1e-12);
    }
  }
}

TEST_CASE("burn rank maps to the binary class") {
  CHECK(class_from_burn_rank(1) == HealthClass::NoBurn);
  CHECK(class_from_burn_rank(2) == HealthClass::Burn);
  CHECK(class_from_burn_rank(3) == HealthClass::Burn);
  CHECK_THROWS_AS(class_from_burn_rank(0), Error);
  CHECK_THROWS_AS(class_from_burn_rank(4), Error);
}

TEST_CASE("manifest parsing and validation") {
  const auto m = parse_manifest_csv(
      "trace_file,unit_id,wheel_id,parts_ground,burn_rank\n"
      "a.csv,u1,w1,10,1\n"
      "b.csv,u2,w1,10,2\r\n"
      "c.csv,u3,w2,5,\n",
      "/base");
  REQUIRE(m.entries.size() == 3);
  CHECK(m.entries[1].meta.burn_rank == 2);
  CHECK_FALSE(m.entries[2].meta.burn_rank.has_value());
  CHECK(m.resolve(m.entries[0]) == std::filesystem::path("/base/a.csv"));
  CHECK(parse_manifest_csv(serialize_manifest_csv(m), "/base").entries == m.entries);

  const auto code_of = [](std::string_view text) {
    try {
      parse_manifest_csv(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  const std::string hdr = "trace_file,unit_id,wheel_id,parts_ground,burn_rank\n";
  CHECK(code_of("file,unit\n") == Errc::MalformedHeader);
  CHECK(code_of(hdr + "a.csv,u1,w1,10,1\nb.csv,u1,w1,20,1\n") == Errc::ManifestError);
  CHECK(code_of(hdr + "a.csv,u1,w1,10,1\nb.csv,u1,w2,20,1\n") == Errc::IoError);  // same id, other wheel: fine
  CHECK(code_of(hdr + "a.csv,u1,w1,20,1\nb.csv,u2,w1,10,1\n") == Errc::ManifestError);
  CHECK(code_of(hdr + "a.csv,u1,w1,-3,1\n") == Errc::NonNumericField);
  CHECK(code_of(hdr + "a.csv,u1,w1,3,5\n") == Errc::ManifestError);
  CHECK(code_of(hdr + "a.csv,u1,w1\n") == Errc::ManifestError);
}

TEST_CASE("build_matrix shape, metadata and error contract") {
  testing::TempDir dir;
  CampaignManifest m;
  m.base_dir = dir.path();
  for (int i = 0; i < 3; ++i) {
    auto t = testing::make_trace({{0.0, 1.0 * i}, {1.0, 2.0 * i}, {2.5, 0.5}});
    write_trace_file(t, dir / ("t" + std::to_string(i) + ".csv"));
    m.entries.push_back({"t" + std::to_string(i) + ".csv", {"u" + std::to_string(i), "w", 100u * i, 1}});
  }
  const auto x = build_matrix(m, 512);
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 512);
  CHECK(x.resample_length == 512);
  CHECK(x.meta[2].unit_id == "u2");
  CHECK(x.values(1, 0) == 1.0);
  CHECK(x.values(2, 511) == 0.5);

  m.entries.push_back({"missing.csv", {"u9", "w", 500, 1}});
  try {
    build_matrix(m, 512);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingFile);
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }

  write_trace_file(testing::make_trace({{0.0, 1.0}, {1.0, 2.0}}), dir / "bad.csv");
  {
    std::ofstream f(dir / "bad.csv");
    f << "time_s,power_kw\n0,1\n0,2\n";
  }
  m.entries.back() = {"bad.csv", {"u9", "w", 500, 1}};
  try {
    build_matrix(m, 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonMonotoneTime);
    CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
  }

  CampaignManifest empty;
  try {
    build_matrix(empty, 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCampaign);
  }
  CHECK_THROWS_AS(build_matrix(m, 1), Error);
}

TEST_CASE("build_matrix is permutation-equivariant") {
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist(0.0, 1.0);
  CampaignManifest m;
  m.base_dir = dir.path();
  for (int i = 0; i < 8; ++i) {
    std::vector<Sample> s;
    for (int j = 0; j < 40; ++j) s.push_back({j * 0.05, dist(rng)});
    const std::string name = "t" + std::to_string(i) + ".csv";
    write_trace_file(testing::make_trace(s), dir / name);
    m.entries.push_back({name, {"u" + std::to_string(i), "w" + std::to_string(i), 0, 1}});
  }
  const auto base = build_matrix(m, 64);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::size_t> perm(m.entries.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    CampaignManifest pm;
    pm.base_dir = m.base_dir;
    for (auto p : perm) pm.entries.push_back(m.entries[p]);
    const auto x = build_matrix(pm, 64);
    for (std::size_t r = 0; r < perm.size(); ++r) {
      CHECK(x.values.row(static_cast<Eigen::Index>(r)) == base.values.row(static_cast<Eigen::Index>(perm[r])));
      CHECK(x.meta[r] == base.meta[perm[r]]);
    }
  }
}
