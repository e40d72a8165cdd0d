#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "scenario.hpp"

using namespace homsim;

namespace {

const fs::path source_dir = HOM_SOURCE_DIR;

bool mentions(const std::vector<std::string>& issues, const std::string& text) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (auto f : hom::split_fields(line)) row.push_back(hom::parse_double(f));
    rows.push_back(row);
  }
  return rows;
}

Loaded small(const std::string& text) {
  auto loaded = parse_config(text, source_dir / "configs");
  EXPECT_TRUE(loaded.issues.empty()) << (loaded.issues.empty() ? "" : loaded.issues.front());
  return loaded;
}

}  // namespace

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Validate, PresetsAreClean) {
  for (const auto& entry : fs::directory_iterator(source_dir / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const auto loaded = load_config(entry.path());
    EXPECT_TRUE(loaded.issues.empty()) << entry.path() << ": "
                                       << (loaded.issues.empty() ? "" : loaded.issues.front());
  }
}

TEST(Validate, NegativeWidthNamesTheField) {
  const auto loaded = load_config(source_dir / "tests/data/negative-width.json");
  ASSERT_EQ(loaded.issues.size(), 1u);
  EXPECT_NE(loaded.issues[0].find("parameters.delta_omega"), std::string::npos);
}

TEST(Validate, EmptyTauRangeIsAnError) {
  const auto loaded = load_config(source_dir / "tests/data/empty-tau.json");
  EXPECT_TRUE(mentions(loaded.issues, "grids.tau: empty range"));
  const auto reversed = parse_config(
      R"({"scenario": "beat-curve", "grids": {"tau": {"min": 1, "max": -1, "points": 11}}})");
  EXPECT_TRUE(mentions(reversed.issues, "grids.tau: empty range"));
}

TEST(Validate, ReportsEveryProblemAtOnce) {
  const auto loaded = parse_config(R"({
    "scenario": "montecarlo",
    "parameters": {"delta": "pi", "delta_omega": -2},
    "montecarlo": {"n_pairs": 0, "bin_width": -0.1, "colour": 3},
    "extra": true
  })");
  EXPECT_TRUE(mentions(loaded.issues, "parameters.delta: must be a number"));
  EXPECT_TRUE(mentions(loaded.issues, "parameters.delta_omega: must be >= 0"));
  EXPECT_TRUE(mentions(loaded.issues, "montecarlo.n_pairs"));
  EXPECT_TRUE(mentions(loaded.issues, "montecarlo.bin_width"));
  EXPECT_TRUE(mentions(loaded.issues, "montecarlo.colour: unknown key"));
  EXPECT_TRUE(mentions(loaded.issues, "extra: unknown key"));
  EXPECT_TRUE(mentions(loaded.issues, "seed: required"));
  EXPECT_GE(loaded.issues.size(), 7u);
}

TEST(Validate, ScenarioAndModesChecked) {
  EXPECT_TRUE(mentions(parse_config(R"({})").issues, "scenario: missing"));
  EXPECT_TRUE(mentions(parse_config(R"({"scenario": "fig5"})").issues, "unknown scenario"));
  const auto modes = parse_config(R"({"scenario": "custom-modes", "modes": {
      "mode1": {"type": "csv", "path": "no-such-file.csv"},
      "mode2": {"type": "square"}}})");
  EXPECT_TRUE(mentions(modes.issues, "modes.mode1"));
  EXPECT_TRUE(mentions(modes.issues, "modes.mode2.type"));
}

TEST(Validate, UnparseableInputIsAParseError) {
  EXPECT_THROW(load_config(source_dir / "tests/data/bad-syntax.json"), ParseError);
  EXPECT_THROW(parse_config("[1, 2]"), ParseError);
}

TEST(Run, Fig2NullLineAndHomNull) {
  const auto loaded = small(R"({"scenario": "fig2-surface",
      "grids": {"tau": {"min": -2, "max": 2, "points": 41},
                "delta_tau": {"min": -2, "max": 2, "points": 21}}})");
  const auto result = run_scenario(loaded.config);
  ASSERT_EQ(result.files.size(), 1u);
  EXPECT_EQ(result.files[0].name, "fig2-surface.csv");
  EXPECT_EQ(result.files[0].content.substr(0, result.files[0].content.find('\n')),
            "delta_tau [pulse durations],tau [pulse durations],p_2hnu [1/pulse duration],"
            "p_2hnu numeric [1/pulse duration]");
  const auto rows = parse_csv(result.files[0].content);
  ASSERT_EQ(rows.size(), 21u * 41u);
  for (const auto& r : rows) {
    if (r[1] == 0.0) {
      EXPECT_EQ(r[2], 0.0);
      EXPECT_LT(std::abs(r[3]), 1e-15);
    }
    if (r[0] == 0.0) {
      EXPECT_EQ(r[2], 0.0);  // Delta = 0, no delay: no coincidences at all
      EXPECT_LT(std::abs(r[3]), 1e-12);
    }
  }
  // For each delay the coincidence density peaks near tau = +-delta_tau.
  for (double dtau : {-1.0, 1.0}) {
    double best = -1.0, at = 0.0;
    for (const auto& r : rows)
      if (r[0] == dtau && r[2] > best) {
        best = r[2];
        at = r[1];
      }
    EXPECT_NEAR(std::abs(at), 1.2, 0.15);
  }
}

TEST(Run, Fig3HalfWidths) {
  const auto loaded = small(R"({"scenario": "fig3-dip",
      "grids": {"tau": {"min": -3, "max": 3, "points": 241}, "delta_omega_values": [1, 2, 4]},
      "filter_windows": [0.05]})");
  const auto result = run_scenario(loaded.config);
  for (const auto& w : result.summary["dip_half_width"]) {
    const double expected = 2.0 / w["delta_omega"].get<double>();
    EXPECT_NEAR(w["closed_form"].get<double>(), expected, 0.02 * expected);
    EXPECT_NEAR(w["numeric"].get<double>(), expected, 0.02 * expected);
  }
  for (const auto& f : result.summary["filtered"])
    if (f["delta_omega"] == 4.0) EXPECT_GE(f["depth"].get<double>(), 0.99);
  const auto rows = parse_csv(result.files[0].content);
  EXPECT_EQ(rows[120][0], 0.0);
  for (std::size_t col = 1; col < rows[120].size() - 1; ++col) EXPECT_LT(std::abs(rows[120][col]), 1e-15);
}

TEST(Run, Fig4MinimumAndAsymptote) {
  const auto loaded = small(R"({"scenario": "fig4-surface",
      "grids": {"delta_tau": {"min": -6, "max": 6, "points": 25},
                "delta_omega": {"min": 0, "max": 4, "points": 3}}})");
  const auto result = run_scenario(loaded.config);
  EXPECT_EQ(result.summary["minimum"]["value"].get<double>(), 0.0);
  EXPECT_EQ(result.summary["minimum"]["delta_tau"].get<double>(), 0.0);
  EXPECT_EQ(result.summary["minimum"]["delta_omega"].get<double>(), 0.0);
  for (const auto& r : parse_csv(result.files[0].content))
    if (std::abs(r[1]) == 6.0) {
      EXPECT_NEAR(r[2], 0.5, 1e-12);
      EXPECT_NEAR(r[3], 0.5, 1e-6);
    }
  for (const auto& d : result.summary["dip"])
    EXPECT_NEAR(d["half_width"].get<double>(), 1.0, 0.01);
}

TEST(Run, BeatCurvePeriod) {
  const auto loaded = small(R"({"scenario": "beat-curve",
      "parameters": {"delta": 9.42477796076938},
      "grids": {"tau": {"min": -2, "max": 2, "points": 601}}})");
  const auto result = run_scenario(loaded.config);
  EXPECT_NEAR(result.summary["measured_period"].get<double>(), 2.0 / 3.0, 0.01 * 2.0 / 3.0);
}

TEST(Run, CustomModesMatchesGaussianPair) {
  // Two analytic Gaussians given as custom modes reproduce the preset pair.
  const auto loaded = small(R"({"scenario": "custom-modes",
      "modes": {"mode1": {"type": "gaussian", "center": 0.5, "carrier": -1.0},
                "mode2": {"type": "gaussian", "center": -0.5, "carrier": 1.0}},
      "grids": {"tau": {"min": -2, "max": 2, "points": 9}}})");
  const auto result = run_scenario(loaded.config);
  const hom::PhotonPairConfig cfg{1.0, 2.0, 0.0, 0.0};
  for (const auto& r : parse_csv(result.files[0].content)) EXPECT_NEAR(r[1], hom::p_2hnu(r[0], cfg), 1e-12);
  EXPECT_NEAR(result.summary["port_pairs"]["opposite"].get<double>(), hom::p_total_averaged(cfg), 1e-12);
}

TEST(Run, RerunsAreBitIdentical) {
  const std::string configs[] = {
      R"({"scenario": "fig2-surface", "parameters": {"delta": 1.5707963267948966},
          "grids": {"tau": {"min": -2, "max": 2, "points": 21}, "delta_tau": {"min": -1, "max": 1, "points": 5}}})",
      R"({"scenario": "fig3-dip", "grids": {"tau": {"min": -2, "max": 2, "points": 21}, "delta_omega_values": [2]}})",
      R"({"scenario": "fig4-surface", "grids": {"delta_tau": {"min": -2, "max": 2, "points": 9}, "delta_omega": {"min": 0, "max": 2, "points": 2}}})",
      R"({"scenario": "beat-curve", "parameters": {"delta": 3.0, "delta_omega": 0.5}, "grids": {"tau": {"min": -2, "max": 2, "points": 21}}})",
      R"({"scenario": "montecarlo", "seed": 7, "parameters": {"delta": 2.0, "delta_omega": 1.0},
          "montecarlo": {"n_pairs": 100000, "write_events": true}})",
      R"({"scenario": "custom-modes", "modes": {"mode1": {"type": "csv", "path": "modes/double-pulse.csv"},
          "mode2": {"type": "csv", "path": "modes/chirped.csv"}}, "grids": {"tau": {"min": -2, "max": 2, "points": 21}}})",
  };
  const auto tmp = fs::temp_directory_path() / "homsim-rerun";
  for (const auto& text : configs) {
    const auto loaded = small(text);
    fs::remove_all(tmp);
    write_outputs(tmp / "a", loaded, run_scenario(loaded.config));
    write_outputs(tmp / "b", loaded, run_scenario(loaded.config));
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(tmp / "a")) {
      const auto name = entry.path().filename();
      EXPECT_EQ(slurp(tmp / "a" / name), slurp(tmp / "b" / name)) << name;
      ++compared;
    }
    EXPECT_GE(compared, 2u);
  }
  fs::remove_all(tmp);
}

TEST(Run, ManifestChecksumsMatchFiles) {
  const auto loaded = small(R"({"scenario": "montecarlo", "seed": 3,
      "montecarlo": {"n_pairs": 2000, "write_events": true}})");
  const auto tmp = fs::temp_directory_path() / "homsim-manifest";
  fs::remove_all(tmp);
  write_outputs(tmp, loaded, run_scenario(loaded.config));
  const auto manifest = json::parse(slurp(tmp / "manifest.json"));
  EXPECT_EQ(manifest["scenario"], "montecarlo");
  EXPECT_EQ(manifest["config"]["seed"], 3);
  ASSERT_EQ(manifest["files"].size(), 3u);
  for (const auto& f : manifest["files"]) {
    const auto content = slurp(tmp / f["name"].get<std::string>());
    EXPECT_EQ(f["sha256"], sha256_hex(content));
    EXPECT_EQ(f["bytes"], content.size());
  }
  const auto sidecar = json::parse(slurp(tmp / "montecarlo-events.json"));
  EXPECT_EQ(sidecar["seed"], 3);
  fs::remove_all(tmp);
}
