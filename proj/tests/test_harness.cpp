#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace ptweyl;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({
    "version": 1,
    "mode": "semiclassical",
    "operator": {"h": 0.1, "div_terms": [{"beta": 1, "coeffs": {"0": [1, 0]}}], "potential": {"1": [1, 0]}},
    "plan": {"s": 1.0, "eps": 0.25, "coupling": 0.0},
    "regions": [{"type": "rect", "re": [0.0, 1.0], "im": [-0.5, 0.5]}],
    "trials": 2,
    "base_seed": 3,
    "K": 40,
    "grid": {"nx": 64, "nxi": 128}
  })");
}

json large_config() {
  return json::parse(R"({
    "version": 1,
    "mode": "large",
    "operator": {"h": 1.0, "div_terms": [{"beta": 1, "coeffs": {"0": [1, 0], "1": [0.25, 0], "-1": [-0.25, 0]}}]},
    "schedule": {"rho": 2.0, "beta": 0.0, "s": 1.0, "eps": 0.25},
    "regions": [{"type": "sector", "theta": [0.0, 6.283185307179586], "g": 1.0}],
    "lambdas": [100, 200, 400, 800],
    "trials": 2,
    "base_seed": 5,
    "K": 96,
    "grid": {"nx": 128, "nxi": 256}
  })");
}

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ptweyl_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesAndValidates) {
  const ExperimentConfig c = config_from_json(base_config());
  EXPECT_EQ(c.mode, WeylMode::semiclassical);
  EXPECT_EQ(c.trials, 2);
  EXPECT_EQ(c.K, 40);
  EXPECT_EQ(c.regions.size(), 1u);
  EXPECT_EQ(c.plan.overrides.coupling, std::optional<double>(0.0));
}

TEST(Config, ErrorsNameTheJsonPath) {
  json j = base_config();
  j.erase("version");
  EXPECT_NE(config_error(j).find("/version"), std::string::npos);
  j = base_config();
  j["version"] = 2;
  EXPECT_NE(config_error(j).find("/version"), std::string::npos);
  j = base_config();
  j["mode"] = "fast";
  EXPECT_NE(config_error(j).find("/mode"), std::string::npos);
  j = base_config();
  j["regions"][0]["type"] = "blob";
  EXPECT_NE(config_error(j).find("/regions/0/type"), std::string::npos);
  j = base_config();
  j["regions"][0]["re"] = json::array({0.0});
  EXPECT_NE(config_error(j).find("/regions/0"), std::string::npos);
  j = base_config();
  j["operator"]["div_terms"][0]["coeffs"]["x"] = json::array({1, 0});
  EXPECT_NE(config_error(j).find("/operator/div_terms/0/coeffs"), std::string::npos);
  j = base_config();
  j["trials"] = 0;
  EXPECT_NE(config_error(j).find("/trials"), std::string::npos);
  j = base_config();
  j["K"] = 4;
  EXPECT_NE(config_error(j).find("/K"), std::string::npos);
  j = base_config();
  j["regions"] = json::array();
  EXPECT_NE(config_error(j).find("/regions"), std::string::npos);
  j = large_config();
  j["operator"]["h"] = 0.5;
  EXPECT_NE(config_error(j).find("/operator/h"), std::string::npos);
  j = large_config();
  j["schedule"]["rho"] = 0.5;
  EXPECT_NE(config_error(j).find("/schedule"), std::string::npos);
}

TEST(Config, HashIgnoresOutputDirectory) {
  ExperimentConfig a = config_from_json(base_config());
  ExperimentConfig b = a;
  b.output_dir = "/somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.base_seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  // The canonical form parses back to the same hash.
  json canon = config_to_json(a);
  EXPECT_EQ(config_hash(config_from_json(canon)), config_hash(a));
}

TEST(Semiclassical, UncoupledTriangularModelCountsTheRealSpectrum) {
  json j = base_config();
  j["trials"] = 1;
  j["regions"] = json::array({json{{"type", "rect"}, {"re", {0.0, 1.0}}, {"im", {-0.5, 0.5}}},
                              json{{"type", "disc"}, {"center", {2.0, 0.5}}, {"radius", 0.3}},
                              json{{"type", "rect"}, {"re", {-5.0, 5.0}}, {"im", {0.01, 5.0}}}});
  const CampaignSummary s = run_semiclassical(config_from_json(j));
  ASSERT_EQ(s.failed, 0);
  const auto& reps = s.records[0].reports;
  // (hk)^2 <= 1 for h = 0.1: |k| <= 10.
  EXPECT_EQ(reps[0].count, 21);
  EXPECT_EQ(reps[1].count, 0);
  EXPECT_EQ(reps[2].count, 0);
  EXPECT_EQ(s.records[0].nonreal, 0);
}

TEST(Semiclassical, CouplingResponseOnTriangularModel) {
  std::vector<int> nonreal;
  for (double c : {0.0, 1e-12, 1e-9, 1e-6}) {
    json j = base_config();
    j["trials"] = 1;
    j["K"] = 60;
    j["plan"]["coupling"] = c;
    nonreal.push_back(run_semiclassical(config_from_json(j)).records[0].nonreal);
  }
  std::cout << "nonreal eigenvalues vs coupling {0, 1e-12, 1e-9, 1e-6}: " << nonreal[0] << " " << nonreal[1] << " "
            << nonreal[2] << " " << nonreal[3] << "\n";
  EXPECT_EQ(nonreal[0], 0);
  EXPECT_GT(nonreal[3], 0);
}

TEST(Semiclassical, CountConservationOverPartition) {
  json j = base_config();
  j["plan"]["coupling"] = 1e-4;
  j["trials"] = 3;
  json cells = json::array();
  cells.push_back({{"type", "rect"}, {"re", {0.0, 2.0}}, {"im", {-1.0, 1.0}}});
  const double cut_re = 1.0, cut_im = 0.0;
  auto next = [](double v) { return std::nextafter(v, 10.0); };
  cells.push_back({{"type", "rect"}, {"re", {0.0, cut_re}}, {"im", {-1.0, cut_im}}});
  cells.push_back({{"type", "rect"}, {"re", {next(cut_re), 2.0}}, {"im", {-1.0, cut_im}}});
  cells.push_back({{"type", "rect"}, {"re", {0.0, cut_re}}, {"im", {next(cut_im), 1.0}}});
  cells.push_back({{"type", "rect"}, {"re", {next(cut_re), 2.0}}, {"im", {next(cut_im), 1.0}}});
  j["regions"] = cells;
  const CampaignSummary s = run_semiclassical(config_from_json(j));
  for (const auto& r : s.records) {
    ASSERT_FALSE(r.failed);
    EXPECT_EQ(r.reports[1].count + r.reports[2].count + r.reports[3].count + r.reports[4].count, r.reports[0].count);
    EXPECT_GT(r.reports[0].count, 0);
  }
}

TEST(Semiclassical, PtVerdictsAndConjugateRegions) {
  json j = base_config();
  j["plan"]["coupling"] = 1e-3;
  j["trials"] = 4;
  j["regions"] = json::array({json{{"type", "disc"}, {"center", {1.0, 0.3}}, {"radius", 0.4}},
                              json{{"type", "disc"}, {"center", {1.0, -0.3}}, {"radius", 0.4}}});
  const CampaignSummary s = run_semiclassical(config_from_json(j));
  EXPECT_EQ(s.pt_pass, 4);
  EXPECT_EQ(s.symmetric_pass, 4);
  EXPECT_EQ(s.conjugation_pass, 4);
  for (const auto& r : s.records) EXPECT_EQ(r.reports[0].count, r.reports[1].count);
  // Identical predictions for mirrored regions on the symmetric grid.
  EXPECT_LE(std::abs(s.regions[0].volume_fine - s.regions[1].volume_fine), 1e-10 * s.regions[0].volume_fine);
  for (const auto& rs : s.regions)
    for (const auto& row : rs.success)
      for (double v : row) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
}

TEST(Semiclassical, PersistedArtifactsAreConsistentAndReproducible) {
  json j = base_config();
  j["plan"]["coupling"] = 1e-3;
  j["trials"] = 3;
  j["regions"] = json::array({json{{"type", "disc"}, {"center", {1.0, 0.3}}, {"radius", 0.4}}});
  ExperimentConfig cfg = config_from_json(j);
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  cfg.output_dir = a.string();
  const CampaignSummary sa = run_semiclassical(cfg);
  cfg.output_dir = b.string();
  const CampaignSummary sb = run_semiclassical(cfg);
  for (const auto& f : sa.files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  // Counts agree with the stored eigenvalues.
  const Region disc = cfg.regions[0];
  for (const auto& rec : sa.records) {
    std::istringstream csv(slurp(a / rec.eigen_file));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "re,im,trial,flag_boundary");
    std::vector<cplx> ev;
    while (std::getline(csv, line)) {
      double re, im;
      int t, flag;
      ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%d,%d", &re, &im, &t, &flag), 4);
      EXPECT_EQ(t, rec.index);
      ev.emplace_back(re, im);
    }
    EXPECT_EQ(ev.size(), 81u);
    EXPECT_EQ(count_in_region(ev, disc).count, rec.reports[0].count);
  }

  // The manifest lists content hashes of the files it names.
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["config_hash"], sa.config_hash);
  for (const auto& f : manifest["files"])
    EXPECT_EQ(f["fnv1a64"].get<std::string>(), hex64(fnv1a64(slurp(a / f["path"].get<std::string>()))));
  EXPECT_TRUE(fs::exists(a / "timing.json"));
  const json summary = json::parse(slurp(a / "summary.json"));
  EXPECT_FALSE(summary.dump().find("seconds") != std::string::npos);
}

TEST(Semiclassical, ThreadCountDoesNotChangeResults) {
  json j = base_config();
  j["plan"]["coupling"] = 1e-3;
  j["trials"] = 5;
  const ExperimentConfig cfg = config_from_json(j);
  setenv("PTWEYL_THREADS", "1", 1);
  const json one = run_semiclassical(cfg).to_json();
  setenv("PTWEYL_THREADS", "4", 1);
  const json four = run_semiclassical(cfg).to_json();
  unsetenv("PTWEYL_THREADS");
  EXPECT_EQ(one.dump(), four.dump());
}

TEST(Large, SelfAdjointPrincipalPartGivesNoCountsOffTheAxis) {
  json j = large_config();
  j["operator"]["div_terms"][0]["coeffs"] = json{{"0", {1, 0}}};
  j["regions"] = json::array({json{{"type", "sector"}, {"theta", {0.3, 1.2}}, {"g", 1.0}}});
  j["schedule"]["coupling"] = 1e-3;
  const CampaignSummary s = run_large(config_from_json(j));
  ASSERT_EQ(s.failed, 0);
  for (const auto& l : s.sectors[0].lambdas) {
    EXPECT_TRUE(l.trusted);
    for (int c : l.counts) EXPECT_EQ(c, 0);
  }
}

TEST(Large, FullSectorGrowthExponent) {
  const CampaignSummary s = run_large(config_from_json(large_config()));
  ASSERT_EQ(s.failed, 0);
  ASSERT_TRUE(s.sectors[0].growth_exponent.has_value());
  EXPECT_NEAR(*s.sectors[0].growth_exponent, 0.5, 0.05);
  EXPECT_EQ(s.sectors[0].expected_exponent, 0.5);
  EXPECT_EQ(s.pt_pass, 2);
  EXPECT_EQ(s.conjugation_pass, 2);
}

TEST(Large, LambdaBeyondTrustDiscIsExcludedAndFlagged) {
  json j = large_config();
  j["K"] = 24;  // trust radius (0.5 * 24)^2 * min|a| = 144
  j["lambdas"] = json::array({50, 100, 400});
  const CampaignSummary s = run_large(config_from_json(j));
  EXPECT_NEAR(s.trust_radius, 144.0, 1e-9);
  const auto& ls = s.sectors[0].lambdas;
  EXPECT_TRUE(ls[0].trusted);
  EXPECT_TRUE(ls[1].trusted);
  EXPECT_FALSE(ls[2].trusted);
  EXPECT_EQ(*s.sectors[0].largest_trusted_lambda, 100.0);
  bool warned = false;
  for (const auto& w : s.warnings) warned = warned || w.find("trust radius") != std::string::npos;
  EXPECT_TRUE(warned);
  for (const auto& rec : s.records)
    for (cplx z : rec.eigenvalues) (void)z;
}

TEST(Large, TrustValidationComparesCutoffs) {
  json j = large_config();
  j["validate_trust"] = true;
  j["K"] = 48;
  j["lambdas"] = json::array({100, 200});
  const CampaignSummary s = run_large(config_from_json(j));
  EXPECT_TRUE(s.trust.performed);
  EXPECT_EQ(s.trust.count_K, s.trust.count_2K);
  EXPECT_LT(s.trust.hausdorff, 1e-2 * s.trust_radius);
}

TEST(Large, DegenerateBoundaryDirectionWarns) {
  json j = large_config();
  j["operator"]["div_terms"][0]["coeffs"] = json{{"0", {1, 0}}};
  j["regions"] = json::array({json{{"type", "sector"}, {"theta", {0.0, 0.5}}, {"g", 1.0}}});
  j["lambdas"] = json::array({100});
  const CampaignSummary s = run_large(config_from_json(j));
  EXPECT_FALSE(s.sectors[0].n0_theta1.has_value());
  bool warned = false;
  for (const auto& w : s.warnings) warned = warned || w.find("nondegeneracy") != std::string::npos;
  EXPECT_TRUE(warned);
}
