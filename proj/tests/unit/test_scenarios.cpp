#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "wulff/errors.hpp"
#include "wulff/scenarios.hpp"

using namespace wulff;

namespace {

const CheckReport* find(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool has_table(const ScenarioResult& r, const std::string& name) {
  return std::any_of(r.tables.begin(), r.tables.end(), [&](const DataTable& t) { return t.name == name; });
}

std::string failures(const ScenarioResult& r) {
  std::string out;
  for (const auto& c : r.checks)
    if (!c.pass) out += summary_line(c) + "\n";
  return out;
}

}  // namespace

TEST(Scenarios, FittedOrderRecoversPowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double x : h) e.push_back(7.0 * std::pow(x, 1.5));
  EXPECT_NEAR(fitted_order(h, e), 1.5, 1e-12);
  EXPECT_THROW(fitted_order({0.1}, {1.0}), InvalidInput);
}

TEST(Scenarios, ShippedConfigsParse) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(WULFF_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(Scenarios, NormIdentitiesPass) {
  const auto c = parse_config("scenario: norm_identities\nnorm: {family: fourier2d, fourier: [[4, 0.03, 0.01]]}\n"
                              "verifier: {identity_points: 30}\n");
  const auto r = run_scenario(c);
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_NE(find(r, "wulff_volume_identity"), nullptr);
  EXPECT_GT(r.seconds, 0.0);
}

TEST(Scenarios, RadialIdentitiesPassForEuclideanDisk) {
  const auto c = parse_config("scenario: wulff_identities\nnorm: {family: euclidean}\n"
                              "resolution: {grid_h: 0.015625}\nverifier: {radial_target_nodes: 20000}\n");
  const auto r = run_scenario(c);
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_TRUE(has_table(r, "boundary_trace"));
  EXPECT_TRUE(has_table(r, "residual_grid"));
}

TEST(Scenarios, ConvergenceStudyOnExactFamilyReportsRoundoff) {
  const auto c = parse_config("scenario: convergence_study\nnorm: {family: euclidean}\nstudy: {h: [0.0625, 0.03125]}\n");
  const auto r = run_scenario(c);
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_NE(find(r, "residual_roundoff"), nullptr);
  EXPECT_TRUE(has_table(r, "convergence"));
}

TEST(Scenarios, SmallSolveRunsAndExportsTheMap) {
  const auto c = parse_config("scenario: solve_and_verify\nnorm: {family: euclidean}\n"
                              "resolution: {source_nodes: 400, target_nodes: 400, boundary_nodes: 128}\n");
  const auto r = run_scenario(c);
  ASSERT_FALSE(r.checks.empty());
  EXPECT_EQ(find(r, "solver_converged"), nullptr);
  EXPECT_NE(find(r, "step1_mass"), nullptr);
  EXPECT_TRUE(find(r, "step1_mass")->pass);
  EXPECT_TRUE(has_table(r, "transport_map"));
}

TEST(Scenarios, SolverFailureBecomesAFailedCheck) {
  const auto c = parse_config("scenario: solve_and_verify\nnorm: {family: euclidean}\n"
                              "resolution: {source_nodes: 300, target_nodes: 300, boundary_nodes: 64}\n"
                              "solver: {max_sweeps: 1}\n");
  const auto r = run_scenario(c);
  EXPECT_FALSE(r.pass());
  const auto* failed = find(r, "solver_converged");
  ASSERT_NE(failed, nullptr);
  EXPECT_FALSE(failed->pass);
}
