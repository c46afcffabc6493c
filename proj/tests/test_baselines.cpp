#include <gtest/gtest.h>

#include "support.hpp"

using namespace graphsi;
using namespace testing_support;

TEST(BruteForceMi, MatchesFastTransform) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 4 + seed;
    const auto table = random_table(n, seed);
    auto game = table_game(table, n);
    const auto mi = brute_force_mi(game);
    const auto fast = fast_moebius(table, n);
    EXPECT_EQ(mi.call_count, table.size());
    for (std::uint64_t s = 0; s < table.size(); ++s) ASSERT_NEAR(mi.at(Coalition(s)), fast[s], 1e-10);
    const auto back = fast_zeta(fast, n);
    for (std::uint64_t s = 0; s < table.size(); ++s) ASSERT_NEAR(back[s], table[s], 1e-10);
  }
}

TEST(BruteForceMi, GraphGameOffInteractionSetIsZero) {
  const Graph g = random_graph(0, 4, 2, 8);
  GraphGame game(random_model(true, 1, 2, 8), g, default_baseline(g));
  const auto mi = brute_force_mi(game);
  const auto in = interaction_membership(g, 1);
  for (std::uint64_t s = 0; s < 16; ++s) {
    if (!in[s]) EXPECT_LT(std::abs(mi.at(Coalition(s))), 1e-8);
  }
}

TEST(BruteForce, PlayerLimits) {
  FunctionGame big(17, [](Coalition) { return 0.0; });
  EXPECT_THROW(brute_force_mi(big), InfeasibleError);
  FunctionGame mid(15, [](Coalition) { return 0.0; });
  EXPECT_THROW(brute_force_sv(mid), InfeasibleError);
}

TEST(DiscreteDerivative, InclusionExclusion) {
  // v(T) = |T|^2 on 3 players
  std::vector<double> table(8);
  for (std::uint64_t m = 0; m < 8; ++m) table[m] = std::pow(std::popcount(m), 2);
  EXPECT_DOUBLE_EQ(discrete_derivative(table, Coalition{0}, Coalition()), 1.0);
  EXPECT_DOUBLE_EQ(discrete_derivative(table, Coalition{0}, Coalition{1}), 3.0);
  EXPECT_DOUBLE_EQ(discrete_derivative(table, Coalition{0, 1}, Coalition{2}), 2.0);
}

TEST(BruteForceSv, SymmetricGameSplitsEqually) {
  FunctionGame game(5, [](Coalition c) { return c.size() >= 3 ? 1.0 : 0.0; });
  const auto sv = brute_force_sv(game);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(sv.at(Coalition::singleton(i)), 0.2, 1e-12);
}

TEST(PermutationSampling, RejectsTinyBudgets) {
  const auto table = random_table(5, 1);
  auto game = table_game(table, 5);
  SamplingOptions options;
  options.budget = 5;
  EXPECT_THROW(permutation_sampling_sii(game, 2, options), InfeasibleError);
  options.budget = 6;
  // one SII permutation needs more than n+1 evaluations
  EXPECT_THROW(permutation_sampling_sii(game, 2, options), InfeasibleError);
  EXPECT_NO_THROW(permutation_sampling_sv(game, 6, 0));
}

TEST(PermutationSampling, DeterministicAndWithinBudget) {
  const auto table = random_table(6, 2);
  auto game = table_game(table, 6);
  SamplingOptions options;
  options.budget = 40;
  options.seed = 17;
  const auto a = permutation_sampling_sii(game, 2, options);
  const auto b = permutation_sampling_sii(game, 2, options);
  EXPECT_LE(a.calls, 40u);
  EXPECT_GE(a.permutations, 1u);
  EXPECT_EQ(a.values.kind, IndexKind::SII);
  for (const auto& [s, v] : a.values.sorted()) EXPECT_EQ(v, b.values.at(s));
  EXPECT_EQ(a.values.values.size(), 6u + 15u);
}

TEST(PermutationSampling, ConvergesToExactSii) {
  const std::size_t n = 5;
  const auto table = random_table(n, 3);
  auto game = table_game(table, n);
  const auto exact = brute_force_sii(game, 2);
  SamplingOptions options;
  options.budget = 1u << n;
  options.max_permutations = 20000;
  options.seed = 1;
  const auto est = permutation_sampling_sii(game, 2, options);
  EXPECT_EQ(est.permutations, 20000u);
  for (const auto& [s, v] : exact.sorted()) {
    EXPECT_NEAR(est.values.at(s), v, 6.0 * est.standard_errors.at(s) + 1e-9) << to_string(s);
  }
}

TEST(PermutationSampling, SvEstimatorMatchesOrderOne) {
  const auto table = random_table(6, 4);
  auto game = table_game(table, 6);
  const auto sv = permutation_sampling_sv(game, 64, 5, 3000);
  const auto exact = brute_force_sv(game);
  EXPECT_EQ(sv.values.kind, IndexKind::SV);
  for (const auto& [s, v] : exact.sorted()) EXPECT_NEAR(sv.values.at(s), v, 6.0 * sv.standard_errors.at(s) + 1e-9);
}

TEST(PermutationSampling, InformedZeroesOutsideInteractionSet) {
  const Graph g = random_graph(0, 7, 1, 6);
  GraphGame game(random_model(false, 1, 1, 6), g, default_baseline(g));
  const auto set = build_interaction_set(khop_neighborhoods(g, 1));
  SamplingOptions options;
  options.budget = set.size();
  options.seed = 2;
  options.informed = &set;
  const auto est = permutation_sampling_sii(game, 3, options);
  for (const auto& [s, v] : est.values.sorted()) {
    if (!set.contains(s)) EXPECT_EQ(v, 0.0) << to_string(s);
  }
  EXPECT_LE(est.calls, set.size());
}

TEST(ReadoutAudit, LinearVersusMlp2) {
  const Graph g = random_graph(0, 4, 2, 0);
  const auto report =
      audit_nonlinear_readout(random_model(true, 1, 2, 0), random_model(true, 1, 2, 0, true), g);
  EXPECT_EQ(report.interaction_set_size, 12u);
  EXPECT_EQ(report.ell, 1u);
  EXPECT_LT(report.linear_off_mass, 1e-8);
  EXPECT_GT(report.mlp2_off_mass, 1e-4);
  EXPECT_THROW(audit_nonlinear_readout(random_model(true, 1, 2, 0), random_model(true, 2, 2, 0, true), g),
               std::invalid_argument);
}
