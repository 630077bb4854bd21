#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "cspgap/dihp.hpp"

using namespace cspgap;

namespace {

Instance triangle() {
  return Instance(3, 2, {{cut_predicate(), {0, 1}}, {cut_predicate(), {1, 2}}, {cut_predicate(), {2, 0}}});
}

GadgetSpec triangle_gadget(int copies) { return build_gadget_spec(triangle(), solve_basic_lp(triangle()), copies); }

}  // namespace

TEST(Hypermatching, ColumnDistinctnessChecked) {
  EXPECT_THROW(Hypermatching(3, 2, 1, {1, 1}), InvalidInput);
  EXPECT_THROW(Hypermatching(3, 2, 1, {0, 3}), InvalidInput);
  EXPECT_NO_THROW(Hypermatching(3, 2, 2, {0, 0, 1, 1}));
}

TEST(Hypermatching, CountMatchesEnumeration) {
  EXPECT_EQ(hypermatching_count(3, 2, 2), 36u);
  EXPECT_EQ(hypermatching_count(5, 1, 3), 125u);
  EXPECT_EQ(hypermatching_count(4, 4, 1), 24u);
  std::set<std::vector<int>> seen;
  for_each_hypermatching(3, 2, 2, [&](const Hypermatching& M) { seen.insert(M.entries()); });
  EXPECT_EQ(seen.size(), 36u);
}

TEST(Hypermatching, SamplerRejectsTooManyRows) {
  Rng rng(1);
  EXPECT_THROW(sample_hypermatching(3, 4, 2, rng), InvalidInput);
}

TEST(Hypermatching, SamplerIsUniformOverSmallSpace) {
  // n=3, m=2, k=1: six ordered pairs, each with probability 1/6.
  Rng rng(9);
  std::map<std::vector<int>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[sample_hypermatching(3, 2, 1, rng).entries()]++;
  ASSERT_EQ(counts.size(), 6u);
  double chi2 = 0;
  for (const auto& [_, c] : counts) chi2 += std::pow(c - draws / 6.0, 2) / (draws / 6.0);
  EXPECT_LT(chi2, 20.5);  // 5 dof, p ~ 0.001
}

TEST(Hypermatching, FullPermutationWhenMEqualsN) {
  Rng rng(2);
  auto M = sample_hypermatching(7, 7, 1, rng);
  std::set<int> s(M.entries().begin(), M.entries().end());
  EXPECT_EQ(s.size(), 7u);
}

TEST(Project, HandIndexedOracle) {
  HiddenAssignment X(2, 1, 5, {3, 4});
  Hypermatching M(2, 2, 1, {0, 1});
  auto Z = project(M, {0}, X);
  EXPECT_EQ(Z(0, 0), 3);
  EXPECT_EQ(Z(1, 0), 4);

  HiddenAssignment zero(4, 3, 3);
  Rng rng(4);
  auto M2 = sample_hypermatching(4, 3, 2, rng);
  EXPECT_TRUE(project(M2, {2, 0}, zero) == SignalMatrix(3, 2, 3));

  // Random 3x2 matching into a 5x3 assignment.
  std::vector<int> xs;
  for (int i = 0; i < 15; ++i) xs.push_back(static_cast<int>(rng.below(7)));
  HiddenAssignment Xr(5, 3, 7, xs);
  auto M3 = sample_hypermatching(5, 3, 2, rng);
  std::vector<int> phi{2, 0};
  auto Zr = project(M3, phi, Xr);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 2; ++l) EXPECT_EQ(Zr(j, l), xs[M3(j, l) * 3 + phi[l]]);
}

TEST(Project, ShapeMismatch) {
  HiddenAssignment X(2, 1, 2);
  Hypermatching M(3, 1, 1, {2});
  EXPECT_THROW(project(M, {0}, X), InvalidInput);
}

TEST(Sample, YesReconstructionAndDeterminism) {
  auto spec = triangle_gadget(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = sample_yes(spec, 20, 5, seed);
    ASSERT_TRUE(s.hidden && s.noise);
    EXPECT_TRUE(verify_yes_consistency(s, spec));
    for (int t = 0; t < spec.T(); ++t) {
      auto sum = project(s.matchings[t], spec.edges[t].phi, *s.hidden);
      EXPECT_TRUE(subtract(sum, (*s.noise)[t]) == s.signals[t]);
    }
    auto again = sample_yes(spec, 20, 5, seed);
    EXPECT_TRUE(again.signals == s.signals);
    auto no = sample_no(spec, 20, 5, seed);
    EXPECT_TRUE(no.matchings == s.matchings);
    EXPECT_FALSE(no.hidden.has_value());
  }
}

TEST(Sample, TamperedYesSampleFailsConsistency) {
  auto spec = triangle_gadget(1);
  auto s = sample_yes(spec, 10, 3, 77);
  s.signals[0].set(0, 0, s.signals[0](0, 0) + 1);
  EXPECT_FALSE(verify_yes_consistency(s, spec));
}

TEST(Sample, NoCaseEntriesUniform) {
  // q = 3 gadget from the thirds marginal; chi-square over 1e5 entries.
  Instance edge(2, 2, {{dicut_predicate(), {0, 1}}});
  LpSolution sol;
  sol.locals = {LocalDistribution(2, 2, {0, Rational(1, 3), Rational(1, 3), Rational(1, 3)})};
  sol.local_of = {0};
  auto spec = build_gadget_spec(edge, sol, 1);
  ASSERT_EQ(spec.q, 3);
  std::vector<long> counts(3, 0);
  long total = 0;
  for (std::uint64_t seed = 0; total < 100000; ++seed) {
    auto s = sample_no(spec, 50, 50, seed);
    for (int v : s.signals[0].data()) {
      ++counts[v];
      ++total;
    }
  }
  double chi2 = 0;
  for (long c : counts) chi2 += std::pow(c - total / 3.0, 2) / (total / 3.0);
  EXPECT_LT(chi2, 13.8);  // 2 dof, p ~ 0.001
}

TEST(Sample, YesEntriesUniformAndZeroRowRate) {
  auto spec = triangle_gadget(2);
  long zero_rows = 0, rows = 0, ones = 0, entries = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto s = sample_yes(spec, 40, 8, seed);
    for (const auto& Z : s.signals) {
      for (int j = 0; j < Z.rows(); ++j) zero_rows += Z.row_is_zero(j);
      rows += Z.rows();
      for (int v : Z.data()) ones += v;
      entries += static_cast<long>(Z.data().size());
    }
  }
  double p = 0.25, sigma = std::sqrt(p * (1 - p) / rows);
  EXPECT_NEAR(static_cast<double>(zero_rows) / rows, p, 4 * sigma);
  EXPECT_NEAR(static_cast<double>(ones) / entries, 0.5, 4 * std::sqrt(0.25 / entries));
}

TEST(Emit, AllNonzeroGivesEmptyInstance) {
  auto spec = triangle_gadget(1);
  auto s = sample_no(spec, 6, 2, 1);
  for (auto& Z : s.signals)
    for (int j = 0; j < Z.rows(); ++j) Z.set(j, 0, 1);
  EXPECT_TRUE(emit_instance(s, spec).empty());
}

TEST(Emit, OneZeroRowGivesOneConstraint) {
  auto spec = triangle_gadget(1);
  auto s = sample_no(spec, 6, 2, 1);
  for (auto& Z : s.signals)
    for (int j = 0; j < Z.rows(); ++j) Z.set(j, 0, 1);
  s.signals[1] = SignalMatrix(2, 2, spec.q);
  s.signals[1].set(0, 1, 1);  // row 1 of block 1 stays zero
  auto inst = emit_instance(s, spec);
  ASSERT_EQ(inst.size(), 1u);
  const auto& c = inst.constraints()[0];
  const auto& M = s.matchings[1];
  const auto& phi = spec.edges[1].phi;
  EXPECT_EQ(c.vars, (std::vector<int>{M(1, 0) * 3 + phi[0], M(1, 1) * 3 + phi[1]}));
  EXPECT_TRUE(c.predicate.same_function(cut_predicate()));
  EXPECT_EQ(inst.num_vars(), 18);
}

TEST(Emit, BlocksConcatenateInStreamOrder) {
  auto spec = triangle_gadget(2);
  auto s = sample_yes(spec, 12, 6, 5);
  auto inst = emit_instance(s, spec);
  std::vector<Constraint> merged;
  for (int t = 0; t < spec.T(); ++t)
    for (auto& c : emit_block(spec, t, s.matchings[t], s.signals[t])) merged.push_back(c);
  ASSERT_EQ(merged.size(), inst.size());
  for (std::size_t i = 0; i < merged.size(); ++i) EXPECT_EQ(merged[i].vars, inst.constraints()[i].vars);
}

TEST(Emit, PlantedValueOnTriangleIsOne) {
  // Triangle locals are supported on satisfying pairs, so every emitted constraint is satisfied.
  auto spec = triangle_gadget(2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = sample_yes(spec, 30, 10, seed);
    auto inst = emit_instance(s, spec);
    if (inst.empty()) continue;
    EXPECT_EQ(value(inst, planted_assignment(*s.hidden, spec)), 1);
  }
}

TEST(LocalSamplerTest, MatchesDistribution) {
  LocalDistribution d(3, 1, {Rational(1, 6), Rational(1, 2), Rational(1, 3)});
  LocalSampler smp(d);
  Rng rng(3);
  std::vector<int> c(3, 0);
  const int N = 60000;
  for (int i = 0; i < N; ++i) c[smp.sample(rng)]++;
  EXPECT_NEAR(c[0] / double(N), 1.0 / 6, 0.01);
  EXPECT_NEAR(c[1] / double(N), 0.5, 0.01);
}
