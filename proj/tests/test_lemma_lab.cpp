#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cspgap/lemma_lab.hpp"

using namespace cspgap;

namespace {

DensityTable random_density(int q, int N, std::mt19937_64& g) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> p(checked_pow(q, N));
  double s = 0;
  for (auto& x : p) s += (x = d(g));
  for (auto& x : p) x /= s;
  return density_from_dist(q, N, p);
}

// Weight-h singleton-free frequencies by filtering every frequency.
std::vector<std::uint64_t> filter_sf(int q, int m, int k, int h, int ell = -1) {
  FrequencyStats st(q, m, k);
  std::vector<std::uint64_t> out;
  for (std::uint64_t U = 0; U < st.size(); ++U)
    if (st.singleton_free(U) && st.wt(U) == h && (ell < 0 || st.rwt(U) == ell)) out.push_back(U);
  return out;
}

}  // namespace

TEST(UBound, ThreeCases) {
  EXPECT_EQ(u_bound(2.0, 4.0, 0, 100.0, 2), 1.0);
  EXPECT_NEAR(u_bound(2.0, 4.0, 3, 100.0, 2), std::pow(2.0 * std::sqrt(400.0) / 3, 1.5), 1e-9);
  double a = std::pow(2.0 * std::sqrt(100.0) / std::sqrt(6.0), 3.0);
  double b = std::pow(std::exp(1.0) * 4 * 100.0 / 6, 3.0);
  EXPECT_NEAR(u_bound(2.0, 4.0, 6, 100.0, 2), std::min(a, b), 1e-6 * std::min(a, b));
}

TEST(UBound, MonotoneInS) {
  for (int h = 1; h <= 12; ++h) {
    double prev = 0;
    for (double s = 1; s <= 20; s += 1) {
      double v = u_bound(1.5, s, h, 64.0, 3);
      EXPECT_GE(v, prev * (1 - 1e-12)) << h << " " << s;
      prev = v;
    }
  }
}

TEST(Boundedness, UniformAndPointMass) {
  auto uni = boundedness_profile(DensityTable::constant(2, 6, 1.0), 0.01, 2);
  for (std::size_t h = 1; h < uni.observed.size(); ++h) EXPECT_LT(uni.observed[h], 1e-12);
  EXPECT_TRUE(uni.all_pass);

  std::vector<cplx> delta(64, 0);
  delta[0] = 64;
  auto pm = boundedness_profile(DensityTable(2, 6, delta, true), 0.01, 2);
  for (int h = 0; h <= 6; ++h) EXPECT_NEAR(pm.observed[h], binomial(6, h).get_d(), 1e-9);
  EXPECT_FALSE(pm.all_pass);
  EXPECT_GT(pm.fitted_C, 0.01);
}

TEST(Posterior, FullSpaceReturnsPrior) {
  std::mt19937_64 g(1);
  Rng rng(1);
  PosteriorInputs in{random_density(2, 8, g), 4, 2, sample_hypermatching(4, 2, 2, rng), {0, 1},
                     LocalDistribution::uniform_on(2, 2, {0, 3}), {}};
  for (std::uint64_t z = 0; z < 16; ++z) in.conditioning.push_back(z);
  auto r = posterior_density(in);
  EXPECT_NEAR(r.nu, 1.0, 1e-12);
  double diff = 0;
  for (std::size_t x = 0; x < r.formula.values.size(); ++x)
    diff = std::max(diff, std::abs(r.formula.values[x] - in.prior.values[x]));
  EXPECT_LT(diff, 1e-12);
}

TEST(Posterior, FormulaMatchesBayesOnRandomConfigs) {
  std::mt19937_64 g(2);
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    PosteriorInputs in{random_density(2, 12, g), 6, 2, sample_hypermatching(6, 2, 2, rng), {1, 0},
                       LocalDistribution::uniform_on(2, 2, {0, 3}), {}};
    std::vector<std::uint64_t> all(16);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), g);
    in.conditioning.assign(all.begin(), all.begin() + 5);
    auto r = posterior_density(in);
    EXPECT_LT(r.residual, 1e-9);
    EXPECT_TRUE(r.formula.looks_like_density(1e-9));
  }
}

TEST(Posterior, NullEventThrows) {
  // Noise is a point mass at 00 and the prior sits on X = 0, so Pi X - Y = 0 always.
  std::vector<cplx> delta(16, 0);
  delta[0] = 16;
  Rng rng(3);
  PosteriorInputs in{DensityTable(2, 4, delta, true), 2, 2, sample_hypermatching(2, 1, 2, rng), {0, 1},
                     LocalDistribution::uniform_on(2, 2, {0}), {3}};
  EXPECT_THROW(posterior_density(in), NullEvent);
}

TEST(InputUniformity, UniformPriorAndPointMass) {
  Rng rng(4);
  auto M = sample_hypermatching(4, 2, 2, rng);
  auto noise = LocalDistribution::uniform_on(2, 2, {0, 3});
  SparsePriorSpectrum uniform(2, 8, {{SparseFrequency{}, cplx(1)}});
  auto u = input_uniformity(uniform, 2, {0, 1}, noise, M);
  EXPECT_LT(u.lhs, 1e-12);
  EXPECT_LT(u.rhs, 1e-12);

  std::vector<cplx> delta(256, 0);
  delta[37] = 256;
  auto pm = input_uniformity(DensePriorSpectrum(dft(DensityTable(2, 8, delta, true))), 2, {0, 1}, noise, M);
  EXPECT_TRUE(pm.holds());
  EXPECT_GT(pm.lhs, 0.5);
}

TEST(InputUniformity, RequiresOneWiseUniformNoise) {
  Rng rng(5);
  auto M = sample_hypermatching(4, 2, 2, rng);
  SparsePriorSpectrum uniform(2, 8, {{SparseFrequency{}, cplx(1)}});
  EXPECT_THROW(input_uniformity(uniform, 2, {0, 1}, LocalDistribution::uniform_on(2, 2, {0}), M), InvalidInput);
}

TEST(ParityPrior, MatchesDenseDensity) {
  auto prior = parity_check_prior(6, {{0, 1}, {2, 3, 4}}, {1, 0});
  auto dense = prior.materialize();
  for (std::uint64_t x = 0; x < 64; ++x) {
    auto t = tuple_of(x, 2, 6);
    bool in = ((t[0] + t[1]) % 2 == 1) && ((t[2] + t[3] + t[4]) % 2 == 0);
    EXPECT_NEAR(dense.values[x].real(), in ? 4.0 : 0.0, 1e-12);
  }
  EXPECT_THROW(parity_check_prior(4, {{0, 1}, {0, 1}}, {0, 0}), InvalidInput);
}

TEST(SingletonFree, TwoEnumerationsAgree) {
  for (int q : {2, 3})
    for (int k : {1, 2, 3})
      for (int m : {1, 2, 3}) {
        if (checked_pow(q, m * k) > (1u << 14)) continue;
        for (int h = 0; h <= m * k; ++h) {
          auto a = singleton_free_frequencies(q, m, k, h);
          std::sort(a.begin(), a.end());
          EXPECT_EQ(a, filter_sf(q, m, k, h));
          for (int ell = 0; ell <= m; ++ell)
            EXPECT_EQ(count_singleton_free(q, m, k, h, ell), Integer(filter_sf(q, m, k, h, ell).size()));
        }
      }
}

TEST(SingletonFree, CountBelowOvercount) {
  for (int q = 2; q <= 3; ++q)
    for (int m = 1; m <= 4; ++m)
      for (int k = 1; k <= 3; ++k)
        for (int ell = 1; ell <= m; ++ell) {
          Integer total = 0;
          for (int h = 0; h <= m * k; ++h) total += count_singleton_free(q, m, k, h, ell);
          EXPECT_LE(total.get_d(), singleton_free_count_bound(q, k, m, ell) * (1 + 1e-12));
        }
}

TEST(SfMass, ConstantAndOneWiseProduct) {
  auto one = dft(DensityTable::constant(2, 6, 1.0));
  for (int h = 1; h <= 6; ++h) EXPECT_LT(sf_mass(one, 3, 2, h), 1e-12);

  auto prod = dft(product_density_table(LocalDistribution::uniform_on(2, 2, {0, 3}), 3));
  auto w = weight_profile(prod);
  for (int h = 1; h <= 6; ++h) EXPECT_NEAR(sf_mass(prod, 3, 2, h), w[h], 1e-9);
}

TEST(SfMass, ByRowsMatchesFilteredSum) {
  std::mt19937_64 g(6);
  auto gh = dft(random_density(2, 6, g));
  for (int h = 2; h <= 6; ++h)
    for (int ell = 1; ell <= 3; ++ell) {
      double expect = 0;
      for (auto U : filter_sf(2, 3, 2, h, ell)) expect += std::norm(gh.coeffs[U]);
      EXPECT_NEAR(sf_mass_by_rows(gh, 3, 2, h, ell), expect, 1e-12);
    }
}

TEST(CoveredCenter, ZeroCenterIsSfMassAndBruteForce) {
  std::mt19937_64 g(7);
  auto gh = dft(random_density(2, 6, g));
  for (int h = 0; h <= 6; ++h) {
    auto r = covered_center_mass(gh, 3, 2, 0, h, 2.0);
    EXPECT_NEAR(r.lhs, sf_mass(gh, 3, 2, h), 1e-12);
    EXPECT_EQ(r.kappa, 0);
  }
  // V = [[1,0],[0,0],[1,1]]: one singleton row.
  std::uint64_t V = (1u << 5) | (1u << 1) | 1u;
  FrequencyStats st(2, 3, 2);
  for (int h = 0; h <= 6; ++h) {
    auto r = covered_center_mass(gh, 3, 2, V, h, 2.0);
    EXPECT_EQ(r.kappa, 1);
    EXPECT_EQ(r.rwt_v, 2);
    double brute = 0;
    for (std::uint64_t U = 0; U < st.size(); ++U)
      if (st.singleton_free(U) && st.wt(U ^ V) == h) brute += std::abs(gh.coeffs[U]);
    EXPECT_NEAR(r.lhs, brute, 1e-12);
  }
}

TEST(Combinatorial, StructuralCases) {
  EXPECT_EQ(combinatorial_exact({{0, 0}}, 6, 2, 2), 0);
  EXPECT_EQ(combinatorial_exact({}, 6, 2, 2), 1);
  EXPECT_EQ(combinatorial_exact({{0, 0}, {1, 0}}, 6, 2, 2), 0);  // one column only
  EXPECT_TRUE(structurally_zero({{0, 0}}, 2, 2));
  EXPECT_TRUE(structurally_zero({{0, 0}, {1, 0}, {2, 0}, {3, 1}}, 2, 2));
  EXPECT_EQ(combinatorial_bound(0, 10, 2, 2), 1.0);
  EXPECT_THROW(combinatorial_mc({{0, 0}, {1, 1}}, 20, 2, 2, 50, 1), InvalidInput);
}

TEST(Combinatorial, TwoMarksClosedForm) {
  // Both marks must sit in one row: m / n^2.
  for (int n : {6, 9}) {
    auto exact = combinatorial_exact({{2, 0}, {4, 1}}, n, 2, 2);
    EXPECT_EQ(exact, Rational(2) / (n * n));
  }
  auto mc = combinatorial_mc({{2, 0}, {4, 1}}, 20, 2, 2, 200000, 3);
  EXPECT_TRUE(mc.pass);
  EXPECT_LE(mc.ci.lower, 2.0 / 400);
  EXPECT_GE(mc.ci.upper, 2.0 / 400);
  EXPECT_LE(2.0 / 400, combinatorial_bound(2, 20, 2, 2));
}

TEST(EtaKappa, EmptyAndZeroRegion) {
  auto e = eta_kappa_exact({}, 6, 2, 2);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.begin()->first, (std::pair<int, int>{0, 0}));
  EXPECT_EQ(e.begin()->second, 1);

  MarkSet U{{0, 0}, {1, 1}, {2, 0}};
  for (const auto& [cell, p] : eta_kappa_exact(U, 6, 2, 2))
    if (cell.first + cell.second > 3) {
      EXPECT_EQ(p, 0);
    }
  auto mc = eta_kappa_mc(U, 6, 2, 2, 20000, 4);
  EXPECT_TRUE(mc.zero_region_ok);
}

TEST(EtaKappa, InvariantOnSamples) {
  Rng rng(5);
  MarkSet U{{0, 0}, {1, 1}, {2, 2}, {3, 0}, {0, 1}};
  for (int t = 0; t < 500; ++t) {
    auto ek = eta_kappa(sample_hypermatching(5, 3, 3, rng), U);
    if (ek.d > 0) {
      EXPECT_LE(static_cast<double>(ek.eta) / 3, ek.d + 1e-12);
      EXPECT_LE(ek.d, ek.eta / 2.0 + 1e-12);
    }
  }
}

TEST(LevelSum, EmptyAndMonotone) {
  EXPECT_EQ(level_bound_sum(1, 1, 4, 100, 1, 1, 0.1, 2).sum, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1000; n <= 64000; n *= 2) {
    double s = level_bound_sum(1, 1, 8, n, 2, 20, 0.2, 2).sum;
    EXPECT_LE(s, prev * (1 + 1e-12));
    prev = s;
  }
}

TEST(LevelSum, PinnedFixture) {
  auto r = level_bound_sum(1, 1, 8, 64000, 2, 20, 0.2, 2);
  EXPECT_TRUE(r.below_delta_sq);
  EXPECT_LT(r.sum, 0.04);
}

TEST(TrivialMass, Examples) {
  auto one = trivial_mass_check(DensityTable::constant(2, 6, 1.0), 2);
  EXPECT_LT(one.lhs, 1e-12);
  EXPECT_TRUE(one.pass);

  // Indicator density of {x : x_0 = x_1 = 0}, measure 2^-2.
  std::vector<cplx> v(64, 0);
  for (std::uint64_t x = 0; x < 16; ++x) v[x] = 4;
  DensityTable set(2, 6, v, true);
  for (int h = 2; h <= 6; ++h) EXPECT_TRUE(trivial_mass_check(set, h).pass) << h;

  std::vector<cplx> delta(64, 0);
  delta[0] = 64;
  EXPECT_THROW(trivial_mass_check(DensityTable(2, 6, delta, true), 3), InvalidInput);
}

TEST(Casework, CasesAndSweep) {
  EXPECT_EQ(casework_case(1000, 10, 5, 3), "1a");
  EXPECT_EQ(casework_case(1000, 10, 5, 8), "1b");
  EXPECT_EQ(casework_case(1000, 10, 5, 100), "2a");
  EXPECT_EQ(casework_case(1000, 10, 5, 170), "3");
  CaseworkGrid grid{{200, 400}, {2, 4, 8}, {8, 16}, 1, 1, 0.1, 1, 2};
  auto rep = casework_sweep(grid);
  EXPECT_TRUE(std::isfinite(rep.fitted_C_rhs));
  ASSERT_TRUE(rep.cases.count("1a"));
  EXPECT_LE(rep.cases.at("1a").max_log_ratio, 1.0 + 1e-9);
}

class Suites : public ::testing::TestWithParam<std::string> {};

TEST_P(Suites, Pass) {
  auto rep = run_lemma_suite(GetParam(), 1);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.note;
}

INSTANTIATE_TEST_SUITE_P(All, Suites, ::testing::Values("posterior", "levels", "combinatorics", "noise", "sums"));

TEST(SuitesUnknown, Throws) { EXPECT_THROW(run_lemma_suite("nope", 1), InvalidInput); }
