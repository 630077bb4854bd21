#include <gtest/gtest.h>

#include <random>

#include "cspgap/errors.hpp"
#include "cspgap/protocol.hpp"

using namespace cspgap;

namespace {

// Uniform on {01, 10}; the simplex vertex would be a point mass and collapse the alphabet to q = 1.
GadgetSpec cut_edge_gadget(int copies) {
  Instance edge(2, 2, {{cut_predicate(), {0, 1}}});
  LpSolution sol;
  sol.locals = {LocalDistribution::uniform_on(2, 2, {1, 2})};
  sol.local_of = {0};
  return build_gadget_spec(edge, sol, copies);
}

GadgetSpec triangle_gadget(int copies) {
  Instance tri(3, 2, {{cut_predicate(), {0, 1}}, {cut_predicate(), {1, 2}}, {cut_predicate(), {2, 0}}});
  return build_gadget_spec(tri, solve_basic_lp(tri), copies);
}

// Message = hash of Z truncated to s bits.
std::vector<Player> echo_protocol(int T, int s) {
  std::vector<Player> ps;
  for (int t = 0; t < T; ++t)
    ps.push_back({s, [s](const PlayerView& v) {
                    std::uint64_t h = 0;
                    for (int x : v.Z.data()) h = mix64(h ^ static_cast<std::uint64_t>(x + 1));
                    Message msg;
                    for (int b = 0; b < s; ++b) msg.push_back((h >> b) & 1);
                    return msg;
                  }});
  return ps;
}

std::vector<Rational> random_dist(std::mt19937& g, int size) {
  std::vector<Rational> p(size);
  long total = 0;
  std::vector<long> w(size);
  for (auto& x : w) total += (x = g() % 7);
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (int i = 0; i < size; ++i) p[i] = Rational(w[i], total);
  return p;
}

}  // namespace

TEST(RunProtocol, EmptyMessagesOutputZero) {
  auto spec = triangle_gadget(1);
  auto s = sample_yes(spec, 10, 3, 1);
  auto tr = run_protocol(zero_protocol(spec.T()), s.matchings, s.signals);
  EXPECT_EQ(tr.output, 0);
  EXPECT_EQ(tr.comm_bits(), 0u);
  EXPECT_EQ(tr.messages.size(), 3u);
}

TEST(RunProtocol, DeterministicReplay) {
  auto spec = triangle_gadget(2);
  auto players = echo_protocol(spec.T(), 5);
  auto a = sample_yes(spec, 12, 4, 99), b = sample_yes(spec, 12, 4, 99);
  auto ta = run_protocol(players, a.matchings, a.signals);
  auto tb = run_protocol(players, b.matchings, b.signals);
  EXPECT_TRUE(ta == tb);
  EXPECT_EQ(ta.comm_bits(), 30u);
}

TEST(RunProtocol, OverBudgetIsViolation) {
  auto spec = triangle_gadget(1);
  auto s = sample_no(spec, 10, 3, 1);
  std::vector<Player> ps = zero_protocol(3);
  ps[1] = {1, [](const PlayerView&) { return Message{true, false}; }};
  EXPECT_THROW(run_protocol(ps, s.matchings, s.signals), ProtocolViolation);
}

TEST(RunProtocol, ShapeMismatch) {
  auto spec = triangle_gadget(1);
  auto s = sample_no(spec, 10, 3, 1);
  EXPECT_THROW(run_protocol(zero_protocol(2), s.matchings, s.signals), InvalidInput);
}

TEST(Advantage, ZeroProtocolAndCounter) {
  auto spec = triangle_gadget(2);
  auto z = estimate_advantage(zero_protocol(spec.T()), spec, 20, 4, 2000, 3);
  EXPECT_EQ(z.advantage, 0.0);
  EXPECT_TRUE(z.zero_within_ci());
  auto c = estimate_advantage(counter_protocol(spec, 4, 6), spec, 20, 4, 4000, 4);
  EXPECT_TRUE(c.zero_within_ci()) << c.advantage << " " << c.ci_radius;
}

TEST(Advantage, TooFewTrials) {
  auto spec = triangle_gadget(1);
  EXPECT_THROW(estimate_advantage(zero_protocol(3), spec, 10, 2, 50, 1), InvalidInput);
}

TEST(Counter, ZeroRowCountLawIdenticalInBothCases) {
  // Exact law of the zero-row count of one block at m = 2, by enumeration.
  auto spec = cut_edge_gadget(1);
  std::vector<Player> ps{{8, [](const PlayerView& v) {
                           int c = 0;
                           for (int j = 0; j < v.Z.rows(); ++j) c += v.Z.row_is_zero(j);
                           return int_to_state(static_cast<std::uint64_t>(c), 8);
                         }}};
  EXPECT_EQ(exact_transcript_tvd(ps, spec, 3, 2).tvd, 0);
}

TEST(ExactTvd, SinglePlayerIsZero) {
  auto spec = cut_edge_gadget(1);
  int bits = spec.k * 2;
  std::vector<Player> full{{bits, [](const PlayerView& v) {
                              Message m;
                              for (int x : v.Z.data()) m.push_back(x != 0);
                              return m;
                            }}};
  auto r = exact_transcript_tvd(full, spec, 4, 1);
  EXPECT_EQ(r.tvd, 0);
  EXPECT_GT(r.yes_outcomes, 0u);
}

TEST(ExactTvd, PlayersIgnoringSignalsAreZero) {
  auto spec = cut_edge_gadget(2);
  std::vector<Player> ps(2, Player{2, [](const PlayerView& v) {
                                     return Message{v.matchings.back()(0, 0) % 2 == 1, v.t == 1};
                                   }});
  EXPECT_EQ(exact_transcript_tvd(ps, spec, 3, 1).tvd, 0);
}

TEST(ExactTvd, TwoPlayerParityPinned) {
  auto spec = cut_edge_gadget(2);
  ASSERT_EQ(spec.T(), 2);
  ASSERT_EQ(spec.k_prime, 2);
  ASSERT_EQ(spec.q, 2);
  auto r = exact_transcript_tvd(parity_protocol(2), spec, 3, 1);
  EXPECT_GT(r.tvd, 0);
  // Equal matchings (prob 1/9) make the parity of Z_1 + Z_2 fixed under YES and fair under NO.
  EXPECT_EQ(r.tvd, Rational(1, 18)) << to_string(r.tvd);
}

TEST(ExactTvd, CapExceeded) {
  auto spec = triangle_gadget(2);
  EXPECT_THROW(exact_transcript_tvd(parity_protocol(6), spec, 10, 3), ResourceError);
}

TEST(ExactTvd, AdvantageConsistentWithExact) {
  auto spec = cut_edge_gadget(2);
  auto exact = exact_transcript_tvd(parity_protocol(2), spec, 3, 1).tvd.get_d();
  auto est = estimate_advantage(parity_protocol(2), spec, 3, 1, 20000, 7);
  EXPECT_LE(est.advantage, exact + est.ci_radius);
}

TEST(Streaming, ConstantStreamKeepsInitialState) {
  auto spec = triangle_gadget(2);
  StreamState init{true, false, true};
  auto players = streaming_adapter(constant_stream(), 3, init, spec);
  auto s = sample_yes(spec, 15, 5, 8);
  auto tr = run_protocol(players, s.matchings, s.signals);
  for (const auto& m : tr.messages) EXPECT_EQ(m, init);
}

TEST(Streaming, ChainedEqualsMonolithic) {
  auto spec = triangle_gadget(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (int bits : {10, 6}) {
      StreamFn f = bits == 10 ? zero_sat_counter(bits) : random_table_stream(bits, seed);
      StreamState init = int_to_state(seed % 3, bits);
      auto sample = seed % 3 ? sample_yes(spec, 20, 6, seed) : sample_no(spec, 20, 6, seed);
      auto tr = run_protocol(streaming_adapter(f, bits, init, spec), sample.matchings, sample.signals);
      auto mono = run_stream(f, init, emit_instance(sample, spec).constraints());
      EXPECT_EQ(tr.messages.back(), mono);
    }
  }
}

TEST(Streaming, ZeroSatCounterCountsByHand) {
  Instance inst(3, 2, {{cut_predicate(), {0, 1}}, {Predicate::from_bits(2, 2, "1000"), {1, 2}},
                       {Predicate::from_bits(2, 2, "1111"), {0, 2}}});
  EXPECT_EQ(state_to_int(run_stream(zero_sat_counter(4), int_to_state(0, 4), inst.constraints())), 2u);
  EXPECT_EQ(state_to_int(int_to_state(13, 5)), 13u);
}

TEST(Streaming, StateOverflowIsViolation) {
  auto spec = triangle_gadget(1);
  StreamFn grow = [](const Constraint&, const StreamState& s) {
    StreamState out = s;
    out.push_back(true);
    return out;
  };
  auto players = streaming_adapter(grow, 2, StreamState{}, spec);
  for (std::uint64_t seed = 0;; ++seed) {
    auto s = sample_yes(spec, 6, 6, seed);
    if (emit_instance(s, spec).size() < 3) continue;
    EXPECT_THROW(run_protocol(players, s.matchings, s.signals), ProtocolViolation);
    break;
  }
}

TEST(Tvd, Examples) {
  EXPECT_EQ(exact_tvd({Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}), 0);
  EXPECT_EQ(exact_tvd({1, 0}, {0, 1}), 1);
  EXPECT_THROW(exact_tvd({1}, {0, 1}), InvalidInput);
  std::mt19937 g(1);
  auto a = random_dist(g, 8), b = random_dist(g, 8);
  Rational direct = 0;
  for (int i = 0; i < 8; ++i) direct += abs(a[i] - b[i]);
  EXPECT_EQ(exact_tvd(a, b), direct / 2);
  std::vector<double> ad, bd;
  for (int i = 0; i < 8; ++i) {
    ad.push_back(a[i].get_d());
    bd.push_back(b[i].get_d());
  }
  EXPECT_NEAR(tvd(ad, bd), Rational(direct / 2).get_d(), 1e-12);
}

TEST(Tvd, DataProcessingAndSubstitution) {
  std::mt19937 g(2);
  for (int trial = 0; trial < 100; ++trial) {
    int nx = 2 + g() % 7, nw = 2 + g() % 7, ny = 2 + g() % 7;
    auto x1 = random_dist(g, nx), x2 = random_dist(g, nx);
    auto w1 = random_dist(g, nw), w2 = random_dist(g, nw);
    std::vector<std::vector<int>> f(nx, std::vector<int>(nw));
    for (auto& row : f)
      for (auto& v : row) v = g() % ny;
    EXPECT_LE(exact_tvd(push_through(x1, w1, f, ny), push_through(x2, w1, f, ny)), exact_tvd(x1, x2));
    auto lhs = exact_tvd(joint_with(x1, w1, f, ny), joint_with(x2, w2, f, ny));
    auto rhs = exact_tvd(joint_with(x1, w1, f, ny), joint_with(x1, w2, f, ny)) + exact_tvd(x1, x2);
    EXPECT_LE(lhs, rhs);
  }
}
