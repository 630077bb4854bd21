#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cspgap/dihp.hpp"
#include "cspgap/lemma_lab.hpp"
#include "cspgap/rational.hpp"

namespace cspgap {

using Message = std::vector<bool>;

struct PlayerView {
  int t = 0;  // 0-based position in the speaking order
  const std::vector<Hypermatching>& matchings;  // M_1 .. M_t (all public)
  const std::vector<Message>& previous;         // S_1 .. S_{t-1}
  const SignalMatrix& Z;
};

// Deterministic player with a declared message budget.
struct Player {
  int s_bits = 0;
  std::function<Message(const PlayerView&)> fn;
};

struct Transcript {
  std::vector<Hypermatching> matchings;
  std::vector<Message> messages;
  int output = 0;  // first bit of the last message; 0 if it is empty
  std::size_t comm_bits() const;
  bool operator==(const Transcript&) const = default;
};

Transcript run_protocol(const std::vector<Player>& players, const std::vector<Hypermatching>& matchings,
                        const std::vector<SignalMatrix>& signals);

struct AdvantageEstimate {
  std::uint64_t trials = 0;
  WilsonInterval yes;  // Pr[out = 1 | YES]
  WilsonInterval no;
  double advantage = 0;   // |p_yes - p_no|
  double ci_radius = 0;   // sum of the two Wilson half-widths
  std::size_t comm_bits = 0;  // largest total communication seen
  bool zero_within_ci() const { return advantage <= ci_radius; }
};

// Trial i runs the YES and NO experiments of seed mix(seed, i), which share their matchings.
AdvantageEstimate estimate_advantage(const std::vector<Player>& players, const GadgetSpec& spec, int n, int m,
                                     std::uint64_t trials, std::uint64_t seed);

inline constexpr std::uint64_t kExactTvdCap = std::uint64_t{1} << 26;

struct ExactTvd {
  Rational tvd;
  std::uint64_t yes_outcomes = 0;  // enumerated (X*, M, Y) tuples
  std::uint64_t no_outcomes = 0;
  std::size_t transcripts = 0;     // distinct (M, S) values seen
};

// TVD between the laws of (M_{1:T}, S_{1:T}) under YES and NO, by full enumeration.
ExactTvd exact_transcript_tvd(const std::vector<Player>& players, const GadgetSpec& spec, int n, int m,
                              std::uint64_t cap = kExactTvdCap);

// ---- streaming -------------------------------------------------------------

using StreamState = std::vector<bool>;
using StreamFn = std::function<StreamState(const Constraint&, const StreamState&)>;

// Player t resumes from S_{t-1} (or the initial state), feeds its block's constraints, and
// posts the resulting state.
std::vector<Player> streaming_adapter(const StreamFn& fn, int s_bits, const StreamState& initial,
                                      const GadgetSpec& spec);
StreamState run_stream(const StreamFn& fn, const StreamState& initial, const std::vector<Constraint>& stream);

StreamFn constant_stream();
// Counts constraints satisfied by the all-zeros assignment, modulo 2^bits.
StreamFn zero_sat_counter(int bits);
// Pseudo-random transition table keyed by (state, constraint), fixed by the seed.
StreamFn random_table_stream(int bits, std::uint64_t seed);

std::uint64_t state_to_int(const StreamState& s);
StreamState int_to_state(std::uint64_t v, int bits);

// ---- stock protocols --------------------------------------------------------

std::vector<Player> zero_protocol(int T);
// Players forward every Z they have seen; the last one runs the likelihood-ratio test by
// enumerating X*. Throws ResourceError when q^{nk'} exceeds the posterior cap.
std::vector<Player> fullinfo_protocol(const GadgetSpec& spec, int n, int m);
// Players forward the running number of all-zero rows; the last one outputs count >= threshold.
std::vector<Player> counter_protocol(const GadgetSpec& spec, int m, int threshold);
// 1-bit players: S_t = S_{t-1} xor (sum of Z_t mod 2).
std::vector<Player> parity_protocol(int T);

// ---- finite distributions ---------------------------------------------------

Rational exact_tvd(const std::vector<Rational>& a, const std::vector<Rational>& b);
double tvd(const std::vector<double>& a, const std::vector<double>& b);

// Law of f(X, W) for independent X ~ px, W ~ pw; f[x][w] is in [0, out_size).
std::vector<Rational> push_through(const std::vector<Rational>& px, const std::vector<Rational>& pw,
                                   const std::vector<std::vector<int>>& f, int out_size);
// Law of (X, f(X, W)) indexed x * out_size + y.
std::vector<Rational> joint_with(const std::vector<Rational>& px, const std::vector<Rational>& pw,
                                 const std::vector<std::vector<int>>& f, int out_size);

}  // namespace cspgap
