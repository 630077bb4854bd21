#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cspgap/serialize.hpp"

namespace cspgap {

// ---- single commands, shared by the CLI and the pipeline -------------------------

Json cmd_lp_solve(const Instance& inst);
Json cmd_gap_find(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap);
Json cmd_uniformize(const Instance& inst, int copies);
// {"sample": ..., "instance": ..., "yes_consistent": ...}
Json cmd_dihp_gen(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed);
std::vector<Json> cmd_stream_emit(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed);
Json cmd_fourier_check(int q, int N, std::uint64_t seed);
Json cmd_lemma_verify(const std::string& suite, std::uint64_t seed);

// zero | fullinfo | counter | stream:<file>
std::vector<Player> make_protocol(const std::string& name, const GadgetSpec& spec, int n, int m);
Json cmd_sim_run(const GadgetSpec& spec, const std::string& protocol, int n, int m, std::uint64_t trials,
                 std::uint64_t seed);

// Stream-player description: {"kind": "constant"|"zero_sat_counter"|"random_table", "bits": b,
// "seed": s, "initial": v}.
struct StreamPlan {
  StreamFn fn;
  int bits = 0;
  StreamState initial;
};
StreamPlan stream_plan_from_json(const Json& j);

// ---- pipelines -----------------------------------------------------------------

struct RunConfig {
  std::vector<std::string> stages;
  Json instance;  // inline instance JSON
  std::uint64_t seed = 0;
  int copies = kDefaultCopies;
  int n = 0;
  int m = 0;
  DihpCase kind = DihpCase::Yes;
  std::string protocol = "zero";
  std::uint64_t trials = 1000;
  std::string suite = "sums";
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::string output_dir = ".";
  // Optional expectations checked against the derived gadget.
  std::optional<int> q0, k, k_prime, T;
  Json raw;  // the file as read; hashed into every artifact
};

inline const std::vector<std::string> kStages = {"lp-solve", "gap-find",  "uniformize",   "dihp-gen",
                                                 "stream-emit", "sim-run", "lemma-verify", "fourier-check"};

// Validates shape and stage dependencies; throws InvalidInput before anything runs.
RunConfig parse_run_config(const Json& j);

struct PipelineResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;
  std::string failure;  // "<stage>: <first failing invariant>"
};
PipelineResult run_pipeline(const RunConfig& cfg);

}  // namespace cspgap
