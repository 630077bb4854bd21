#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cspgap/errors.hpp"
#include "cspgap/pipeline.hpp"

using namespace cspgap;

namespace {

std::string out_path;

void emit(const std::string& text) {
  if (out_path.empty()) std::cout << text;
  else write_text_file(out_path, text);
}

// The hash covers the subcommand, its arguments and the contents of any input file.
Json stamp(const std::string& cmd, Json args, std::uint64_t seed, const Json& out) {
  args["command"] = cmd;
  return stamped(out, seed, config_hash(args));
}

int exit_for(const Json& out, const char* flag) { return out.value(flag, true) ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cspgap: basic-LP gaps, one-wise lifts, DIHP sampling and lemma checks"};
  app.require_subcommand(1);
  app.add_option("--out", out_path, "write output here instead of stdout");

  std::string instance_path, spec_path, config_path, suite = "sums", protocol = "zero", kind = "yes";
  std::uint64_t seed = 0, trials = 1000, cap = kDefaultEnumerationCap;
  int copies = kDefaultCopies, n = 50, m = 5, q = 2, N = 6;

  auto* lp = app.add_subcommand("lp-solve", "solve the basic LP of an instance");
  lp->add_option("instance", instance_path)->required();

  auto* gap = app.add_subcommand("gap-find", "LP value and brute-force optimum of an instance");
  gap->add_option("instance", instance_path)->required();
  gap->add_option("--cap", cap, "enumeration cap");

  auto* uni = app.add_subcommand("uniformize", "build the one-wise uniform gadget");
  uni->add_option("instance", instance_path)->required();
  uni->add_option("--copies", copies, "copies K of each constraint")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("dihp-gen", "sample a DIHP input and its emitted instance");
  auto* emit_cmd = app.add_subcommand("stream-emit", "emit the constraint stream as JSON lines");
  for (auto* sc : {gen, emit_cmd}) {
    sc->add_option("--spec", spec_path)->required();
    sc->add_option("--n", n)->required();
    sc->add_option("--m", m)->required();
    sc->add_option("--case", kind)->check(CLI::IsMember({"yes", "no"}));
    sc->add_option("--seed", seed);
  }

  auto* four = app.add_subcommand("fourier-check", "DFT identities on a random table");
  four->add_option("--q", q)->required();
  four->add_option("--N", N)->required();
  four->add_option("--seed", seed);

  auto* lem = app.add_subcommand("lemma-verify", "run a lemma suite");
  lem->add_option("--suite", suite)->required()->check(
      CLI::IsMember({"posterior", "levels", "combinatorics", "noise", "sums"}));
  lem->add_option("--seed", seed);

  auto* sim = app.add_subcommand("sim-run", "estimate a protocol's distinguishing advantage");
  sim->add_option("--spec", spec_path)->required();
  sim->add_option("--protocol", protocol, "zero | fullinfo | counter | stream:<file>");
  sim->add_option("--trials", trials);
  sim->add_option("--n", n);
  sim->add_option("--m", m);
  sim->add_option("--seed", seed);

  auto* pipe = app.add_subcommand("pipeline", "run the stages of a config file");
  pipe->add_option("--config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*lp) {
      Json in = read_json_file(instance_path);
      Json out = cmd_lp_solve(instance_from_json(in));
      emit(stamp("lp-solve", {{"instance", in}}, 0, out).dump(2) + "\n");
      return exit_for(out, "feasible");
    }
    if (*gap) {
      Json in = read_json_file(instance_path);
      Json out = cmd_gap_find(instance_from_json(in), cap);
      emit(stamp("gap-find", {{"instance", in}, {"cap", cap}}, 0, out).dump(2) + "\n");
      return exit_for(out, "sandwich_ok");
    }
    if (*uni) {
      Json in = read_json_file(instance_path);
      Json out = cmd_uniformize(instance_from_json(in), copies);
      emit(stamp("uniformize", {{"instance", in}, {"copies", copies}}, 0, out).dump(2) + "\n");
      return exit_for(out, "lift_exact");
    }
    if (*gen || *emit_cmd) {
      Json sj = read_json_file(spec_path);
      GadgetSpec spec = gadget_from_json(sj);
      Json args{{"spec", sj}, {"n", n}, {"m", m}, {"case", kind}};
      if (*gen) {
        Json out = cmd_dihp_gen(spec, n, m, parse_case(kind), seed);
        emit(stamp("dihp-gen", args, seed, out).dump(2) + "\n");
        return exit_for(out, "yes_consistent");
      }
      auto lines = cmd_stream_emit(spec, n, m, parse_case(kind), seed);
      std::ostringstream os;
      os << stamp("stream-emit", args, seed, Json{{"constraints", lines.size()}}).dump() << "\n";
      for (const auto& l : lines) os << l.dump() << "\n";
      emit(os.str());
      return 0;
    }
    if (*four) {
      Json out = cmd_fourier_check(q, N, seed);
      emit(stamp("fourier-check", {{"q", q}, {"N", N}}, seed, out).dump(2) + "\n");
      return exit_for(out, "pass");
    }
    if (*lem) {
      Json out = cmd_lemma_verify(suite, seed);
      emit(stamp("lemma-verify", {{"suite", suite}}, seed, out).dump(2) + "\n");
      return exit_for(out, "pass");
    }
    if (*sim) {
      Json sj = read_json_file(spec_path);
      Json out = cmd_sim_run(gadget_from_json(sj), protocol, n, m, trials, seed);
      Json args{{"spec", sj}, {"protocol", protocol}, {"n", n}, {"m", m}, {"trials", trials}};
      emit(stamp("sim-run", args, seed, out).dump(2) + "\n");
      return 0;
    }
    if (*pipe) {
      RunConfig cfg = parse_run_config(read_json_file(config_path));
      PipelineResult r = run_pipeline(cfg);
      Json summary{{"exit_code", r.exit_code}, {"artifacts", r.artifacts}};
      if (r.exit_code != 0) {
        summary["failure"] = r.failure;
        std::cerr << "error: " << r.failure << "\n";
      }
      emit(stamped(summary, cfg.seed, config_hash(cfg.raw)).dump(2) + "\n");
      return r.exit_code;
    }
  } catch (const ProtocolViolation& e) {
    std::cerr << "protocol violation: " << e.what() << "\n";
    return 4;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
