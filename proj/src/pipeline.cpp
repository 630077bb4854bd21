#include "cspgap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "cspgap/errors.hpp"

namespace cspgap {

namespace {

std::uint64_t counter_threshold(const GadgetSpec& spec, int m) {
  // Expected zero-row count m*T/q^k, rounded up.
  std::uint64_t denom = checked_pow(spec.q, spec.k);
  std::uint64_t total = static_cast<std::uint64_t>(m) * spec.T();
  return (total + denom - 1) / denom;
}

}  // namespace

Json cmd_lp_solve(const Instance& inst) {
  LpSolution sol = solve_basic_lp(inst);
  auto feas = check_feasible(inst, sol);
  Json out = to_json(sol);
  out["feasible"] = feas.feasible;
  if (!feas.feasible) out["violation"] = feas.violation;
  return out;
}

Json cmd_gap_find(const Instance& inst, std::uint64_t cap) {
  GapCertificate cert = find_gap_certificate(inst, cap);
  Json out = to_json(cert);
  out["sandwich_ok"] = cert.beta <= cert.gamma && cert.gamma <= 1;
  return out;
}

Json cmd_uniformize(const Instance& inst, int copies) {
  LpSolution sol = solve_basic_lp(inst);
  GadgetSpec spec = build_gadget_spec(inst, sol, copies);
  bool exact = true;
  for (const auto& e : spec.edges) {
    exact = exact && is_one_wise_uniform(e.dist);
    const auto& src = sol.local_for(e.source_constraint);
    exact = exact && pushforward(e.dist, spec.lift, e.phi).probs == src.probs;
  }
  Json out = to_json(spec);
  out["lift_exact"] = exact;
  return out;
}

Json cmd_dihp_gen(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed) {
  DihpSample s = sample_dihp(spec, n, m, kind, seed);
  Instance inst = emit_instance(s, spec);
  Json out{{"sample", to_json(s)}, {"instance", to_json(inst)}, {"num_constraints", inst.size()}};
  if (kind == DihpCase::Yes) {
    out["yes_consistent"] = verify_yes_consistency(s, spec);
    if (!inst.empty()) out["planted_value"] = to_string(value(inst, planted_assignment(*s.hidden, spec)));
  }
  return out;
}

std::vector<Json> cmd_stream_emit(const GadgetSpec& spec, int n, int m, DihpCase kind, std::uint64_t seed) {
  DihpSample s = sample_dihp(spec, n, m, kind, seed);
  std::vector<Json> lines;
  for (int t = 0; t < spec.T(); ++t)
    for (const auto& c : emit_block(spec, t, s.matchings[t], s.signals[t])) {
      Json line = constraint_line(c);
      line["t"] = t;
      lines.push_back(line);
    }
  return lines;
}

Json cmd_fourier_check(int q, int N, std::uint64_t seed) {
  require(q >= 2 && N >= 1, "fourier-check needs q >= 2 and N >= 1");
  Rng rng = Rng::substream(seed, Purpose::Aux, 500);
  const std::uint64_t size = checked_pow(q, N);
  require(size <= (std::uint64_t{1} << 20), "fourier-check: q^N above 2^20");
  auto random_table = [&](int n) {
    std::vector<cplx> v(checked_pow(q, n));
    for (auto& x : v) x = cplx(rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1);
    return DensityTable(q, n, std::move(v));
  };
  DensityTable f = random_table(N), g = random_table(N);
  Spectrum fh = dft(f), gh = dft(g);

  double inversion = 0;
  DensityTable back = idft(fh);
  for (std::uint64_t i = 0; i < size; ++i) inversion = std::max(inversion, std::abs(back.values[i] - f.values[i]));

  double conv = 0;
  Spectrum ch = dft(convolve(f, g));
  for (std::uint64_t u = 0; u < size; ++u) conv = std::max(conv, std::abs(ch.coeffs[u] - fh.coeffs[u] * gh.coeffs[u]));

  // Random coordinate subset for the projection and marginal rules.
  std::vector<int> coords(N);
  std::iota(coords.begin(), coords.end(), 0);
  int s = 1 + static_cast<int>(rng.below(N));
  for (int i = 0; i < s; ++i) std::swap(coords[i], coords[i + rng.below(N - i)]);
  coords.resize(s);

  DensityTable small = random_table(s);
  Spectrum sh = dft(small);
  Spectrum lh = dft(lift_coordinates(small, coords, N));
  std::vector<char> covered(size, 0);
  double projection = 0;
  for (std::uint64_t u = 0; u < sh.size(); ++u) {
    std::uint64_t e = embed_frequency(u, q, coords, N);
    covered[e] = 1;
    projection = std::max(projection, std::abs(lh.coeffs[e] - sh.coeffs[u]));
  }
  for (std::uint64_t u = 0; u < size; ++u)
    if (!covered[u]) projection = std::max(projection, std::abs(lh.coeffs[u]));

  double marginal = 0;
  Spectrum mh = dft(average_pushforward(f, coords));
  for (std::uint64_t u = 0; u < mh.size(); ++u)
    marginal = std::max(marginal, std::abs(mh.coeffs[u] - fh.coeffs[embed_frequency(u, q, coords, N)]));

  double pv = parseval(f);
  bool pass = std::max({inversion, conv, projection, marginal, pv}) <= 1e-10;
  return {{"q", q},
          {"N", N},
          {"residuals",
           {{"inversion", inversion}, {"parseval", pv}, {"convolution", conv}, {"projection", projection},
            {"marginal", marginal}}},
          {"pass", pass}};
}

Json cmd_lemma_verify(const std::string& suite, std::uint64_t seed) { return to_json(run_lemma_suite(suite, seed)); }

StreamPlan stream_plan_from_json(const Json& j) {
  require(j.is_object(), "stream description must be an object");
  auto kind_it = j.find("kind");
  require(kind_it != j.end() && kind_it->is_string(), "stream description needs a string 'kind'");
  std::string kind = kind_it->get<std::string>();
  StreamPlan p;
  p.bits = get_int(j, "bits");
  require(p.bits >= 1 && p.bits <= 63, "stream bits must be in [1, 63]");
  std::uint64_t init = j.contains("initial") ? get_u64(j, "initial") : 0;
  p.initial = int_to_state(init, p.bits);
  if (kind == "constant") p.fn = constant_stream();
  else if (kind == "zero_sat_counter") p.fn = zero_sat_counter(p.bits);
  else if (kind == "random_table") p.fn = random_table_stream(p.bits, j.contains("seed") ? get_u64(j, "seed") : 0);
  else throw InvalidInput("unknown stream kind '" + kind + "'");
  return p;
}

std::vector<Player> make_protocol(const std::string& name, const GadgetSpec& spec, int n, int m) {
  if (name == "zero") return zero_protocol(spec.T());
  if (name == "fullinfo") return fullinfo_protocol(spec, n, m);
  if (name == "counter") return counter_protocol(spec, m, static_cast<int>(counter_threshold(spec, m)));
  if (name.rfind("stream:", 0) == 0) {
    StreamPlan p = stream_plan_from_json(read_json_file(name.substr(7)));
    return streaming_adapter(p.fn, p.bits, p.initial, spec);
  }
  throw InvalidInput("unknown protocol '" + name + "' (zero, fullinfo, counter, stream:<file>)");
}

Json cmd_sim_run(const GadgetSpec& spec, const std::string& protocol, int n, int m, std::uint64_t trials,
                 std::uint64_t seed) {
  auto players = make_protocol(protocol, spec, n, m);
  Json out = to_json(estimate_advantage(players, spec, n, m, trials, seed));
  out["protocol"] = protocol;
  out["n"] = n;
  out["m"] = m;
  out["T"] = spec.T();
  return out;
}

// ---- pipeline ------------------------------------------------------------------

RunConfig parse_run_config(const Json& j) {
  require(j.is_object(), "config must be a JSON object");
  RunConfig c;
  c.raw = j;
  require(j.contains("stages") && j["stages"].is_array() && !j["stages"].empty(), "config needs a nonempty 'stages' list");
  for (const auto& s : j["stages"]) {
    require(s.is_string(), "stage names are strings");
    std::string name = s.get<std::string>();
    require(std::find(kStages.begin(), kStages.end(), name) != kStages.end(), "unknown stage '" + name + "'");
    c.stages.push_back(name);
  }
  c.seed = j.contains("seed") ? get_u64(j, "seed") : 0;
  if (j.contains("instance")) c.instance = j["instance"];
  if (j.contains("copies")) c.copies = get_int(j, "copies");
  if (j.contains("n")) c.n = get_int(j, "n");
  if (j.contains("m")) c.m = get_int(j, "m");
  if (j.contains("case")) c.kind = parse_case(j["case"].get<std::string>());
  if (j.contains("protocol")) c.protocol = j["protocol"].get<std::string>();
  if (j.contains("trials")) c.trials = get_u64(j, "trials");
  if (j.contains("suite")) c.suite = j["suite"].get<std::string>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("caps") && j["caps"].contains("enumeration")) c.enumeration_cap = get_u64(j["caps"], "enumeration");
  for (auto [key, slot] : {std::pair{"q0", &c.q0}, {"k", &c.k}, {"k_prime", &c.k_prime}, {"T", &c.T}})
    if (j.contains(key)) *slot = get_int(j, key);

  require(c.copies >= 1, "copies must be positive");
  require(c.enumeration_cap >= 1, "caps must be positive");
  auto has = [&](const std::string& s) { return std::find(c.stages.begin(), c.stages.end(), s) != c.stages.end(); };
  auto before = [&](const std::string& a, const std::string& b) {
    auto ia = std::find(c.stages.begin(), c.stages.end(), a);
    auto ib = std::find(c.stages.begin(), c.stages.end(), b);
    return ia < ib;
  };
  bool needs_instance = has("lp-solve") || has("gap-find") || has("uniformize");
  require(!needs_instance || c.instance.is_object(), "stages need an inline 'instance'");
  if (has("uniformize")) require(has("lp-solve") && before("lp-solve", "uniformize"), "uniformize needs lp-solve before it");
  for (const char* s : {"dihp-gen", "stream-emit", "sim-run"})
    if (has(s)) require(has("uniformize") && before("uniformize", s), std::string(s) + " needs uniformize before it");
  if (has("stream-emit")) require(has("dihp-gen") && before("dihp-gen", "stream-emit"), "stream-emit needs dihp-gen before it");
  if (has("dihp-gen") || has("stream-emit") || has("sim-run")) {
    require(c.n >= 1 && c.m >= 1, "n and m must be positive");
    require(c.m <= c.n, "m > n: a partite hypermatching needs m <= n (m=" + std::to_string(c.m) +
                            ", n=" + std::to_string(c.n) + ")");
  }
  if (has("sim-run")) require(c.trials >= 100, "sim-run needs at least 100 trials");
  return c;
}

namespace {

struct StageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw StageFailure(what);
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
  PipelineResult res;
  const std::string hash = config_hash(cfg.raw);
  std::filesystem::create_directories(cfg.output_dir);
  auto emit = [&](const std::string& name, const Json& j) {
    std::string path = (std::filesystem::path(cfg.output_dir) / name).string();
    write_text_file(path, stamped(j, cfg.seed, hash).dump(2) + "\n");
    res.artifacts.push_back(path);
  };

  std::optional<Instance> inst;
  std::optional<GadgetSpec> spec;
  for (const auto& stage : cfg.stages) {
    try {
      if (stage == "lp-solve" || stage == "gap-find" || stage == "uniformize")
        if (!inst) inst = instance_from_json(cfg.instance);
      if (stage == "lp-solve") {
        Json out = cmd_lp_solve(*inst);
        emit("lp_solution.json", out);
        check(out["feasible"].get<bool>(), "LP solution fails the feasibility check");
        check(parse_rational(out["objective"].get<std::string>()) <= 1, "LP objective above 1");
      } else if (stage == "gap-find") {
        Json out = cmd_gap_find(*inst, cfg.enumeration_cap);
        emit("gap_certificate.json", out);
        check(out["sandwich_ok"].get<bool>(), "opt <= LP <= 1 violated");
      } else if (stage == "uniformize") {
        Json out = cmd_uniformize(*inst, cfg.copies);
        spec = gadget_from_json(out);
        emit("gadget.json", out);
        check(out["lift_exact"].get<bool>(), "lifted marginals or pushforward not exact");
        if (cfg.q0) check(*cfg.q0 == spec->q0, "config q0 differs from the instance");
        if (cfg.k) check(*cfg.k == spec->k, "config k differs from the instance");
        if (cfg.k_prime) check(*cfg.k_prime == spec->k_prime, "config k' differs from the gadget");
        if (cfg.T) check(*cfg.T == spec->T(), "config T differs from the gadget");
      } else if (stage == "dihp-gen") {
        Json out = cmd_dihp_gen(*spec, cfg.n, cfg.m, cfg.kind, cfg.seed);
        emit("dihp_sample.json", out);
        if (cfg.kind == DihpCase::Yes) check(out["yes_consistent"].get<bool>(), "Z + Y != Pi X* in some block");
      } else if (stage == "stream-emit") {
        auto lines = cmd_stream_emit(*spec, cfg.n, cfg.m, cfg.kind, cfg.seed);
        std::ostringstream os;
        os << Json{{"seed", cfg.seed}, {"config_hash", hash}, {"constraints", lines.size()}}.dump() << "\n";
        for (const auto& l : lines) os << l.dump() << "\n";
        std::string path = (std::filesystem::path(cfg.output_dir) / "stream.jsonl").string();
        write_text_file(path, os.str());
        res.artifacts.push_back(path);
      } else if (stage == "sim-run") {
        Json out = cmd_sim_run(*spec, cfg.protocol, cfg.n, cfg.m, cfg.trials, cfg.seed);
        emit("sim_run.json", out);
        if (cfg.protocol == "zero") check(out["zero_within_ci"].get<bool>(), "zero-communication advantage outside CI");
      } else if (stage == "lemma-verify") {
        Json out = cmd_lemma_verify(cfg.suite, cfg.seed);
        emit("lemma_" + cfg.suite + ".json", out);
        check(out["pass"].get<bool>(), "lemma suite has a failing check");
      } else if (stage == "fourier-check") {
        Json out = cmd_fourier_check(3, 5, cfg.seed);
        emit("fourier_check.json", out);
        check(out["pass"].get<bool>(), "Fourier residual above 1e-10");
      }
    } catch (const std::exception& e) {
      res.exit_code = 1;
      res.failure = stage + ": " + e.what();
      return res;
    }
  }
  return res;
}

}  // namespace cspgap
