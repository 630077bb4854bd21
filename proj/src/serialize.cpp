#include "cspgap/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cspgap/errors.hpp"

namespace cspgap {

namespace {

Json rationals(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& r : v) a.push_back(to_string(r));
  return a;
}

std::vector<Rational> parse_rationals(const Json& j) {
  require(j.is_array(), "expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& x : j) {
    require(x.is_string() || x.is_number_integer(), "rationals are \"num/den\" strings");
    out.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
  }
  return out;
}

const Json& field(const Json& j, const std::string& key) {
  require(j.is_object(), "expected a JSON object while reading '" + key + "'");
  auto it = j.find(key);
  require(it != j.end(), "missing field '" + key + "'");
  return *it;
}

std::vector<int> int_list(const Json& j) {
  require(j.is_array(), "expected an integer array");
  std::vector<int> out;
  for (const auto& x : j) {
    require(x.is_number_integer(), "expected an integer array");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

std::uint64_t get_u64(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
          "field '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

int get_int(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  require(v.is_number_integer(), "field '" + key + "' must be an integer");
  long long x = v.get<long long>();
  require(x >= INT32_MIN && x <= INT32_MAX, "field '" + key + "' out of range");
  return static_cast<int>(x);
}

Json predicate_to_json(const Predicate& p) {
  if (!p.name().empty()) {
    try {
      if (lookup_predicate(p.name(), p.alphabet(), p.arity()).same_function(p)) return p.name();
    } catch (const InvalidInput&) {
    }
  }
  return p.bits();
}

Predicate predicate_from_json(const Json& j, int alphabet, int arity) {
  require(j.is_string(), "predicate must be a name or a 0/1 table string");
  const std::string s = j.get<std::string>();
  bool table = !s.empty() && s.find_first_not_of("01") == std::string::npos;
  if (table && s.size() == checked_pow(alphabet, arity)) return Predicate::from_bits(arity, alphabet, s);
  return lookup_predicate(s, alphabet, arity);
}

Json to_json(const Instance& inst) {
  Json cs = Json::array();
  int k = inst.empty() ? 0 : inst.constraints().front().predicate.arity();
  for (const auto& c : inst.constraints()) cs.push_back({{"pred", predicate_to_json(c.predicate)}, {"vars", c.vars}});
  return {{"q0", inst.alphabet()}, {"k", k}, {"num_vars", inst.num_vars()}, {"constraints", cs}};
}

Instance instance_from_json(const Json& j) {
  int q0 = get_int(j, "q0"), k = get_int(j, "k"), n = get_int(j, "num_vars");
  require(q0 >= 2 && k >= 1 && n >= 1, "instance needs q0 >= 2, k >= 1, num_vars >= 1");
  const Json& cs = field(j, "constraints");
  require(cs.is_array(), "constraints must be an array");
  std::vector<Constraint> out;
  for (const auto& c : cs) {
    auto vars = int_list(field(c, "vars"));
    for (int v : vars) require(v >= 0 && v < n, "constraint variable out of range");
    out.emplace_back(predicate_from_json(field(c, "pred"), q0, k), std::move(vars));
  }
  return Instance(n, q0, std::move(out));
}

Json to_json(const LocalDistribution& d) { return {{"q", d.q}, {"k", d.k}, {"probs", rationals(d.probs)}}; }

LocalDistribution local_from_json(const Json& j) {
  LocalDistribution d(get_int(j, "q"), get_int(j, "k"), parse_rationals(field(j, "probs")));
  require(d.defect().empty(), "invalid local distribution: " + d.defect());
  return d;
}

Json to_json(const LpSolution& sol) {
  Json locals = Json::array();
  for (const auto& l : sol.locals) locals.push_back(to_json(l));
  return {{"objective", to_string(sol.objective)}, {"locals", locals}, {"local_of", sol.local_of}};
}

LpSolution lp_solution_from_json(const Json& j) {
  LpSolution s;
  s.objective = parse_rational(field(j, "objective").get<std::string>());
  for (const auto& l : field(j, "locals")) s.locals.push_back(local_from_json(l));
  for (const auto& x : field(j, "local_of")) {
    s.local_of.push_back(x.get<std::size_t>());
    require(s.local_of.back() < s.locals.size(), "local_of entry out of range");
  }
  return s;
}

Json to_json(const GapCertificate& cert) {
  return {{"gamma", to_string(cert.gamma)},
          {"beta", to_string(cert.beta)},
          {"instance", to_json(cert.instance)},
          {"lp_solution", to_json(cert.lp_solution)},
          {"best_assignment", cert.best_assignment}};
}

Json to_json(const GadgetSpec& spec) {
  Json edges = Json::array();
  for (const auto& e : spec.edges)
    edges.push_back({{"phi", e.phi},
                     {"dist", to_json(e.dist)},
                     {"pred", predicate_to_json(e.predicate)},
                     {"source_constraint", e.source_constraint}});
  return {{"q", spec.q},
          {"q0", spec.q0},
          {"k", spec.k},
          {"k_prime", spec.k_prime},
          {"copies", spec.copies},
          {"T", spec.T()},
          {"gamma", to_string(spec.gamma)},
          {"lp_value_is_one", spec.lp_value_is_one},
          {"lift", {{"q", spec.lift.q}, {"q0", spec.lift.q0}, {"blocks", spec.lift.blocks}, {"kappa", spec.lift.kappa}}},
          {"edges", edges}};
}

GadgetSpec gadget_from_json(const Json& j) {
  GadgetSpec s;
  s.q = get_int(j, "q");
  s.q0 = get_int(j, "q0");
  s.k = get_int(j, "k");
  s.k_prime = get_int(j, "k_prime");
  s.copies = get_int(j, "copies");
  require(s.q >= 1 && s.q0 >= 2 && s.k >= 1 && s.k_prime >= s.k, "gadget needs q >= 1, q0 >= 2, k' >= k >= 1");
  s.gamma = parse_rational(field(j, "gamma").get<std::string>());
  s.lp_value_is_one = field(j, "lp_value_is_one").get<bool>();
  const Json& lift = field(j, "lift");
  s.lift.q = get_int(lift, "q");
  s.lift.q0 = get_int(lift, "q0");
  s.lift.blocks = field(lift, "blocks").get<std::vector<std::vector<std::vector<int>>>>();
  s.lift.kappa = field(lift, "kappa").get<std::vector<std::vector<int>>>();
  require(static_cast<int>(s.lift.kappa.size()) == s.k_prime, "lift must cover every gadget variable");
  for (const auto& e : field(j, "edges")) {
    GadgetEdge g{int_list(field(e, "phi")), local_from_json(field(e, "dist")),
                 predicate_from_json(field(e, "pred"), s.q0, s.k), get_u64(e, "source_constraint")};
    require(static_cast<int>(g.phi.size()) == s.k, "edge phi length != k");
    for (int p : g.phi) require(p >= 0 && p < s.k_prime, "edge phi entry out of range");
    require(g.dist.q == s.q && g.dist.k == s.k, "edge distribution shape mismatch");
    s.edges.push_back(std::move(g));
  }
  require(s.T() >= 1, "gadget has no edges");
  return s;
}

Json to_json(const Hypermatching& M) {
  Json rows = Json::array();
  for (int j = 0; j < M.m(); ++j) rows.push_back(M.row(j));
  return rows;
}

Json to_json(const DihpSample& s) {
  Json blocks = Json::array();
  for (std::size_t t = 0; t < s.matchings.size(); ++t) {
    Json b{{"matching", to_json(s.matchings[t])}, {"Z", s.signals[t].data()}};
    if (s.noise) b["Y"] = (*s.noise)[t].data();
    blocks.push_back(b);
  }
  Json out{{"case", to_string(s.kind)}, {"n", s.n}, {"m", s.m}, {"sample_seed", s.seed}, {"blocks", blocks}};
  if (s.hidden) out["hidden"] = s.hidden->data();
  return out;
}

Json constraint_line(const Constraint& c) { return {{"pred", predicate_to_json(c.predicate)}, {"vars", c.vars}}; }

Json to_json(const WilsonInterval& w) { return {{"estimate", w.estimate}, {"lower", w.lower}, {"upper", w.upper}}; }

Json to_json(const SuiteReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json v = Json::object();
    for (const auto& [k, x] : c.values) v[k] = x;
    Json e{{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}, {"values", v}};
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(e);
  }
  return {{"suite", r.suite}, {"pass", r.pass()}, {"checks", checks}};
}

Json to_json(const AdvantageEstimate& a) {
  return {{"advantage", a.advantage},
          {"ci", {{"radius", a.ci_radius}, {"yes", to_json(a.yes)}, {"no", to_json(a.no)}}},
          {"comm_bits", a.comm_bits},
          {"trials", a.trials},
          {"zero_within_ci", a.zero_within_ci()}};
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json stamped(Json j, std::uint64_t seed, const std::string& hash) {
  j["seed"] = seed;
  j["config_hash"] = hash;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
}

}  // namespace cspgap
