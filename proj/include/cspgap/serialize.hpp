#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "cspgap/basic_lp.hpp"
#include "cspgap/csp_core.hpp"
#include "cspgap/dihp.hpp"
#include "cspgap/lemma_lab.hpp"
#include "cspgap/protocol.hpp"
#include "cspgap/uniformize.hpp"

namespace cspgap {

using Json = nlohmann::json;

// A predicate is written by zoo name when it has one, else as its 0/1 truth table.
Json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const Json& j, int alphabet, int arity);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json to_json(const LocalDistribution& d);
LocalDistribution local_from_json(const Json& j);

Json to_json(const LpSolution& sol);
LpSolution lp_solution_from_json(const Json& j);

Json to_json(const GapCertificate& cert);

Json to_json(const GadgetSpec& spec);
GadgetSpec gadget_from_json(const Json& j);

Json to_json(const Hypermatching& M);
Json to_json(const DihpSample& s);
// One stream line: predicate and variables of a constraint.
Json constraint_line(const Constraint& c);

Json to_json(const WilsonInterval& w);
Json to_json(const SuiteReport& r);
Json to_json(const AdvantageEstimate& a);

// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_hash(const Json& config);
// Adds "seed" and "config_hash" to an object.
Json stamped(Json j, std::uint64_t seed, const std::string& hash);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Unsigned field with a range check; missing keys are an input error.
std::uint64_t get_u64(const Json& j, const std::string& key);
int get_int(const Json& j, const std::string& key);

}  // namespace cspgap
