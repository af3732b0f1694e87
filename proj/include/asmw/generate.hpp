#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "asmw/oracle.hpp"
#include "asmw/parser.hpp"

namespace asmw {

// Knobs for random well-checked units over naturals and Booleans. Programs
// read the inputs and write scratch dynamics only, so typical runs last many
// steps instead of terminating immediately.
struct GenConfig {
  std::uint64_t seed = 1;
  // false: free mix of nested conditionals and parallel blocks.
  // true: a guard cascade over parallel assignment blocks.
  bool cascade = false;
  int max_rule_depth = 3;
  int max_term_depth = 3;
  int n_dynamic = 3;
  int n_static_tables = 2;
  int n_extrinsic = 1;
  int n_inputs = 1;
  bool with_output = true;
  bool allow_partial_tables = false;  // tables without a default entry
  bool guard_extrinsics = true;       // oracle queries may appear in guards
  int par_width = 3;
};

SourceUnit generate_unit(const GenConfig& config);

// Deterministic responders for every extrinsic symbol of the vocabulary,
// hashing the symbol name and the arguments with the given seed.
void add_scripted_responders(OracleEnv& env, const Vocabulary& vocab, std::uint64_t seed);

// Random values matching the declared input variables.
std::vector<Value> generate_inputs(const std::vector<Symbol>& inputs, std::mt19937_64& rng);

}  // namespace asmw
