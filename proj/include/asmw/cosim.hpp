#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "asmw/generate.hpp"
#include "asmw/jsonio.hpp"
#include "asmw/prune.hpp"
#include "asmw/separate.hpp"
#include "asmw/serialize.hpp"

namespace asmw {

struct VerifyReport {
  bool ok = true;
  long cases = 0;    // comparisons performed
  long skipped = 0;  // inconclusive cases
  Json details = Json::object();

  // Records the first failure; later calls keep the first.
  void fail(const std::string& what, Json info = Json::object());
};

// Runs source and renamed program in lock step, checking after every step
// that the three-way split tracks the original function pointwise, that
// evaluation footprints and update sets correspond under the renaming, that
// every program term evaluates equally under the rewriting, and that
// failures agree exactly.
VerifyReport verify_separation(const SourceUnit& original, const SeparationResult& sep,
                               const std::vector<Value>& inputs, const OracleEnv& env,
                               long max_steps);

// Fires both programs on a spread of states over the dynamic symbols the
// program mentions (relational {false,true}, numerical {0,1,2}, others
// {nil,0,true}; enumerated exhaustively up to state_budget, sampled beyond).
// Normal steps must produce identical update sets and identical evaluation
// footprints; abnormal steps must be abnormal on both sides with the same
// advanced/failed/stuck class. Failure identity is not compared: merging
// clause guards can surface a different witness of the same bad state.
VerifyReport verify_normalization(const SourceUnit& original, const SourceUnit& normalized,
                                  const OracleEnv& env, std::uint64_t seed, int state_budget);

// Drives the rewritten program one marked pass per source step: at most one
// distinct query per combined step, boundary reached within the declared
// bound, equal non-reserved state at every boundary, and per-pass query
// unions matching the source step's queries.
VerifyReport verify_serialization(const SourceUnit& original, const SerializeResult& ser,
                                  const std::vector<Value>& inputs, const OracleEnv& env,
                                  long megasteps);

// Compares the combined machine against reference dispatch (each covered
// query answered by recursively running its member). Also audits the stack
// bookkeeping: level within bounds, active member defined, session of every
// renamed read, and an empty stack when the output is delivered.
VerifyReport verify_pruning(const std::vector<SourceUnit>& members,
                            const std::map<std::string, std::size_t>& coverage,
                            const std::set<std::string>& passthrough, const PruneResult& pruned,
                            const std::vector<Value>& inputs, const OracleEnv& outside,
                            long ref_steps, int max_depth, long combined_steps);

// Greedily replaces subrules with skip while the predicate keeps failing;
// deterministic, at most `budget` probe evaluations.
SourceUnit shrink_unit(const SourceUnit& unit,
                       const std::function<bool(const SourceUnit&)>& still_fails, int budget);

// Seeded batch drivers over generated units; reports are deterministic in
// the configuration.
struct DriverConfig {
  std::uint64_t seed = 1;
  int count = 100;
  long steps = 20;        // lock-step steps or passes per case
  int state_budget = 50;  // states per case (normalization)
};

Json drive_separation(const DriverConfig& config);
Json drive_normalization(const DriverConfig& config);
Json drive_serialization(const DriverConfig& config);
Json drive_pruning(const DriverConfig& config);
// pass is one of separate|normalize|serialize|prune.
Json drive_pass(const std::string& pass, const DriverConfig& config);

}  // namespace asmw
