#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "asmw/jsonio.hpp"
#include "asmw/parser.hpp"

namespace asmw {

// A closed family of algorithms: member 0 is the entry point, `coverage`
// names the member that computes each covered extrinsic symbol, and
// `passthrough` lists extrinsic symbols deliberately left to an outside
// oracle.
struct BundleSpec {
  std::vector<std::string> member_paths;
  std::map<std::string, std::size_t> coverage;
  std::set<std::string> passthrough;
};

// { "members": [path...], "coverage": {symbol: index}, "passthrough": [symbol...] }
BundleSpec bundle_spec_from_json(const Json& j);

struct PruneOptions {
  // Members are already query-serial cascades; verify instead of serializing.
  bool assume_serialized = false;
  // Return from a call at the first completed pass of the callee, whether or
  // not it has produced its output yet. Kept for comparison; the default
  // waits for the output.
  bool return_on_done = false;
};

// Names of the bookkeeping state of the combined machine.
namespace machinery {
inline constexpr const char* kTop = "$top";        // current stack level
inline constexpr const char* kSession = "$n";      // running session
inline constexpr const char* kMax = "$max";        // highest session so far
inline constexpr const char* kInit = "$init";      // inputs copied to session 0
inline constexpr const char* kActive = "$active";  // level -> member index
inline constexpr const char* kTopAt = "$topat";    // session -> its stack level
inline constexpr const char* kReturnTo = "$ret";   // session -> caller session
inline constexpr const char* kAnswer = "$to";      // session -> returned answer
}  // namespace machinery

// Per-member prefix of the session-indexed copies of its dynamic symbols.
std::string member_prefix(std::size_t index);
// Per-clause flag marking a pending call from the given cascade clause.
std::string call_flag_name(std::size_t member, std::size_t clause);

struct PruneResult {
  SourceUnit unit;
  // New member index -> index in the input list (after duplicate merging).
  std::vector<std::size_t> member_origin;
  std::map<std::string, std::size_t> coverage;  // remapped to new indices
  std::vector<std::string> done_names;          // renamed pass marker per member
  bool effective = false;  // combined vocabulary is free of extrinsic symbols
};

// Builds one algorithm that behaves like the entry member run under oracle
// dispatch: every covered query becomes a suspended call into a fresh
// session of the covering member. Members are serialized first (or checked,
// under assume_serialized); equal members are merged, unreferenced ones
// dropped. Throws CheckError on uncovered queries, arity mismatches with the
// callee's inputs, members lacking an output, or clashing declarations.
PruneResult prune_bundle(const std::vector<SourceUnit>& members,
                         const std::map<std::string, std::size_t>& coverage,
                         const std::set<std::string>& passthrough,
                         const PruneOptions& options = {});

}  // namespace asmw
