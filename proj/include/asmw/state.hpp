#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "asmw/datastructure.hpp"
#include "asmw/symbol.hpp"
#include "asmw/value.hpp"

namespace asmw {

struct Location {
  std::string symbol;
  Args args;
  friend bool operator<(const Location& a, const Location& b) {
    if (a.symbol != b.symbol) return a.symbol < b.symbol;
    return a.args < b.args;
  }
  friend bool operator==(const Location& a, const Location& b) {
    return a.symbol == b.symbol && a.args == b.args;
  }
};

struct Update {
  Location loc;
  Value value;
  friend bool operator<(const Update& a, const Update& b) {
    if (!(a.loc == b.loc)) return a.loc < b.loc;
    return a.value < b.value;
  }
  friend bool operator==(const Update& a, const Update& b) {
    return a.loc == b.loc && a.value == b.value;
  }
};

// An update set may be inconsistent (two updates on one location with
// different values); detecting that is check_and_apply's job, not fire's.
using UpdateSet = std::set<Update>;

struct Contradiction {
  Location loc;
  Value first;
  Value second;
};

// Returns the first contradicting location in set order, if any.
std::optional<Contradiction> find_contradiction(const UpdateSet& us);

// A state: the static datastructure plus finite per-symbol override maps for
// the dynamic functions. Every location absent from the overrides holds the
// symbol's default value. Override maps are shared copy-on-write so that
// snapshots of a run are cheap.
class State {
 public:
  State() = default;
  State(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const Datastructure> data);

  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  const Datastructure& data() const { return *data_; }
  std::shared_ptr<const Datastructure> data_ptr() const { return data_; }

  Value read_dynamic(const Symbol& sym, const Args& args) const;

  // Sets one location in place (copy-on-write when the map is shared).
  // Writing a symbol's default value erases the override, so observably equal
  // states have equal representations.
  void write_dynamic(const Symbol& sym, const Args& args, const Value& v);

  // The non-default locations of one dynamic symbol (empty map if none).
  const std::map<Args, Value>& overrides(const std::string& symbol) const;

  // All dynamic symbols with at least one non-default location.
  std::vector<std::string> informative_symbols() const;

  friend bool operator==(const State& a, const State& b);

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const Datastructure> data_;
  using DynMap = std::map<Args, Value>;
  std::map<std::string, std::shared_ptr<DynMap>> dyn_;
};

// The evaluation footprint of one step: which applications of non-logic
// symbols were evaluated and the values obtained. Extrinsic queries are the
// extrinsic-symbol subset of the static evaluations. Logic symbols and
// literals are not recorded.
struct EvalTrace {
  std::map<std::pair<std::string, Args>, Value> static_evals;
  std::map<std::pair<std::string, Args>, Value> extrinsic_queries;
  std::map<std::pair<std::string, Args>, Value> dynamic_reads;

  void record_static(const std::string& sym, const Args& args, const Value& v, bool extrinsic);
  void record_dynamic(const std::string& sym, const Args& args, const Value& v);
  void clear();

  std::set<std::pair<std::string, Args>> static_eval_keys() const;
  std::set<std::pair<std::string, Args>> extrinsic_query_keys() const;
  std::set<std::pair<std::string, Args>> dynamic_read_keys() const;
};

}  // namespace asmw
