#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asmw/symbol.hpp"
#include "asmw/value.hpp"

namespace asmw {

using Args = std::vector<Value>;

// A datastructure backend supplies a fragment of the base set and total
// interpretations for its intrinsic static symbols. Applications whose
// arguments fall outside the backend's fragment yield the symbol's default
// value, matching the union-of-structures convention.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual const std::string& id() const = 0;
  virtual const std::vector<Symbol>& symbols() const = 0;
  virtual Value eval(const Symbol& sym, const Args& args) const = 0;
  // Structural equality, used to deduplicate when uniting datastructures.
  virtual bool same(const Backend& other) const = 0;
};

using BackendPtr = std::shared_ptr<const Backend>;

// Natural-numbers arithmetic: zero/0, succ/1, pred/1 (with pred(0) = 0), and
// the sort relation nat/1.
BackendPtr arithmetic_backend();

// A finite enumeration: one nullary constant per element plus the sort
// relation <name>/1.
BackendPtr enum_backend(std::string name, std::vector<std::string> elements);

// A finite partial map interpreting one table-declared static symbol. With a
// default entry the function is total; without one, applications at missing
// tuples are undefined and evaluating them is a run failure.
struct StaticTable {
  std::map<Args, Value> entries;
  std::optional<Value> default_value;

  std::optional<Value> eval(const Args& args) const {
    auto it = entries.find(args);
    if (it != entries.end()) return it->second;
    return default_value;
  }
};

// The static part of an algorithm: backends plus table statics. Dynamic
// content lives in State.
struct Datastructure {
  std::vector<BackendPtr> backends;
  std::map<std::string, StaticTable> tables;
};

struct UnionError {
  std::string symbol;
  Args args;  // empty for declaration-level clashes
  std::string message;
};

// Union of datastructures: backends deduplicated, tables merged entry-wise.
// Parts must agree wherever they overlap.
std::optional<UnionError> union_datastructures(const std::vector<const Datastructure*>& parts,
                                               Datastructure* out);

}  // namespace asmw
