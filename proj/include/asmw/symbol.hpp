#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asmw/value.hpp"

namespace asmw {

enum class IoRole { None, Input, Output };

// A basic function symbol of a vocabulary. The logic symbols (true, false,
// nil, eq, and, or, not, ite) are implicit in every vocabulary and are not
// represented as Symbol entries.
struct Symbol {
  std::string name;
  int arity = 0;
  bool static_ = false;
  bool relational = false;
  // Meaningful only for static symbols: an extrinsic function is answered by
  // an outside oracle, an intrinsic one by the algorithm's own datastructure.
  bool extrinsic = false;
  bool numerical = false;
  IoRole io_role = IoRole::None;
  int input_pos = 0;  // 1-based, meaningful when io_role == Input

  bool dynamic() const { return !static_; }
  bool intrinsic() const { return static_ && !extrinsic; }

  // The content of every location of a fresh dynamic symbol, and the result of
  // a basic function applied outside the fragment that defines it.
  Value default_value() const {
    if (relational) return Value::false_value();
    if (numerical) return Value::natural(0);
    return Value::nil();
  }

  bool same_declaration(const Symbol& o) const {
    return name == o.name && arity == o.arity && static_ == o.static_ &&
           relational == o.relational && extrinsic == o.extrinsic &&
           numerical == o.numerical && io_role == o.io_role &&
           input_pos == o.input_pos;
  }
};

// Names of the implicit logic function symbols.
namespace logic {
inline constexpr const char* kEq = "eq";
inline constexpr const char* kAnd = "and";
inline constexpr const char* kOr = "or";
inline constexpr const char* kNot = "not";
inline constexpr const char* kIte = "ite";

bool is_logic_name(const std::string& name);
// Arity of a logic symbol name, or -1 if not a logic symbol.
int logic_arity(const std::string& name);
}  // namespace logic

// Fresh symbols introduced by transformation passes live in a reserved
// namespace: every name starting with '$'. User source may not declare or
// mention such names unless marked as pass output ("pragma generated").
inline bool is_reserved_name(const std::string& name) {
  return !name.empty() && name[0] == '$';
}

class Vocabulary {
 public:
  // Declares a symbol; returns false if the name is taken or is a logic name.
  bool declare(Symbol sym);

  const Symbol* lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return lookup(name) != nullptr; }

  // Declaration order is the canonical iteration order everywhere.
  const std::vector<Symbol>& symbols() const { return symbols_; }

  // Input variables sorted by their declared position.
  std::vector<Symbol> input_variables() const;
  std::optional<Symbol> output_variable() const;

  // Shared names must agree on arity and all markings.
  static bool consistent(const Vocabulary& a, const Vocabulary& b,
                         std::string* clash = nullptr);

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t> index_;
};

// True iff no symbol of the vocabulary is both static and extrinsic, i.e. the
// algorithm relies on no outside oracle.
bool is_means_fit_effective(const Vocabulary& vocab);

}  // namespace asmw
