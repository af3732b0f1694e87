#include "asmw/datastructure.hpp"

#include <algorithm>

namespace asmw {

namespace {

class ArithmeticBackend : public Backend {
 public:
  ArithmeticBackend() {
    id_ = "arithmetic";
    symbols_ = {
        Symbol{"zero", 0, true, false, false, true},
        Symbol{"succ", 1, true, false, false, true},
        Symbol{"pred", 1, true, false, false, true},
        Symbol{"nat", 1, true, true, false, false},
    };
  }

  const std::string& id() const override { return id_; }
  const std::vector<Symbol>& symbols() const override { return symbols_; }

  Value eval(const Symbol& sym, const Args& args) const override {
    if (sym.name == "zero") return Value::natural(0);
    if (sym.name == "nat") return Value::boolean(args[0].is_natural());
    if (!args[0].is_natural()) return sym.default_value();
    std::uint64_t n = args[0].natural_value();
    if (sym.name == "succ") return Value::natural(n + 1);
    if (sym.name == "pred") return Value::natural(n == 0 ? 0 : n - 1);
    return sym.default_value();
  }

  bool same(const Backend& other) const override { return other.id() == id_; }

 private:
  std::string id_;
  std::vector<Symbol> symbols_;
};

class EnumBackend : public Backend {
 public:
  EnumBackend(std::string name, std::vector<std::string> elements)
      : name_(std::move(name)), elements_(std::move(elements)) {
    id_ = "enum " + name_;
    symbols_.push_back(Symbol{name_, 1, true, true, false, false});
    for (const auto& e : elements_) symbols_.push_back(Symbol{e, 0, true, false, false, false});
  }

  const std::string& id() const override { return id_; }
  const std::vector<Symbol>& symbols() const override { return symbols_; }

  Value eval(const Symbol& sym, const Args& args) const override {
    if (sym.name == name_)
      return Value::boolean(args[0].is_enum() && args[0].enum_type() == name_);
    return Value::enum_element(name_, sym.name);
  }

  bool same(const Backend& other) const override {
    const auto* e = dynamic_cast<const EnumBackend*>(&other);
    return e && e->name_ == name_ && e->elements_ == elements_;
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& elements() const { return elements_; }

 private:
  std::string id_;
  std::string name_;
  std::vector<std::string> elements_;
  std::vector<Symbol> symbols_;
};

}  // namespace

BackendPtr arithmetic_backend() {
  static BackendPtr instance = std::make_shared<ArithmeticBackend>();
  return instance;
}

BackendPtr enum_backend(std::string name, std::vector<std::string> elements) {
  return std::make_shared<EnumBackend>(std::move(name), std::move(elements));
}

std::optional<UnionError> union_datastructures(const std::vector<const Datastructure*>& parts,
                                               Datastructure* out) {
  Datastructure result;
  for (const auto* part : parts) {
    for (const auto& be : part->backends) {
      bool dup = false;
      for (const auto& have : result.backends) {
        if (have->id() == be->id()) {
          if (!have->same(*be))
            return UnionError{be->id(), {}, "backends with the same name differ"};
          dup = true;
          break;
        }
      }
      if (!dup) result.backends.push_back(be);
    }
    for (const auto& [name, table] : part->tables) {
      auto it = result.tables.find(name);
      if (it == result.tables.end()) {
        result.tables[name] = table;
        continue;
      }
      StaticTable& merged = it->second;
      for (const auto& [args, value] : table.entries) {
        auto found = merged.entries.find(args);
        if (found != merged.entries.end()) {
          if (!(found->second == value))
            return UnionError{name, args, "table parts disagree at a shared tuple"};
        } else {
          merged.entries[args] = value;
        }
      }
      if (table.default_value) {
        if (merged.default_value && !(*merged.default_value == *table.default_value))
          return UnionError{name, {}, "table parts disagree on the default entry"};
        if (!merged.default_value) merged.default_value = table.default_value;
      }
    }
  }
  *out = std::move(result);
  return std::nullopt;
}

}  // namespace asmw
