#include "asmw/symbol.hpp"

#include <algorithm>

namespace asmw {

namespace logic {

bool is_logic_name(const std::string& name) { return logic_arity(name) >= 0; }

int logic_arity(const std::string& name) {
  if (name == kEq || name == kAnd || name == kOr) return 2;
  if (name == kNot) return 1;
  if (name == kIte) return 3;
  return -1;
}

}  // namespace logic

bool Vocabulary::declare(Symbol sym) {
  if (logic::is_logic_name(sym.name)) return false;
  if (index_.count(sym.name)) return false;
  index_[sym.name] = symbols_.size();
  symbols_.push_back(std::move(sym));
  return true;
}

const Symbol* Vocabulary::lookup(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  return &symbols_[it->second];
}

std::vector<Symbol> Vocabulary::input_variables() const {
  std::vector<Symbol> ins;
  for (const auto& s : symbols_)
    if (s.io_role == IoRole::Input) ins.push_back(s);
  std::sort(ins.begin(), ins.end(),
            [](const Symbol& a, const Symbol& b) { return a.input_pos < b.input_pos; });
  return ins;
}

std::optional<Symbol> Vocabulary::output_variable() const {
  for (const auto& s : symbols_)
    if (s.io_role == IoRole::Output) return s;
  return std::nullopt;
}

bool Vocabulary::consistent(const Vocabulary& a, const Vocabulary& b, std::string* clash) {
  for (const auto& s : a.symbols_) {
    const Symbol* o = b.lookup(s.name);
    if (o && !s.same_declaration(*o)) {
      if (clash) *clash = s.name;
      return false;
    }
  }
  return true;
}

bool is_means_fit_effective(const Vocabulary& vocab) {
  for (const auto& s : vocab.symbols())
    if (s.static_ && s.extrinsic) return false;
  return true;
}

}  // namespace asmw
