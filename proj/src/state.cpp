#include "asmw/state.hpp"

namespace asmw {

std::optional<Contradiction> find_contradiction(const UpdateSet& us) {
  const Update* prev = nullptr;
  for (const auto& u : us) {
    if (prev && prev->loc == u.loc && !(prev->value == u.value))
      return Contradiction{u.loc, prev->value, u.value};
    prev = &u;
  }
  return std::nullopt;
}

State::State(std::shared_ptr<const Vocabulary> vocab, std::shared_ptr<const Datastructure> data)
    : vocab_(std::move(vocab)), data_(std::move(data)) {}

Value State::read_dynamic(const Symbol& sym, const Args& args) const {
  auto it = dyn_.find(sym.name);
  if (it != dyn_.end()) {
    auto found = it->second->find(args);
    if (found != it->second->end()) return found->second;
  }
  return sym.default_value();
}

void State::write_dynamic(const Symbol& sym, const Args& args, const Value& v) {
  bool is_default = v == sym.default_value();
  auto it = dyn_.find(sym.name);
  if (it == dyn_.end()) {
    if (is_default) return;
    auto m = std::make_shared<DynMap>();
    (*m)[args] = v;
    dyn_[sym.name] = std::move(m);
    return;
  }
  if (it->second.use_count() > 1) it->second = std::make_shared<DynMap>(*it->second);
  auto& m = *it->second;
  if (is_default) {
    m.erase(args);
    if (m.empty()) dyn_.erase(it);
  } else {
    m[args] = v;
  }
}

const std::map<Args, Value>& State::overrides(const std::string& symbol) const {
  static const DynMap empty;
  auto it = dyn_.find(symbol);
  return it == dyn_.end() ? empty : *it->second;
}

std::vector<std::string> State::informative_symbols() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : dyn_)
    if (!m->empty()) out.push_back(name);
  return out;
}

bool operator==(const State& a, const State& b) {
  if (a.dyn_.size() != b.dyn_.size()) return false;
  auto ia = a.dyn_.begin();
  auto ib = b.dyn_.begin();
  for (; ia != a.dyn_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second != ib->second && !(*ia->second == *ib->second)) return false;
  }
  return true;
}

void EvalTrace::record_static(const std::string& sym, const Args& args, const Value& v,
                              bool extrinsic) {
  static_evals[{sym, args}] = v;
  if (extrinsic) extrinsic_queries[{sym, args}] = v;
}

void EvalTrace::record_dynamic(const std::string& sym, const Args& args, const Value& v) {
  dynamic_reads[{sym, args}] = v;
}

void EvalTrace::clear() {
  static_evals.clear();
  extrinsic_queries.clear();
  dynamic_reads.clear();
}

static std::set<std::pair<std::string, Args>> keys_of(
    const std::map<std::pair<std::string, Args>, Value>& m) {
  std::set<std::pair<std::string, Args>> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

std::set<std::pair<std::string, Args>> EvalTrace::static_eval_keys() const {
  return keys_of(static_evals);
}
std::set<std::pair<std::string, Args>> EvalTrace::extrinsic_query_keys() const {
  return keys_of(extrinsic_queries);
}
std::set<std::pair<std::string, Args>> EvalTrace::dynamic_read_keys() const {
  return keys_of(dynamic_reads);
}

}  // namespace asmw
