#include "asmw/oracle.hpp"

namespace asmw {

void OracleEnv::set_table(const std::string& symbol, std::map<Args, Value> table) {
  responders_[symbol] = [table = std::move(table)](const Args& args) -> std::optional<Value> {
    auto it = table.find(args);
    if (it == table.end()) return std::nullopt;
    return it->second;
  };
}

void OracleEnv::set_responder(const std::string& symbol, Responder r) {
  responders_[symbol] = std::move(r);
}

std::optional<Value> OracleEnv::query(const std::string& symbol, const Args& args) const {
  auto it = responders_.find(symbol);
  if (it == responders_.end()) return std::nullopt;
  return it->second(args);
}

bool OracleEnv::has_responder(const std::string& symbol) const {
  return responders_.count(symbol) > 0;
}

}  // namespace asmw
