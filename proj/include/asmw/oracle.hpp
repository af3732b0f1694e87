#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "asmw/datastructure.hpp"
#include "asmw/value.hpp"

namespace asmw {

// Answers queries to extrinsic symbols. A responder either returns a value or
// declines; a genuine oracle that never replies leaves the algorithm stuck.
class OracleEnv {
 public:
  using Responder = std::function<std::optional<Value>(const Args&)>;

  // Symbols without a responder never answer.
  void set_table(const std::string& symbol, std::map<Args, Value> table);
  void set_responder(const std::string& symbol, Responder r);

  std::optional<Value> query(const std::string& symbol, const Args& args) const;

  bool has_responder(const std::string& symbol) const;

 private:
  std::map<std::string, Responder> responders_;
};

}  // namespace asmw
