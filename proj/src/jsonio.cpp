#include "asmw/jsonio.hpp"

#include <cctype>

namespace asmw {

Json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::True:
      return true;
    case Value::Kind::False:
      return false;
    case Value::Kind::Nil:
      return nullptr;
    case Value::Kind::Natural:
      return v.natural_value();
    case Value::Kind::Enum:
      return v.enum_element();
  }
  return nullptr;
}

static std::optional<Value> resolve_constant(const std::string& name,
                                             const Datastructure& data) {
  for (const auto& be : data.backends)
    for (const auto& sym : be->symbols())
      if (sym.arity == 0 && sym.name == name) return be->eval(sym, {});
  return std::nullopt;
}

Value value_from_json(const Json& j, const Datastructure& data) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_null()) return Value::nil();
  if (j.is_number_unsigned()) return Value::natural(j.get<std::uint64_t>());
  if (j.is_number_integer()) {
    auto n = j.get<std::int64_t>();
    if (n < 0) throw CheckError("negative number in value position");
    return Value::natural(static_cast<std::uint64_t>(n));
  }
  if (j.is_string()) {
    auto v = resolve_constant(j.get<std::string>(), data);
    if (!v) throw CheckError("unknown constant '" + j.get<std::string>() + "' in JSON value");
    return *v;
  }
  throw CheckError("unsupported JSON value: " + j.dump());
}

Value parse_value_token(const std::string& token, const Datastructure& data) {
  if (token == "true") return Value::true_value();
  if (token == "false") return Value::false_value();
  if (token == "nil") return Value::nil();
  if (!token.empty() && std::isdigit(static_cast<unsigned char>(token[0])))
    return Value::natural(std::stoull(token));
  auto v = resolve_constant(token, data);
  if (!v) throw CheckError("cannot parse value '" + token + "'");
  return *v;
}

std::map<std::string, std::map<Args, Value>> oracle_tables_from_json(const Json& j,
                                                                     const Datastructure& data) {
  std::map<std::string, std::map<Args, Value>> tables;
  if (!j.is_object()) throw CheckError("oracle file must be a JSON object");
  for (const auto& [symbol, rows] : j.items()) {
    if (!rows.is_array()) throw CheckError("oracle entry '" + symbol + "' must be an array");
    auto& table = tables[symbol];
    for (const auto& row : rows) {
      if (!row.is_array() || row.empty())
        throw CheckError("oracle row for '" + symbol + "' must be [args..., value]");
      Args args;
      for (std::size_t i = 0; i + 1 < row.size(); ++i)
        args.push_back(value_from_json(row[i], data));
      table[args] = value_from_json(row.back(), data);
    }
  }
  return tables;
}

static Json application_to_json(const std::string& sym, const Args& args, const Value& v) {
  Json row = Json::array();
  row.push_back(sym);
  Json a = Json::array();
  for (const auto& arg : args) a.push_back(value_to_json(arg));
  row.push_back(std::move(a));
  row.push_back(value_to_json(v));
  return row;
}

Json update_set_to_json(const UpdateSet& us) {
  Json out = Json::array();
  for (const auto& u : us) out.push_back(application_to_json(u.loc.symbol, u.loc.args, u.value));
  return out;
}

Json trace_to_json(const EvalTrace& trace) {
  Json out;
  Json evals = Json::array();
  for (const auto& [key, v] : trace.static_evals)
    evals.push_back(application_to_json(key.first, key.second, v));
  out["static_evals"] = std::move(evals);
  Json queries = Json::array();
  for (const auto& [key, v] : trace.extrinsic_queries)
    queries.push_back(application_to_json(key.first, key.second, v));
  out["extrinsic_queries"] = std::move(queries);
  return out;
}

Json step_record_to_json(const StepRecord& rec) {
  Json out;
  out["step"] = rec.index;
  out["updates"] = update_set_to_json(rec.updates);
  Json t = trace_to_json(rec.trace);
  out["static_evals"] = t["static_evals"];
  out["extrinsic_queries"] = t["extrinsic_queries"];
  out["outcome"] = outcome_name(rec.outcome);
  if (rec.problem) out["problem"] = rec.problem->to_string();
  return out;
}

Json run_terminal_to_json(const RunResult& result) {
  Json out;
  out["status"] = run_status_name(result.status);
  out["output"] = result.output ? value_to_json(*result.output) : Json(nullptr);
  out["steps"] = result.steps;
  if (result.problem) out["problem"] = result.problem->to_string();
  return out;
}

}  // namespace asmw
