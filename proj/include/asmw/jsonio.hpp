#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "asmw/datastructure.hpp"
#include "asmw/interp.hpp"

namespace asmw {

using Json = nlohmann::ordered_json;

// Values map to JSON as true/false/null/number; enum elements as their bare
// name string, resolved against the datastructure's backends when reading.
Json value_to_json(const Value& v);
Value value_from_json(const Json& j, const Datastructure& data);

// Parses a command-line value token: true, false, nil, a numeral, or a
// backend constant name.
Value parse_value_token(const std::string& token, const Datastructure& data);

// Oracle tables: { symbol: [[arg..., value], ...] }.
std::map<std::string, std::map<Args, Value>> oracle_tables_from_json(const Json& j,
                                                                     const Datastructure& data);

Json update_set_to_json(const UpdateSet& us);
Json trace_to_json(const EvalTrace& trace);
Json step_record_to_json(const StepRecord& rec);
Json run_terminal_to_json(const RunResult& result);

}  // namespace asmw
