#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asmw/cosim.hpp"
#include "asmw/interp.hpp"
#include "asmw/jsonio.hpp"
#include "asmw/normalize.hpp"
#include "asmw/parser.hpp"
#include "asmw/prune.hpp"
#include "asmw/separate.hpp"
#include "asmw/serialize.hpp"

namespace {

using namespace asmw;

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kUsage = 2;
constexpr int kParseExit = 3;
constexpr int kCheckExit = 4;
constexpr int kRunExit = 5;
constexpr int kVerifyExit = 6;
constexpr int kBundleExit = 7;

struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

bool color_enabled() {
  const char* v = std::getenv("ASM_COLOR");
  return v && std::string(v) != "0";
}

std::string paint_red(const std::string& s) {
  if (!color_enabled()) return s;
  return "\033[31m" + s + "\033[0m";
}

OracleEnv load_oracle(const std::string& path, const Datastructure& data) {
  OracleEnv env;
  if (path.empty()) return env;
  Json j = Json::parse(read_file(path));
  for (auto& [symbol, table] : oracle_tables_from_json(j, data)) env.set_table(symbol, table);
  return env;
}

std::vector<Value> parse_inputs(const std::vector<std::string>& tokens, const Datastructure& data) {
  std::vector<Value> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(parse_value_token(t, data));
  return out;
}

int finish_run(const RunResult& res, std::ostream* trace_stream) {
  if (trace_stream) *trace_stream << run_terminal_to_json(res).dump() << "\n";
  std::cout << run_terminal_to_json(res).dump(2) << "\n";
  switch (res.status) {
    case RunStatus::OutputProduced:
    case RunStatus::BudgetExhausted:
      return kOk;
    case RunStatus::Failed:
      std::cerr << paint_red("run failed: " +
                             (res.problem ? res.problem->to_string() : std::string("failure")))
                << "\n";
      return kRunExit;
    case RunStatus::Stuck:
      std::cerr << paint_red("run stuck: " +
                             (res.problem ? res.problem->to_string() : std::string("no answer")))
                << "\n";
      return kRunExit;
  }
  return kInternal;
}

struct RunArgs {
  std::string path;
  std::vector<std::string> inputs;
  std::string oracle;
  std::string trace;
  long max_steps = 10000;
  int max_depth = 16;
  std::size_t entry = 0;
};

int cmd_run(const RunArgs& args) {
  std::ofstream trace_file;
  std::ostream* ts = nullptr;
  if (!args.trace.empty()) {
    if (args.trace == "-") {
      ts = &std::cout;
    } else {
      trace_file.open(args.trace, std::ios::binary);
      if (!trace_file) throw IoError("cannot write " + args.trace);
      ts = &trace_file;
    }
  }
  RunOptions opts;
  opts.max_steps = args.max_steps;
  if (ts)
    opts.observer = [ts](const State&, const StepRecord& rec) {
      *ts << step_record_to_json(rec).dump() << "\n";
    };

  if (args.path.size() >= 5 && args.path.substr(args.path.size() - 5) == ".json") {
    BundleSpec spec;
    std::vector<Algorithm> members;
    try {
      spec = bundle_spec_from_json(Json::parse(read_file(args.path)));
      std::filesystem::path base = std::filesystem::path(args.path).parent_path();
      for (const std::string& rel : spec.member_paths) {
        std::filesystem::path p = base / rel;
        members.push_back(elaborate(parse_unit(read_file(p.string()))));
      }
    } catch (const Json::exception& e) {
      std::cerr << "bundle error: " << e.what() << "\n";
      return kBundleExit;
    }
    if (args.entry >= members.size()) throw CheckError("entry index out of range");
    OracleEnv env = load_oracle(args.oracle, *members[args.entry].data);
    DispatchBundle bundle;
    bundle.members = std::move(members);
    bundle.coverage = spec.coverage;
    bundle.passthrough = &env;
    std::vector<Value> inputs = parse_inputs(args.inputs, *bundle.members[args.entry].data);
    try {
      RunResult res =
          oracle_dispatch_run(bundle, args.entry, inputs, args.max_steps, args.max_depth, opts);
      return finish_run(res, ts);
    } catch (const DepthExceeded& e) {
      std::cerr << paint_red(e.what()) << "\n";
      return kRunExit;
    }
  }

  Algorithm alg = elaborate(parse_unit(read_file(args.path)));
  OracleEnv env = load_oracle(args.oracle, *alg.data);
  std::vector<Value> inputs = parse_inputs(args.inputs, *alg.data);
  RunResult res = run(alg, inputs, env, opts);
  return finish_run(res, ts);
}

int cmd_check(const std::string& path) {
  Algorithm alg = elaborate(parse_unit(read_file(path)));
  Json out{{"status", "ok"},
           {"symbols", alg.vocab->symbols().size()},
           {"inputs", alg.inputs.size()},
           {"output", alg.output ? Json(alg.output->name) : Json()},
           {"effective", is_means_fit_effective(*alg.vocab)}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

struct SeparateArgs {
  std::string path;
  std::string out;
  std::string cert;
  std::vector<std::string> only;
};

int cmd_separate(const SeparateArgs& args) {
  SourceUnit unit = parse_unit(read_file(args.path));
  SeparationResult res =
      args.only.empty() ? separate_all(unit) : separate_named(unit, args.only);
  elaborate(res.unit);
  write_output(args.out, print_unit(res.unit));
  if (!args.cert.empty()) {
    Json renamed = Json::array();
    for (const SeparationEntry& e : res.cert.renamed)
      renamed.push_back(Json{{"function", e.f},
                             {"snapshot", e.s},
                             {"dynamic", e.d},
                             {"claim", e.delta}});
    write_output(args.cert, Json{{"renamed", renamed}}.dump(2) + "\n");
  }
  return kOk;
}

int cmd_normalize(const std::string& path, const std::string& out) {
  SourceUnit unit = parse_unit(read_file(path));
  SourceUnit flat = normalize_unit(unit);
  elaborate(flat);
  write_output(out, print_unit(flat));
  return kOk;
}

struct SerializeArgs {
  std::string path;
  std::string out;
  std::string classification;
};

int cmd_serialize(const SerializeArgs& args) {
  SourceUnit unit = parse_unit(read_file(args.path));
  SerializeResult res = serialize_unit(unit);
  elaborate(res.unit);
  write_output(args.out, print_unit(res.unit));
  if (!args.classification.empty()) {
    Json j = classification_to_json(classify_serialized(res.unit));
    j["round_flag"] = res.done_name;
    j["round_bound"] = res.megastep_bound;
    j["no_queries"] = res.degenerate;
    write_output(args.classification, j.dump(2) + "\n");
  }
  return kOk;
}

struct PruneArgs {
  std::string bundle;
  std::string out;
  bool assume_serialized = false;
  bool return_on_done = false;
};

int cmd_prune(const PruneArgs& args) {
  BundleSpec spec;
  std::vector<SourceUnit> members;
  try {
    spec = bundle_spec_from_json(Json::parse(read_file(args.bundle)));
    std::filesystem::path base = std::filesystem::path(args.bundle).parent_path();
    for (const std::string& rel : spec.member_paths) {
      std::filesystem::path p = base / rel;
      members.push_back(parse_unit(read_file(p.string())));
    }
    PruneOptions opts;
    opts.assume_serialized = args.assume_serialized;
    opts.return_on_done = args.return_on_done;
    PruneResult res = prune_bundle(members, spec.coverage, spec.passthrough, opts);
    write_output(args.out, print_unit(res.unit));
    Json kept = Json::array();
    for (std::size_t origin : res.member_origin) kept.push_back(origin);
    Json cov = Json::object();
    for (const auto& [sym, idx] : res.coverage) cov[sym] = idx;
    Json done = Json::array();
    for (const std::string& d : res.done_names) done.push_back(d);
    Json summary{{"status", "ok"},
                 {"members", spec.member_paths.size()},
                 {"kept", kept},
                 {"coverage", cov},
                 {"round_flags", done},
                 {"effective", res.effective}};
    std::cerr << summary.dump(2) << "\n";
    return kOk;
  } catch (const Json::exception& e) {
    std::cerr << "bundle error: " << e.what() << "\n";
    return kBundleExit;
  } catch (const CheckError& e) {
    std::cerr << "bundle error: " << e.what() << "\n";
    return kBundleExit;
  }
}

struct CosimArgs {
  std::string pass;
  std::uint64_t seed = 1;
  int count = 100;
  long steps = 20;
  int states = 50;
  std::string report;
};

int cmd_cosim(const CosimArgs& args) {
  DriverConfig config;
  config.seed = args.seed;
  config.count = args.count;
  config.steps = args.steps;
  config.state_budget = args.states;
  Json report = drive_pass(args.pass, config);
  write_output(args.report, report.dump(2) + "\n");
  if (report["ok"].get<bool>()) return kOk;
  std::cerr << paint_red("verification failed: " + args.pass) << "\n";
  return kVerifyExit;
}

template <typename F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kParseExit;
  } catch (const CheckError& e) {
    std::cerr << e.what() << "\n";
    return kCheckExit;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    std::cerr << e.what() << "\n";
    return kParseExit;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for sequential abstract state machines"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* c_run = app.add_subcommand("run", "execute a program or a dispatch bundle");
  c_run->add_option("file", run_args.path, "program (.asm) or bundle (.json)")->required();
  c_run->add_option("--input,-i", run_args.inputs, "input value (repeat per position)");
  c_run->add_option("--oracle", run_args.oracle, "oracle answer tables (json)");
  c_run->add_option("--trace", run_args.trace, "write step records as json lines ('-' = stdout)");
  c_run->add_option("--max-steps", run_args.max_steps, "step budget");
  c_run->add_option("--max-depth", run_args.max_depth, "dispatch recursion bound");
  c_run->add_option("--entry", run_args.entry, "bundle entry member index");

  std::string check_path;
  CLI::App* c_check = app.add_subcommand("check", "parse and validate a program");
  c_check->add_option("file", check_path, "program (.asm)")->required();

  SeparateArgs sep_args;
  CLI::App* c_sep = app.add_subcommand("separate", "split dynamics into initial and updated parts");
  c_sep->add_option("file", sep_args.path, "program (.asm)")->required();
  c_sep->add_option("-o,--out", sep_args.out, "output path (default stdout)");
  c_sep->add_option("--only", sep_args.only, "separate just the named symbols, in order");
  c_sep->add_option("--cert", sep_args.cert, "write the renaming certificate (json)");

  std::string norm_path, norm_out;
  CLI::App* c_norm = app.add_subcommand("normalize", "flatten the program into a guard cascade");
  c_norm->add_option("file", norm_path, "program (.asm)")->required();
  c_norm->add_option("-o,--out", norm_out, "output path (default stdout)");

  SerializeArgs ser_args;
  CLI::App* c_ser = app.add_subcommand("serialize", "restage to one oracle query per step");
  c_ser->add_option("file", ser_args.path, "program (.asm)")->required();
  c_ser->add_option("-o,--out", ser_args.out, "output path (default stdout)");
  c_ser->add_option("--emit-classification", ser_args.classification,
                    "write the clause classification (json, '-' = stdout)");

  PruneArgs prune_args;
  CLI::App* c_prune = app.add_subcommand("prune", "combine a bundle into one oracle-free program");
  c_prune->add_option("bundle", prune_args.bundle, "bundle spec (.json)")->required();
  c_prune->add_option("-o,--out", prune_args.out, "output path (default stdout)");
  c_prune->add_flag("--assume-serialized", prune_args.assume_serialized,
                    "members are already one-query-per-step cascades");
  c_prune->add_flag("--return-on-done", prune_args.return_on_done,
                    "pop a session at every round boundary (no equivalence claim)");

  CosimArgs cosim_args;
  CLI::App* c_cosim = app.add_subcommand("cosim", "verify a pass on generated programs");
  c_cosim->add_option("--pass", cosim_args.pass, "separate|normalize|serialize|prune")->required();
  c_cosim->add_option("--seed", cosim_args.seed, "generator seed");
  c_cosim->add_option("--count", cosim_args.count, "number of generated cases");
  c_cosim->add_option("--steps", cosim_args.steps, "steps or rounds per case");
  c_cosim->add_option("--states", cosim_args.states, "state budget per case");
  c_cosim->add_option("--report", cosim_args.report, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (c_run->parsed()) return guarded([&] { return cmd_run(run_args); });
  if (c_check->parsed()) return guarded([&] { return cmd_check(check_path); });
  if (c_sep->parsed()) return guarded([&] { return cmd_separate(sep_args); });
  if (c_norm->parsed()) return guarded([&] { return cmd_normalize(norm_path, norm_out); });
  if (c_ser->parsed()) return guarded([&] { return cmd_serialize(ser_args); });
  if (c_prune->parsed()) return guarded([&] { return cmd_prune(prune_args); });
  if (c_cosim->parsed()) return guarded([&] { return cmd_cosim(cosim_args); });
  return kUsage;
}
