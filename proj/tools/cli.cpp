#include "cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fm/dot.hpp"
#include "fm/dsl/format.hpp"
#include "fm/dsl/parse.hpp"
#include "fm/error.hpp"
#include "fm/model_json.hpp"
#include "fm/pii/classify.hpp"
#include "fm/pii/registry.hpp"
#include "fm/pii/rules.hpp"
#include "fm/policy/check.hpp"
#include "fm/sim/control.hpp"
#include "fm/sim/sim.hpp"
#include "fm/validate.hpp"

namespace fm::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Options {
  bool json = false;
  bool quiet = false;
};

/// Parse diagnostics and validator violations share one findings report.
struct Finding {
  std::string rule;
  std::string location;
  std::string message;
};

std::string span_text(const dsl::SourceSpan& s) {
  return s.file + ":" + std::to_string(s.line) + ":" + std::to_string(s.column);
}

std::vector<Finding> diag_findings(const std::vector<dsl::Diagnostic>& diags) {
  std::vector<Finding> out;
  for (const auto& d : diags) {
    if (d.severity != dsl::Severity::Error) continue;
    out.push_back(Finding{d.code, span_text(d.span), d.message});
  }
  return out;
}

void print_findings(const Options& opt, const std::vector<Finding>& findings,
                    std::ostream& out) {
  if (opt.json) {
    ordered_json j;
    j["ok"] = findings.empty();
    j["findings"] = ordered_json::array();
    for (const auto& f : findings) {
      ordered_json fj;
      fj["rule"] = f.rule;
      fj["location"] = f.location;
      fj["message"] = f.message;
      j["findings"].push_back(std::move(fj));
    }
    out << j.dump(2) << "\n";
    return;
  }
  for (const auto& f : findings)
    out << f.rule << " at " << f.location << ": " << f.message << "\n";
  if (findings.empty() && !opt.quiet) out << "ok\n";
}

/// Loads and parses a model file; on failure prints findings (validate-style)
/// or diagnostics (strict style) and fills `exit_code`.
std::optional<Model> load_model(const std::string& path, const Options& opt,
                                bool findings_style, std::ostream& out,
                                std::ostream& err, int& exit_code) {
  auto text = read_file(path);
  if (!text) {
    err << "cannot read '" << path << "'\n";
    exit_code = 2;
    return std::nullopt;
  }
  auto parsed = dsl::parse_model(*text, path);
  if (!parsed.ok()) {
    if (findings_style) {
      print_findings(opt, diag_findings(parsed.diagnostics), out);
      exit_code = 1;
    } else {
      for (const auto& d : parsed.diagnostics)
        err << dsl::format_diagnostic(d) << "\n";
      exit_code = 2;
    }
    return std::nullopt;
  }
  if (!opt.quiet) {
    for (const auto& d : parsed.diagnostics) {
      if (d.severity == dsl::Severity::Warning)
        err << dsl::format_diagnostic(d) << "\n";
    }
  }
  return std::move(parsed.value);
}

int cmd_validate(const std::string& path, const Options& opt, std::ostream& out,
                 std::ostream& err) {
  int exit_code = 0;
  auto model = load_model(path, opt, /*findings_style=*/true, out, err, exit_code);
  if (!model) return exit_code;
  ValidationReport report = validate(*model);
  std::vector<Finding> findings;
  for (const auto& v : report.violations)
    findings.push_back(Finding{v.rule, v.location, v.message});
  print_findings(opt, findings, out);
  return findings.empty() ? 0 : 1;
}

int cmd_render(const std::string& path, const std::string& out_path,
               const Options& opt, std::ostream& out, std::ostream& err) {
  int exit_code = 0;
  auto model = load_model(path, opt, /*findings_style=*/true, out, err, exit_code);
  if (!model) return exit_code;
  ValidationReport report = validate(*model);
  if (!report.ok()) {
    std::vector<Finding> findings;
    for (const auto& v : report.violations)
      findings.push_back(Finding{v.rule, v.location, v.message});
    print_findings(opt, findings, out);
    return 1;
  }
  std::string dot = to_dot(*model);
  if (out_path.empty() || out_path == "-") {
    out << dot;
    return 0;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "cannot write '" << out_path << "'\n";
    return 2;
  }
  file << dot;
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& scenario_path,
                 long long max_steps, const std::string& control_path,
                 const Options& opt, std::ostream& out, std::ostream& err) {
  int exit_code = 0;
  auto model =
      load_model(model_path, opt, /*findings_style=*/false, out, err, exit_code);
  if (!model) return exit_code;

  auto scenario_text = read_file(scenario_path);
  if (!scenario_text) {
    err << "cannot read '" << scenario_path << "'\n";
    return 2;
  }
  auto scenario = dsl::parse_scenario(*scenario_text, scenario_path);
  if (!scenario.ok()) {
    for (const auto& d : scenario.diagnostics)
      err << dsl::format_diagnostic(d) << "\n";
    return 2;
  }

  sim::ControlGraph graph = scenario.value->control;
  if (!control_path.empty()) {
    auto control_text = read_file(control_path);
    if (!control_text) {
      err << "cannot read '" << control_path << "'\n";
      return 2;
    }
    auto control = dsl::parse_control(*control_text, control_path);
    if (!control.ok()) {
      for (const auto& d : control.diagnostics)
        err << dsl::format_diagnostic(d) << "\n";
      return 2;
    }
    graph = std::move(*control.value);
  }

  sim::SimState state;
  try {
    state = sim::init_state(*model, *scenario.value);
  } catch (const Error& ex) {
    err << ex.what() << "\n";
    return 2;
  }
  sim::Trace trace = sim::run(*model, state, max_steps);
  out << sim::trace_to_jsonl(trace);

  if (graph.nodes.empty()) return 0;
  sim::ConformanceReport report = sim::conforms(trace, graph);
  if (opt.json) {
    ordered_json j;
    j["ok"] = report.ok;
    if (!report.ok) {
      j["violating_event_id"] = report.violating_event_id;
      j["violating_label"] = report.violating_label;
      j["expected"] = report.expected;
      j["message"] = report.message;
    }
    err << j.dump(2) << "\n";
  } else if (!report.ok) {
    err << "nonconforming: " << report.message << "\n";
  } else if (!opt.quiet) {
    err << "conformance: ok (" << trace.events.size() << " events)\n";
  }
  return report.ok ? 0 : 1;
}

int cmd_classify(const std::string& corpus_path, const std::string& registry_path,
                 bool do_reduce, const std::string& sensitivity_name,
                 const std::string& sphere, const Options& opt,
                 std::ostream& out, std::ostream& err) {
  auto corpus_text = read_file(corpus_path);
  if (!corpus_text) {
    err << "cannot read '" << corpus_path << "'\n";
    return 2;
  }
  auto registry_text = read_file(registry_path);
  if (!registry_text) {
    err << "cannot read '" << registry_path << "'\n";
    return 2;
  }
  std::optional<pii::Handling> handling;
  if (!sensitivity_name.empty()) {
    handling = pii::handling_from_name(sensitivity_name);
    if (!handling) {
      err << "unknown handling '" << sensitivity_name
          << "' (collect, process, disclose, store, transfer)\n";
      return 2;
    }
  }

  auto corpus = dsl::parse_assertions(*corpus_text, corpus_path);
  if (!corpus.ok()) {
    for (const auto& d : corpus.diagnostics)
      err << dsl::format_diagnostic(d) << "\n";
    return 2;
  }
  pii::Registry registry;
  try {
    registry = pii::registry_from_json_text(*registry_text);
  } catch (const Error& ex) {
    err << ex.what() << "\n";
    return 2;
  }

  for (const auto& a : corpus.assertions) {
    auto outcome = pii::classify(a, sphere, registry);
    const pii::PIIRecord& r = outcome.record;
    if (opt.json) {
      ordered_json j;
      j["id"] = r.assertion_id;
      j["text"] = a.text;
      j["predicate"] = r.predicate;
      j["class"] = std::string(pii::pii_class_name(r.cls));
      j["arity"] = r.arity;
      j["referents"] = r.referents;
      j["trivial"] = r.trivial;
      j["warnings"] = outcome.warnings;
      if (handling) {
        auto s = pii::sensitivity(r, *handling, pii::default_sensitivity_policy());
        j["sensitivity"] = std::string(pii::level_name(s.level));
        if (s.warning) j["warnings"].push_back(*s.warning);
      }
      if (do_reduce && r.cls == pii::PiiClass::Compound) {
        auto red = pii::reduce(a, r, sphere, registry);
        j["relationship"] = red.relationship;
        j["components"] = ordered_json::array();
        for (const auto& c : red.components) {
          ordered_json cj;
          cj["text"] = c.assertion.text;
          cj["referent"] = c.referent;
          cj["role"] = c.role;
          j["components"].push_back(std::move(cj));
        }
      }
      out << j.dump() << "\n";
    } else {
      out << r.assertion_id << ": " << pii::pii_class_name(r.cls);
      if (r.cls != pii::PiiClass::NotPII) out << "(" << r.arity << ")";
      out << "  " << a.text;
      if (!r.referents.empty()) {
        out << "  referents=";
        for (std::size_t i = 0; i < r.referents.size(); ++i)
          out << (i != 0 ? "," : "") << r.referents[i];
      }
      if (r.trivial) out << "  trivial";
      if (handling) {
        auto s = pii::sensitivity(r, *handling, pii::default_sensitivity_policy());
        out << "  sensitivity=" << pii::level_name(s.level);
      }
      out << "\n";
      if (!opt.quiet) {
        for (const auto& w : outcome.warnings)
          err << "warning: " << r.assertion_id << ": " << w << "\n";
      }
      if (do_reduce && r.cls == pii::PiiClass::Compound) {
        auto red = pii::reduce(a, r, sphere, registry);
        for (const auto& c : red.components)
          out << "  -> " << c.assertion.text << "  (" << c.role << " "
              << c.referent << ")\n";
      }
    }
  }
  return 0;
}

int cmd_check(const std::string& input_path, const std::string& policy_path,
              const std::string& registry_path, const std::string& model_path,
              const Options& opt, std::ostream& out, std::ostream& err) {
  auto input_text = read_file(input_path);
  if (!input_text) {
    err << "cannot read '" << input_path << "'\n";
    return 2;
  }
  auto policy_text = read_file(policy_path);
  if (!policy_text) {
    err << "cannot read '" << policy_path << "'\n";
    return 2;
  }
  auto policies = dsl::parse_policies(*policy_text, policy_path);
  if (!policies.ok()) {
    for (const auto& d : policies.diagnostics)
      err << dsl::format_diagnostic(d) << "\n";
    return 2;
  }

  pii::Registry registry;
  bool have_registry = false;
  if (!registry_path.empty()) {
    auto registry_text = read_file(registry_path);
    if (!registry_text) {
      err << "cannot read '" << registry_path << "'\n";
      return 2;
    }
    try {
      registry = pii::registry_from_json_text(*registry_text);
    } catch (const Error& ex) {
      err << ex.what() << "\n";
      return 2;
    }
    have_registry = true;
  }

  // The input is a trace when it reads as JSON lines; otherwise a model.
  bool is_trace = false;
  {
    auto first = input_text->find_first_not_of(" \t\r\n");
    is_trace = first != std::string::npos && (*input_text)[first] == '{';
  }

  std::optional<Model> model;
  sim::Trace trace;
  if (is_trace) {
    try {
      trace = sim::trace_from_jsonl(*input_text);
    } catch (const Error& ex) {
      err << ex.what() << "\n";
      return 2;
    }
    if (!model_path.empty()) {
      auto model_text = read_file(model_path);
      if (!model_text) {
        err << "cannot read '" << model_path << "'\n";
        return 2;
      }
      auto parsed = dsl::parse_model(*model_text, model_path);
      if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics)
          err << dsl::format_diagnostic(d) << "\n";
        return 2;
      }
      model = std::move(parsed.value);
    }
  } else {
    auto parsed = dsl::parse_model(*input_text, input_path);
    if (!parsed.ok()) {
      for (const auto& d : parsed.diagnostics)
        err << dsl::format_diagnostic(d) << "\n";
      return 2;
    }
    model = std::move(parsed.value);
  }

  std::vector<policy::Violation> violations;
  policy::PiiContext ctx;
  ctx.registry = have_registry ? &registry : nullptr;
  ctx.model = model ? &*model : nullptr;
  for (const auto& p : *policies.value) {
    std::vector<policy::Violation> found;
    if (is_trace) {
      found = policy::check_trace(trace, p, ctx);
    } else {
      found = policy::check_model(*model, p, ctx.registry);
    }
    for (auto& v : found) violations.push_back(std::move(v));
  }

  if (opt.json) {
    out << policy::violations_to_json_text(violations);
  } else {
    for (const auto& v : violations)
      out << v.policy << " [" << v.evidence_kind << " " << v.evidence
          << "]: " << v.explanation << "\n";
    if (violations.empty() && !opt.quiet) out << "ok\n";
  }
  return violations.empty() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Flow machine modeling and privacy checking"};
  app.name("fm");
  Options opt;
  app.add_flag("--json", opt.json, "machine-readable output");
  app.add_flag("--quiet", opt.quiet, "suppress success chatter");
  app.require_subcommand(1);

  std::string model_path;
  std::string out_path;
  std::string scenario_path;
  std::string control_path;
  std::string corpus_path;
  std::string registry_path;
  std::string sensitivity_name;
  std::string input_path;
  std::string policy_path;
  std::string extra_model_path;
  std::string sphere;
  long long max_steps = 200;
  bool do_reduce = false;

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a model");
  validate_cmd->add_option("model", model_path, "model file")->required();

  CLI::App* render_cmd = app.add_subcommand("render", "model to Graphviz DOT");
  render_cmd->add_option("model", model_path, "model file")->required();
  render_cmd->add_option("out", out_path, "output path (default stdout)");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run a scenario");
  simulate_cmd->add_option("model", model_path, "model file")->required();
  simulate_cmd->add_option("scenario", scenario_path, "scenario file")->required();
  simulate_cmd->add_option("--max-steps", max_steps, "step budget");
  simulate_cmd->add_option("--control-graph", control_path,
                           "conformance graph file (default: the scenario's)");

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify assertions");
  classify_cmd->add_option("corpus", corpus_path, "assertion corpus")->required();
  classify_cmd->add_option("registry", registry_path, "registry JSON")->required();
  classify_cmd->add_flag("--reduce", do_reduce, "expand compound records");
  classify_cmd->add_option("--sensitivity", sensitivity_name,
                           "score under a handling mode");
  classify_cmd->add_option("--sphere", sphere, "resolution sphere");

  CLI::App* check_cmd = app.add_subcommand("check", "check policies");
  check_cmd->add_option("input", input_path, "model file or trace JSONL")
      ->required();
  check_cmd->add_option("policies", policy_path, "policy file")->required();
  check_cmd->add_option("registry", registry_path, "registry JSON");
  check_cmd->add_option("--model", extra_model_path,
                        "model backing a trace check");

  std::vector<const char*> argv;
  argv.push_back("fm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  if (validate_cmd->parsed()) return cmd_validate(model_path, opt, out, err);
  if (render_cmd->parsed())
    return cmd_render(model_path, out_path, opt, out, err);
  if (simulate_cmd->parsed())
    return cmd_simulate(model_path, scenario_path, max_steps, control_path, opt,
                        out, err);
  if (classify_cmd->parsed())
    return cmd_classify(corpus_path, registry_path, do_reduce, sensitivity_name,
                        sphere, opt, out, err);
  if (check_cmd->parsed())
    return cmd_check(input_path, policy_path, registry_path, extra_model_path,
                     opt, out, err);
  err << "no subcommand\n";
  return 2;
}

}  // namespace fm::cli
