#include "hnn/cli.h"

#include <algorithm>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "hnn/checks.h"
#include "hnn/expression.h"
#include "hnn/scenario_config.h"

namespace hnn {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxListed = 50;

struct Options {
  std::string scenario;
  std::string format = "text";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string expr;
  std::string order = "ltr";
  double t = 0.0;
  int n_max = 10;
  int max_len = -1;
  int theta = 0;
  std::string v;
  std::size_t samples = 0;
};

class Reporter {
 public:
  Reporter(std::string command, const Options& o, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), json_(o.format == "json"), scenario_(o.scenario), out_(out), err_(err) {}

  void set_scenario(const std::string& name) { scenario_ = name; }

  void emit(const json& result, const std::vector<std::string>& text_lines, const std::vector<std::string>& diagnostics = {}) {
    if (json_) {
      out_ << json{{"command", command_}, {"scenario", scenario_}, {"result", result}, {"diagnostics", diagnostics}}.dump(2)
           << "\n";
      return;
    }
    for (const auto& d : diagnostics) err_ << d << "\n";
    for (const auto& l : text_lines) out_ << l << "\n";
  }

  int input_error(const std::string& message, const std::string& detail = {}) {
    err_ << "error: " << message << "\n";
    if (!detail.empty()) err_ << detail;
    if (json_) {
      out_ << json{{"command", command_}, {"scenario", scenario_}, {"result", nullptr}, {"diagnostics", {message}}}.dump(2)
           << "\n";
    }
    return kExitInputError;
  }

 private:
  std::string command_;
  bool json_;
  std::string scenario_;
  std::ostream& out_;
  std::ostream& err_;
};

json report_json(const CheckReport& r) {
  return {{"check", r.name}, {"checked", r.checked}, {"failures", r.failures}, {"notes", r.notes}, {"passed", r.passed()}};
}

int emit_check(Reporter& rep, const CheckReport& r) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < r.failures.size() && i < kMaxListed; ++i) lines.push_back("mismatch: " + r.failures[i]);
  if (r.failures.size() > kMaxListed) lines.push_back("... " + std::to_string(r.failures.size() - kMaxListed) + " more");
  for (const auto& n : r.notes) lines.push_back(n);
  lines.push_back(r.passed() ? "PASS" : "FAIL " + std::to_string(r.failures.size()));
  rep.emit(report_json(r), lines);
  return r.passed() ? kExitOk : kExitCheckFailed;
}

std::string caret(const std::string& src, std::size_t offset) {
  return "  " + src + "\n  " + std::string(std::min(offset, src.size()), ' ') + "^\n";
}

int run(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  Reporter rep(command, o, out, err);
  ScenarioPtr s;
  try {
    LoadOptions lo;
    if (o.seed_given) lo.seed = o.seed;
    s = load_scenario_file(o.scenario, lo);
  } catch (const Error& e) {
    return rep.input_error(e.what());
  }
  rep.set_scenario(s->name());

  auto parse_expr = [&](const std::string& src) { return evaluate(*parse_expression(src), s); };

  try {
    if (command == "normalize" || command == "expect" || command == "moment" || command == "sigma") {
      HnnElement x = HnnElement::zero(s);
      try {
        x = parse_expr(o.expr);
      } catch (const ParseError& e) {
        return rep.input_error(std::string("expression ") + e.what(), caret(o.expr, e.offset()));
      }
      if (command == "normalize") {
        const HnnElement n = normalize(x, o.order == "rtl" ? ScanOrder::RightToLeft : ScanOrder::LeftToRight);
        const std::string text = to_string(n);
        rep.emit({{"text", text}, {"words", n.words().size()}}, {text});
      } else if (command == "expect") {
        const std::string text = to_string(expect_onto_base(x));
        rep.emit({{"text", text}}, {text});
      } else if (command == "moment") {
        const Complex m = state_moment(x);
        const std::string text = format_complex(m);
        rep.emit({{"re", m.real()}, {"im", m.imag()}, {"text", text}}, {text});
      } else {
        const std::string text = to_string(modular_apply(x, o.t));
        rep.emit({{"t", o.t}, {"text", text}}, {text});
      }
      return kExitOk;
    }

    if (command == "trace") return emit_check(rep, check_trace_hypothesis(s, o.samples ? o.samples : 50, o.max_len < 0 ? 3 : o.max_len));
    if (command == "haar") {
      std::optional<std::size_t> theta;
      if (o.theta > 0) theta = static_cast<std::size_t>(o.theta - 1);
      return emit_check(rep, check_haar(s, theta, o.n_max, o.max_len < 0 ? 6 : o.max_len));
    }
    if (command == "oracle") return emit_check(rep, oracle_compare(s, o.max_len < 0 ? 6 : o.max_len));
    if (command == "full-hypothesis") {
      if (o.v.empty()) return rep.input_error("check full-hypothesis needs --v <base element expression>");
      AlgebraElement v = AlgebraElement::zero(s->base());
      try {
        v = evaluate_base(*parse_expression(o.v), s->base(), base_bindings(s->base(), s->bindings()));
      } catch (const ParseError& e) {
        return rep.input_error(std::string("--v ") + e.what(), caret(o.v, e.offset()));
      }
      return emit_check(rep, check_full_hypothesis(s, v, o.n_max));
    }
    if (command == "confluence") {
      return emit_check(rep, check_confluence(s, o.samples ? o.samples : 20, o.max_len < 0 ? 4 : o.max_len));
    }
  } catch (const Error& e) {
    return rep.input_error(e.what());
  }
  return rep.input_error("unknown command '" + command + "'");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word calculus for reduced HNN extensions of operator algebras", "hnn"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--seed", o.seed, "Override the scenario seed")->each([&](const std::string&) { o.seed_given = true; });
  };
  auto with_expr = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--expr", o.expr, "Word expression")->required();
  };

  auto* normalize_cmd = app.add_subcommand("normalize", "Print the reduced-word form");
  with_expr(normalize_cmd);
  normalize_cmd->add_option("--order", o.order, "Junction scan order")->check(CLI::IsMember({"ltr", "rtl"}));
  with_expr(app.add_subcommand("expect", "Print the expectation onto the base algebra"));
  with_expr(app.add_subcommand("moment", "Print phi o E_D o E(x)"));
  auto* sigma_cmd = app.add_subcommand("sigma", "Apply the modular automorphism at time t");
  with_expr(sigma_cmd);
  sigma_cmd->add_option("--t", o.t, "Time parameter")->required();

  auto* check = app.add_subcommand("check", "Run a scenario check");
  check->require_subcommand(1);
  auto* trace = check->add_subcommand("trace", "Trace hypothesis and traciality");
  common(trace);
  trace->add_option("--samples", o.samples, "Random word pairs");
  trace->add_option("--max-len", o.max_len, "Letters per random word");
  auto* haar = check->add_subcommand("haar", "Haar moments and freeness of the stable letters");
  common(haar);
  haar->add_option("--theta", o.theta, "Stable letter index (1-based); all letters if omitted")->check(CLI::PositiveNumber);
  haar->add_option("--n-max", o.n_max, "Largest power");
  haar->add_option("--max-len", o.max_len, "Longest mixed letter word");
  auto* oracle = check->add_subcommand("oracle", "Compare with the group trace on all short words");
  common(oracle);
  oracle->add_option("--max-len", o.max_len, "Word length bound");
  auto* full = check->add_subcommand("full-hypothesis", "Vanishing expectations of powers of v");
  common(full);
  full->add_option("--v", o.v, "Unitary of the base algebra")->required();
  full->add_option("--n-max", o.n_max, "Largest power");
  auto* confluence = check->add_subcommand("confluence", "Left-to-right against right-to-left normalization");
  common(confluence);
  confluence->add_option("--samples", o.samples, "Random words");
  confluence->add_option("--max-len", o.max_len, "Letters per random word");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  for (auto* sub : {normalize_cmd, app.get_subcommand("expect"), app.get_subcommand("moment"), sigma_cmd}) {
    if (sub->parsed()) return run(sub->get_name(), o, out, err);
  }
  for (auto* sub : check->get_subcommands()) return run(sub->get_name(), o, out, err);
  return kExitInputError;
}

}  // namespace hnn
