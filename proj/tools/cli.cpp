#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "wsc/composer.hpp"
#include "wsc/error.hpp"
#include "wsc/generator.hpp"
#include "wsc/instance_io.hpp"
#include "wsc/knowledge.hpp"
#include "wsc/matcher.hpp"
#include "wsc/plan_io.hpp"
#include "wsc/verify.hpp"

namespace wsc::cli {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNegative = 2;

void emit(const std::string& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::SyntaxError, "cannot write '" + path + "'");
  file << doc;
}

struct ComposeArgs {
  std::string instance;
  std::string out;
  bool injective = false;
  bool prune = false;
  bool no_rule_calls = false;
  std::size_t max_iterations = 100;
  std::size_t max_objects = 10000;
};

int do_compose(const ComposeArgs& a, std::ostream& out, std::ostream& err) {
  const auto problem = parse_instance(read_file(a.instance));
  ComposerConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.max_objects = a.max_objects;
  cfg.injective = a.injective;
  cfg.include_rule_calls = true;

  const auto t0 = std::chrono::steady_clock::now();
  auto result = compose(problem, cfg);
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (const auto* failed = std::get_if<NotSolved>(&result)) {
    err << "not solved: " << to_string(failed->reason) << " after " << failed->iterations
        << " sweeps, " << failed->objects << " objects (" << ms << " ms)\n";
    emit(serialize_not_solved(*failed, cfg), a.out, out);
    return kNegative;
  }
  auto plan = std::get<CompositionPlan>(std::move(result));
  if (a.prune) plan = prune_plan(plan, problem);
  if (a.no_rule_calls) {
    plan = without_rule_calls(std::move(plan));
    cfg.include_rule_calls = false;
  }
  err << "solved: " << plan.calls.size() << " calls, " << plan.iterations << " sweeps (" << ms
      << " ms)\n";
  emit(serialize_plan(problem.ontology, plan, cfg), a.out, out);
  return kOk;
}

int do_verify(const std::string& instance, const std::string& plan_path, bool injective,
              std::ostream& out, std::ostream& err) {
  const auto problem = parse_instance(read_file(instance));
  const auto plan = parse_plan(read_file(plan_path), problem.ontology);
  VerifyOptions options;
  options.injective = injective;
  options.saturate_rules = !plan.rule_calls_included;
  const auto result = verify_plan(problem, plan, options);
  if (result.valid) {
    out << "valid\n";
    return kOk;
  }
  out << "invalid at step " << result.step << ": " << result.reason << "\n";
  err << "plan rejected\n";
  return kNegative;
}

int do_match(const std::string& instance, const std::string& service_name, bool dump,
             bool injective, std::ostream& out) {
  const auto problem = parse_instance(read_file(instance));
  std::optional<Service> service = find_step_service(problem, service_name, false);
  if (!service) service = find_step_service(problem, service_name, true);
  if (!service) throw Error(ErrorCode::UnknownParameter, "no service or rule named '" + service_name + "'");

  const auto init = init_from_request(problem.ontology, problem.request);
  if (dump) out << dump_knowledge(problem.ontology, init.state);
  const auto query = build_query_graph(problem.ontology, *service);
  const auto data = DataGraph::build(problem.ontology, init.state);
  MatchConfig cfg;
  cfg.injective = injective;
  const auto bindings = split_and_match(query, data, cfg);
  out << "bindings " << bindings.size() << "\n";
  for (const auto& b : bindings) {
    out << " ";
    for (std::size_t i = 0; i < b.size(); ++i) out << ' ' << service->inputs[i].name << "=#" << b[i].value;
    out << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ontology-driven web service composition"};
  app.require_subcommand(1);

  ComposeArgs compose_args;
  auto* compose_cmd = app.add_subcommand("compose", "Compose a plan for an instance");
  compose_cmd->add_option("instance", compose_args.instance, "Instance document")->required();
  compose_cmd->add_option("--out", compose_args.out, "Write the plan here instead of stdout");
  compose_cmd->add_flag("--injective", compose_args.injective, "Require distinct objects per binding");
  compose_cmd->add_flag("--prune", compose_args.prune, "Drop calls the goal does not depend on");
  compose_cmd->add_flag("--no-rule-calls", compose_args.no_rule_calls, "Omit rule applications from the plan");
  compose_cmd->add_option("--max-iterations", compose_args.max_iterations, "Sweep bound")
      ->check(CLI::PositiveNumber);
  compose_cmd->add_option("--max-objects", compose_args.max_objects, "Object bound")
      ->check(CLI::PositiveNumber);

  std::string verify_instance;
  std::string verify_plan_path;
  bool verify_injective = false;
  auto* verify_cmd = app.add_subcommand("verify", "Replay a plan against an instance");
  verify_cmd->add_option("instance", verify_instance, "Instance document")->required();
  verify_cmd->add_option("plan", verify_plan_path, "Plan document")->required();
  verify_cmd->add_flag("--injective", verify_injective, "Check bindings injectively");

  GeneratorParams gen;
  std::string gen_out;
  bool unsolvable = false;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--concepts", gen.concepts);
  gen_cmd->add_option("--subtypes", gen.subtype_edges);
  gen_cmd->add_option("--relations", gen.relations);
  gen_cmd->add_option("--rules", gen.rules);
  gen_cmd->add_option("--services", gen.services);
  gen_cmd->add_option("--depth", gen.depth, "Planted solution length, rule step included");
  gen_cmd->add_option("--min-arity", gen.min_arity);
  gen_cmd->add_option("--max-arity", gen.max_arity);
  gen_cmd->add_flag("--unsolvable", unsolvable, "Make the goal unreachable");
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--out", gen_out, "Write the instance here instead of stdout");

  std::string match_instance;
  std::string match_service;
  bool match_dump = false;
  bool match_injective = false;
  auto* match_cmd = app.add_subcommand("match", "Debug: bindings of one service in the initial knowledge");
  match_cmd->group("");
  match_cmd->add_option("instance", match_instance)->required();
  match_cmd->add_option("--service", match_service)->required();
  match_cmd->add_flag("--dump", match_dump, "Print the knowledge state first");
  match_cmd->add_flag("--injective", match_injective);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*compose_cmd) return do_compose(compose_args, out, err);
    if (*verify_cmd) return do_verify(verify_instance, verify_plan_path, verify_injective, out, err);
    if (*gen_cmd) {
      gen.solvable = !unsolvable;
      emit(serialize_instance(generate_instance(gen)), gen_out, out);
      return kOk;
    }
    if (*match_cmd) return do_match(match_instance, match_service, match_dump, match_injective, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace wsc::cli
