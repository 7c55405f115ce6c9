#include "chop/translate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace chop;
using json = nlohmann::json;

namespace {

enum Exit { Ok = 0, TypeFailure = 1, SyntaxFailure = 2, OutOfFuel = 3, StuckRun = 4, Usage = 64 };

struct Flags {
  std::string input;
  std::size_t fuel = 10000;
  unsigned seed = 0;
  bool atomic_axioms = false;
  bool cp = false;
  bool json = false;
  bool deep = false;
  std::size_t max_depth = 32;
};

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    ss << f.rdbuf();
  }
  return ss.str();
}

std::string path_string(const std::vector<int>& path) {
  if (path.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "." : "") + std::to_string(path[i]);
  return s;
}

void diagnose(const Flags& f, const Error& e) {
  std::string file = f.input == "-" ? "<stdin>" : f.input;
  if (f.json) {
    std::cerr << json{{"kind", to_string(e.kind())}, {"line", e.pos().line}, {"col", e.pos().col},
                      {"message", e.message()}}
                     .dump()
              << "\n";
  } else {
    std::cerr << file << ":" << e.pos().line << ":" << e.pos().col << ": " << to_string(e.kind()) << ": "
              << e.message() << "\n";
  }
}

int failure_code(const Error& e) { return e.kind() == ErrorKind::SyntaxError || e.kind() == ErrorKind::DuplicateDeclaration ? SyntaxFailure : TypeFailure; }

Program load(const Flags& f) {
  ParseOptions po;
  po.allow_reserved = f.cp;
  return desugar(parse_program(read_input(f.input), po));
}

CheckOptions check_options(const Flags& f) {
  CheckOptions o;
  o.atomic_axioms = f.atomic_axioms;
  o.cp_mode = f.cp;
  return o;
}

const Declaration& entry(const Program& prog) {
  const Declaration* d = prog.entry();
  if (!d) throw Error(ErrorKind::NotWellFormed, "the program has no declarations");
  return *d;
}

int cmd_check(const Flags& f) {
  Program prog = load(f);
  int code = Ok;
  for (auto& d : prog.decls) {
    try {
      typecheck(d.theta, d.body, d.gamma, check_options(f));
      if (f.json)
        std::cout << json{{"decl", d.name}, {"ok", true}, {"context", print(d.gamma)}}.dump() << "\n";
      else
        std::cout << d.name << ": ok :: " << print(d.gamma) << "\n";
    } catch (const Error& e) {
      Error located(e.kind(), d.name + ": " + e.message(), e.pos().known() ? e.pos() : d.pos);
      diagnose(f, located);
      code = TypeFailure;
    }
  }
  return code;
}

int cmd_run(const Flags& f, bool structured) {
  Program prog = load(f);
  const Declaration& d = entry(prog);
  RunOptions ro;
  ro.fuel = f.fuel;
  ro.seed = f.seed;
  ro.deep = f.deep;
  Trace t = run(d.theta, d.body, d.gamma, ro);
  if (!structured) std::cout << "0 " << print(t.initial) << "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (structured)
      std::cout << json{{"step", i + 1}, {"family", family_name(s.tag.family)}, {"rule", s.tag.rule},
                        {"path", s.tag.path}, {"term", print(s.term)}}
                       .dump()
                << "\n";
    else
      std::cout << i + 1 << " " << family_name(s.tag.family) << " " << s.tag.rule << " @" << path_string(s.tag.path)
                << " " << print(s.term) << "\n";
  }
  if (structured)
    std::cout << json{{"status", status_name(t.status)}, {"steps", t.steps.size()}}.dump() << "\n";
  else
    std::cout << "status " << status_name(t.status) << " after " << t.steps.size() << " steps\n";
  switch (t.status) {
  case RunStatus::NormalForm: return Ok;
  case RunStatus::FuelExhausted: return OutOfFuel;
  case RunStatus::Stuck: return StuckRun;
  }
  return Ok;
}

int cmd_desugar(const Flags& f) {
  std::cout << print(load(f));
  return Ok;
}

int cmd_translate(const Flags& f) {
  Program prog = load(f);
  Program out;
  for (auto& d : prog.decls) {
    Derivation der = typecheck(d.theta, d.body, d.gamma, check_options(f));
    Declaration t;
    t.name = d.name;
    t.gamma = translate_env(d.theta);
    for (auto& [x, a] : translate_ctx(d.gamma)) t.gamma[x] = a;
    t.body = translate_proc(der, f.seed);
    out.decls.push_back(std::move(t));
  }
  out.main = prog.main;
  std::cout << print(out);
  return Ok;
}

int cmd_eliminate(const Flags& f) {
  Program prog = load(f);
  for (auto& d : prog.decls) {
    typecheck(d.theta, d.body, d.gamma, check_options(f));
    d.body = eliminate_chops(d.body, f.seed);
  }
  std::cout << print(prog);
  return Ok;
}

int cmd_correspond(const Flags& f) {
  Program prog = load(f);
  const Declaration& d = entry(prog);
  CorrespondenceOptions co;
  co.max_depth = f.max_depth;
  co.fuel = f.fuel;
  co.seed = f.seed;
  int code = Ok;
  for (auto& e : correspondence_check(d.theta, d.body, d.gamma, co)) {
    if (!e.found) code = TypeFailure;
    if (f.json)
      std::cout << json{{"step", e.step + 1}, {"rule", e.rule}, {"found", e.found}, {"length", e.path_length}}.dump()
                << "\n";
    else
      std::cout << e.step + 1 << " " << e.rule << " "
                << (e.found ? "found in " + std::to_string(e.path_length) : std::string("SearchExhausted")) << "\n";
  }
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolchain for classical higher-order processes"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* c) {
    c->add_option("input", f.input, "source file, or - for standard input")->required();
    c->add_option("--fuel", f.fuel, "maximum number of reduction steps")->check(CLI::PositiveNumber);
    c->add_option("--seed", f.seed, "fresh-name seed");
    c->add_flag("--atomic-axioms", f.atomic_axioms, "accept links at atomic types only");
    c->add_flag("--cp", f.cp, "first-order fragment only (also admits translated channel names)");
    c->add_flag("--json", f.json, "line-delimited JSON output");
    c->add_flag("--deep", f.deep, "also reduce below prefixes");
    c->add_option("--max-depth", f.max_depth, "search depth for correspondence checks")->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("check", "type-check every declaration");
  auto* runc = app.add_subcommand("run", "evaluate the main declaration and print its trace");
  auto* trace = app.add_subcommand("trace", "evaluate and print one JSON record per step");
  auto* des = app.add_subcommand("desugar", "print the program with sugar removed");
  auto* tr = app.add_subcommand("translate", "print the first-order translation");
  auto* el = app.add_subcommand("eliminate-chops", "print the program with explicit substitutions removed");
  auto* co = app.add_subcommand("correspond", "search translated reducts for every execution step");
  for (auto* c : {check, runc, trace, des, tr, el, co}) common(c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(f);
    if (*runc) return cmd_run(f, f.json);
    if (*trace) return cmd_run(f, true);
    if (*des) return cmd_desugar(f);
    if (*tr) return cmd_translate(f);
    if (*el) return cmd_eliminate(f);
    if (*co) return cmd_correspond(f);
  } catch (const Error& e) {
    diagnose(f, e);
    return failure_code(e);
  } catch (const std::exception& e) {
    std::cerr << "chop: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}
