// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include "support.hpp"

#include "chop/typetheory.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace chop;
using namespace chop::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) note << "first failure: " << why << "; ";
    pass = pass && ok;
  }
};

bool typechecks(const ProcEnv& th, const ProcPtr& p, const ChannelCtx& g, CheckOptions o = {}) {
  try {
    typecheck(th, p, g, o);
    return true;
  } catch (const Error&) {
    return false;
  }
}

const CorpusFile& corpus_file(const std::string& name) {
  static auto files = corpus_files();
  for (auto& f : files)
    if (f.name == name) return f;
  throw std::runtime_error("missing corpus file " + name);
}

void collect_rules(const Derivation& d, std::set<Rule>& out) {
  out.insert(d.rule);
  for (auto& p : d.premises) collect_rules(p, out);
}

bool only_atomic_links(const ProcPtr& p) {
  if (p->kind == ProcKind::Link && !is_atomic(p->type)) return false;
  for (auto& k : p->kids)
    if (!only_atomic_links(k)) return false;
  return true;
}

bool eta_ok(const TypePtr& a) {
  NameSupply names;
  names.reserve(NameSet{"x", "y"});
  ProcPtr e = eta_expand_fully(pr::link("x", "y", a), names);
  CheckOptions atomic;
  atomic.atomic_axioms = true;
  return only_atomic_links(e) && typechecks({}, e, {{"x", dual(a)}, {"y", a}}, atomic);
}

bool is_subsequence(const std::vector<std::string>& want, const std::vector<std::string>& got) {
  std::size_t i = 0;
  for (auto& g : got)
    if (i < want.size() && g == want[i]) ++i;
  return i == want.size();
}

Outcome worked_example_typing() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  Program prog = desugar(parse_program(corpus_file("cloud_system").text));
  for (auto& d : prog.decls) typecheck(d.theta, d.body, d.gamma);
  const Declaration* server = prog.find("Server");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(server && server->gamma.count("cs"), "no Server declaration with channel cs");
  if (!o.pass) return o;
  // Δ is empty for this client; Γ holds the logging channel. The bound
  // variable and label order differ from the source on purpose.
  TypePtr displayed = parse_type("!(all Y. ((assume{l:~Y} @ assume{log:?1, l:Y}) & (Y @ assume{log:?1, l:Y})))");
  o.require(type_eq(server->gamma.at("cs"), displayed), "cs has type " + print(server->gamma.at("cs")));
  o.require(secs < 1.0, "took " + std::to_string(secs) + " s");
  o.note << "cs : " << print(server->gamma.at("cs")) << ", " << secs * 1000 << " ms";
  return o;
}

// The database (the channel closed by the client) meets the application
// (the code that waits on its parameter) across a cut, under the client's
// request on u.
bool database_faces_application(const ProcPtr& p) {
  std::function<bool(const ProcPtr&)> find = [&](const ProcPtr& q) -> bool {
    if (q->kind == ProcKind::Cut) {
      const ProcPtr& l = q->kids[0];
      const ProcPtr& r = q->kids[1];
      bool db_side = l->kind == ProcKind::Close && l->x == q->x;
      if (db_side) {
        // the other side routes the database channel to a cut whose one side is the application
        std::function<bool(const ProcPtr&)> app = [&](const ProcPtr& s) -> bool {
          if (s->kind == ProcKind::Cut) {
            const ProcPtr& a = s->kids[0];
            const ProcPtr& b = s->kids[1];
            auto links_db = [&](const ProcPtr& k) {
              return k->kind == ProcKind::Link && (k->x == q->y || k->y == q->y);
            };
            if ((a->kind == ProcKind::Wait && links_db(b)) || (b->kind == ProcKind::Wait && links_db(a))) return true;
          }
          for (auto& k : s->kids)
            if (app(k)) return true;
          return false;
        };
        if (app(r)) return true;
      }
    }
    for (auto& k : q->kids)
      if (find(k)) return true;
    return false;
  };
  return p->kind == ProcKind::Client && p->x == "u" && find(p);
}

Outcome worked_example_evaluation() {
  Outcome o;
  Program prog = desugar(parse_program(corpus_file("cloud_system").text));
  const Declaration& sys = *prog.find("Sys");
  Trace t = run(sys.theta, sys.body, sys.gamma, {200});
  std::vector<std::string> rules;
  for (auto& s : t.steps) rules.push_back(s.tag.rule);
  o.require(t.status == RunStatus::NormalForm, std::string("status ") + status_name(t.status));
  o.require(is_subsequence({"?!-principal", "∃∀", "⊕&-right", "⊗⅋", "⌈⌉⌊⌋", "chop-invoke"}, rules),
            "rule sequence out of order");
  o.require(database_faces_application(t.final_term()), "final term " + print(t.final_term()));
  o.note << t.steps.size() << " steps, final " << print(t.final_term());
  return o;
}

Outcome preservation() {
  Outcome o;
  std::set<Rule> rules;
  std::set<std::string> files;
  std::size_t steps = 0;
  for (auto& [file, d] : corpus_decls()) {
    files.insert(file);
    collect_rules(typecheck(d.theta, d.body, d.gamma), rules);
    if (!is_closed(d)) continue;
    Trace t = run(d.theta, d.body, d.gamma);
    for (auto& s : t.steps) {
      ++steps;
      o.require(typechecks(d.theta, s.term, d.gamma), file + ": " + s.tag.rule);
    }
  }
  o.require(files.size() >= 30, "only " + std::to_string(files.size()) + " programs");
  o.require(rules.size() == static_cast<std::size_t>(Rule::CCut) + 1, "some typing rule is never used");
  o.note << files.size() << " programs, " << rules.size() << " rules, " << steps << " steps re-checked";
  return o;
}

Outcome progress() {
  Outcome o;
  std::size_t runs = 0;
  for (auto& [file, d] : corpus_decls()) {
    if (!is_closed(d)) continue;
    ++runs;
    Trace t = run(d.theta, d.body, d.gamma, {10000});
    bool redex = d.body->kind == ProcKind::Cut || d.body->kind == ProcKind::ExplSubst || d.body->kind == ProcKind::MCut;
    if (redex) o.require(!t.steps.empty(), file + " takes no step");
    o.require(t.status == RunStatus::NormalForm, file + " ends " + status_name(t.status));
  }
  o.note << runs << " closed programs reach a normal form";
  return o;
}

Outcome duality() {
  Outcome o;
  TypeGen gen(5);
  for (int i = 0; i < 1000; ++i) {
    TypePtr a = gen(1 + i % 6);
    o.require(type_eq(dual(dual(a)), a), print(a));
  }
  o.note << "1000 random types";
  return o;
}

Outcome eta_admissibility() {
  Outcome o;
  auto all = all_types(3);
  for (auto& a : all) o.require(eta_ok(a), print(a));
  // Height 4: one expansion layer per connective over opaque operands, which
  // by substitution covers every instance, plus random concrete types.
  for (const char* layer : {"Y * Z", "Y @ Z", "Y + Z", "Y & Z", "?Y", "!Y", "ex X. Y", "all X. Y", "ex X. X", "all X. ~X"}) {
    TypePtr a = parse_type(layer);
    NameSupply names;
    names.reserve(NameSet{"x", "y"});
    o.require(typechecks({}, eta_expand_link("x", "y", a, names), {{"x", dual(a)}, {"y", a}}), layer);
  }
  TypeGen gen(6);
  gen.higher_order = false;
  for (int i = 0; i < 20000; ++i) {
    TypePtr a = gen(4);
    o.require(eta_ok(a), print(a));
  }
  o.note << "all " << all.size() << " types of height <= 3, every layer, 20000 random of height 4";
  return o;
}

Outcome chop_elimination() {
  Outcome o;
  std::size_t compared = 0, n = 0;
  RunOptions full;
  full.deep = true;
  for (auto& [file, d] : corpus_decls()) {
    ++n;
    ProcPtr q = eliminate_chops(d.body);
    o.require(count_kind(q, ProcKind::ExplSubst) == 0, file + " keeps a chop");
    o.require(typechecks(d.theta, q, d.gamma), file + " no longer checks");
    if (!is_closed(d) || has_exponentials(d.body)) continue;
    ++compared;
    o.require(alpha_eq(run(d.theta, d.body, d.gamma, full).final_term(), run(d.theta, q, d.gamma, full).final_term()),
              file + " normal forms differ");
  }
  o.note << n << " declarations, " << compared << " normal forms compared";
  return o;
}

Outcome translation_typing() {
  Outcome o;
  std::size_t n = 0;
  for (auto& f : corpus_files())
    for (auto& e : check_translation(desugar(parse_program(f.text)))) {
      ++n;
      o.require(e.ok, f.name + "/" + e.decl + ": " + e.error);
    }
  TypeGen gen(7);
  for (int i = 0; i < 1000; ++i) {
    TypePtr a = gen(1 + i % 5);
    o.require(type_eq(translate_type(dual(a)), dual(translate_type(a))), print(a));
  }
  o.note << n << " declarations, 1000 random types";
  return o;
}

Outcome completeness() {
  Outcome o;
  std::size_t checked = 0, longest = 0;
  for (auto& [file, d] : corpus_decls()) {
    if (!is_closed(d)) continue;
    ChannelCtx tg = translate_ctx(d.gamma);
    Trace t = run(d.theta, d.body, d.gamma);
    std::vector<ProcPtr> states{t.initial};
    for (auto& s : t.steps) states.push_back(s.term);
    for (auto& p : states) {
      ProcPtr tp = translate_proc(typecheck(d.theta, p, d.gamma));
      Engine eng;
      eng.reserve(p);
      for (auto& [x, a] : d.gamma) eng.names().reserve(x);
      for (auto& s : eng.all_steps(p, d.gamma)) {
        ++checked;
        ProcPtr tq = translate_proc(typecheck(d.theta, s.result, d.gamma));
        auto r = search_reduct(tp, tq, tg, 32, 200000, 0, nullptr);
        o.require(r.has_value(), file + ": SearchExhausted after " + s.tag.rule);
        longest = std::max(longest, r.value_or(0));
      }
    }
  }
  o.note << checked << " steps, longest translated path " << longest;
  return o;
}

Outcome split_oracle() {
  Outcome o;
  std::size_t n = 0;
  auto compare = [&](const ProcEnv& th, const ProcPtr& p, const ChannelCtx& g, const std::string& where) {
    if (node_count(p) > 12) return;
    ++n;
    o.require(typechecks(th, p, g) == exhaustive_check(th, p, g), where + ": " + print(p));
  };
  for (auto& [file, d] : corpus_decls()) compare(d.theta, d.body, d.gamma, file);
  for (auto& f : corpus_files(true)) {
    try {
      for (auto& d : desugar(parse_program(f.text)).decls) compare(d.theta, d.body, d.gamma, f.name);
    } catch (const Error&) {
    }
  }
  o.note << n << " terms of at most 12 nodes";
  return o;
}

Outcome multiparty() {
  Outcome o;
  std::size_t programs = 0, steps = 0;
  for (auto& [file, d] : corpus_decls()) {
    if (file.rfind("mp_", 0) != 0) continue;
    ++programs;
    o.require(typecheck(d.theta, d.body, d.gamma).rule == Rule::CCut, file + " is not a coherence cut");
    Trace t = run(d.theta, d.body, d.gamma);
    o.require(t.status == RunStatus::NormalForm, file + " does not finish");
    for (auto& s : t.steps) {
      ++steps;
      o.require(typechecks(d.theta, s.term, d.gamma), file + ": " + s.tag.rule);
    }
  }
  Program pa = desugar(parse_program(corpus_file("mp_provide_assume").text));
  const Declaration& d = pa.decls.back();
  auto s = step_checked(d.theta, d.body, d.gamma);
  o.require(s && s->tag.rule == "ccut-⌈⌉⌊⌋", "provide/assume composition does not fire");
  if (s)
    o.require(alpha_eq(s->result, parse_process("let p = proc(l=a : 1) => close a in run p(l=w)")),
              "unexpected reduct " + print(s->result));
  bool three = false;
  for (auto& [file, dd] : corpus_decls())
    if (dd.body->kind == ProcKind::MCut && dd.body->kids.size() >= 3) three = true;
  o.require(three, "no three-party example");
  o.note << programs << " programs, " << steps << " steps re-checked";
  return o;
}

Outcome desugaring() {
  Outcome o;
  struct Sugar {
    const char* name;
    const char* source;
    ProcKind sugar;
  };
  // Each conclusion is the judgement the derived rule displays.
  const Sugar forms[] = {
      {"free output", "proc Main () (x:1 * 1, y:bot) = x[=y]. close x", ProcKind::FreeSend},
      {"code with continuation",
       "proc Main () (x:provide{l:1} * 1) = x[[proc(l=a) => close a]]. close x\n"
       "proc Recv () (y:assume{l:1} @ bot, z:1) = y((p)). wait y. run p(l=z)",
       ProcKind::SendProcCont},
      {"procedures", "proc Main () (z:1) = def K(l=a : 1) = close a in call K(l=z)", ProcKind::DefProc},
      {"parameters", "proc Main () (z:1) = (x\\p. run p(l=z)) <x = proc(l=a : 1) => close a>", ProcKind::HOApply},
  };
  for (auto& f : forms) {
    Program surface = parse_program(f.source);
    bool has_sugar = false;
    std::function<void(const ProcPtr&)> scan = [&](const ProcPtr& p) {
      has_sugar = has_sugar || p->kind == f.sugar;
      for (auto& k : p->kids) scan(k);
    };
    scan(surface.decls[0].body);
    o.require(has_sugar, std::string(f.name) + " not parsed as sugar");
    Program core = desugar(surface);
    for (auto& d : core.decls) {
      o.require(is_core(d.body), std::string(f.name) + " leaves sugar");
      o.require(typechecks(d.theta, d.body, d.gamma), std::string(f.name) + ": " + print(d.body));
    }
  }
  std::size_t files = 0;
  for (auto& f : corpus_files()) {
    ++files;
    Program p = parse_program(f.text);
    std::string once = print(p);
    o.require(print(parse_program(once)) == once, f.name + " surface round trip");
    std::string core = print(desugar(p));
    o.require(print(parse_program(core)) == core, f.name + " core round trip");
  }
  o.note << "4 sugar forms, " << files << " files round-tripped";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char* title;
    Outcome (*check)();
  };
  const Criterion all[] = {
      {"worked example typing", worked_example_typing},
      {"worked example evaluation", worked_example_evaluation},
      {"type preservation", preservation},
      {"progress", progress},
      {"duality involution", duality},
      {"general axiom admissible via eta", eta_admissibility},
      {"chop elimination", chop_elimination},
      {"translation typing", translation_typing},
      {"translation completeness", completeness},
      {"context-splitting oracle", split_oracle},
      {"multiparty", multiparty},
      {"desugaring", desugaring},
  };
  int failed = 0, i = 0;
  for (auto& c : all) {
    ++i;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << "exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << c.title << ": " << o.note.str() << std::endl;
  }
  return failed ? 1 : 0;
}
