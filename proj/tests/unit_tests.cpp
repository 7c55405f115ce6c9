#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chop/translate.hpp"
#include "chop/typetheory.hpp"

using namespace chop;

namespace {

ProcPtr P(const char* s) { return parse_process(s); }
ProcPtr CP(const char* s) { return parse_process(s, {true}); }
TypePtr T(const char* s) { return parse_type(s); }
ParamCtx ctx1(const char* l, TypePtr a) { return ParamCtx(std::vector<ParamCtx::Entry>{{l, std::move(a)}}); }
ParamRecord rec1(const char* l, const char* x) { return ParamRecord(std::vector<ParamRecord::Entry>{{l, x}}); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Unsupported;
}

bool same(const TypePtr& a, const char* b) { return type_eq(a, T(b)); }

} // namespace

TEST_CASE("free names") {
  CHECK(free_channels(pr::close("x")) == NameSet{"x"});
  CHECK(free_channels(P("new x:1 y { close x | wait y. close z }")) == NameSet{"z"});
  CHECK(free_channels(P("w[proc(l=a) => close a]")) == NameSet{"w"});
  CHECK(free_proc_vars(P("run p(l=x)")) == NameSet{"p"});
  CHECK(free_proc_vars(P("x(proc p). run p(l=y)")).empty());
  CHECK(free_proc_vars(P("let p = proc(l=a : 1) => run q(l=a) in run p(l=x)")) == NameSet{"q"});
}

TEST_CASE("channel renaming") {
  CHECK(alpha_eq(rename_channel(P("close y"), "w", "y"), P("close w")));
  ProcPtr r = rename_channel(P("x(w). close w"), "w", "y");
  CHECK(alpha_eq(r, P("x(w). close w")));
  CHECK(free_channels(r) == NameSet{"x"});
  ProcPtr inv = rename_channel(P("run p(l=y)"), "w", "y");
  CHECK(alpha_eq(inv, P("run p(l=w)")));
  CHECK(free_channels(inv) == NameSet{"w"});
}

TEST_CASE("record composition") {
  CHECK(compose_records(rec1("l", "x"), rec1("l", "a")) == std::map<Name, Name>{{"a", "x"}});
  CHECK(compose_records(ParamRecord(std::vector<ParamRecord::Entry>{{"l1", "x"}, {"l2", "y"}}), ParamRecord(std::vector<ParamRecord::Entry>{{"l1", "a"}, {"l2", "b"}})) ==
        std::map<Name, Name>{{"a", "x"}, {"b", "y"}});
  CHECK(kind_of([] { compose_records(rec1("l", "x"), rec1("m", "a")); }) == ErrorKind::LabelMismatch);
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(P("x(y). run p(l=y)"), P("x(z). run p(l=z)")));
  CHECK_FALSE(alpha_eq(P("close x"), P("close y")));
  CHECK(alpha_eq(P("new x:1 y { close x | wait y. close z }"), P("new a:1 b { close a | wait b. close z }")));
}

TEST_CASE("duality") {
  CHECK(same(dual(ty::one()), "bot"));
  CHECK(same(dual(T("provide{l:1 * bot}")), "assume{l:1 * bot}"));
  CHECK(same(dual(dual(T("all X. X @ ?X"))), "all X. X @ ?X"));
  CHECK(same(dual(T("all X. X @ ?X")), "ex X. ~X * !~X"));
  CHECK(same(dual(T("0 + top")), "top & 0"));
}

TEST_CASE("type substitution") {
  CHECK(same(subst_type_var(T("X * 1"), ty::one(), "X"), "1 * 1"));
  CHECK(same(subst_type_var(T("all X. X"), ty::one(), "X"), "all X. X"));
  CHECK(same(subst_type_var(T("assume{l:X}"), T("1 + bot"), "X"), "assume{l:1 + bot}"));
  CHECK(same(subst_type_var(T("~X"), T("1 + bot"), "X"), "bot & 1"));
  // The binder is renamed rather than capturing the substituted Y.
  CHECK(same(subst_type_var(T("all Y. X * Y"), T("Y"), "X"), "all Z. Y * Z"));
}

TEST_CASE("instantiate") {
  CHECK(ctx_eq(instantiate(ctx1("l", ty::one()), rec1("l", "x")), ChannelCtx{{"x", ty::one()}}));
  CHECK(ctx_eq(instantiate(ParamCtx(std::vector<ParamCtx::Entry>{{"l1", ty::one()}, {"l2", ty::bot()}}), ParamRecord(std::vector<ParamRecord::Entry>{{"l1", "a"}, {"l2", "b"}})),
               ChannelCtx{{"a", ty::one()}, {"b", ty::bot()}}));
  CHECK(kind_of([] { instantiate(ctx1("l", ty::one()), rec1("m", "x")); }) == ErrorKind::LabelMismatch);
}

TEST_CASE("eta expansion rows") {
  // link x y : 1 puts x at bot and y at 1.
  CHECK(alpha_eq(eta_expand_link("x", "y", ty::one()), P("wait x. close y")));
  CHECK(alpha_eq(eta_expand_link("x", "y", T("provide{l:1}")), P("x(proc p). y[proc(l=c) => run p(l=c)]")));
  CHECK(alpha_eq(eta_expand_link("x", "y", T("ex X. X")), P("x(type X). y[type X]. link x y : X")));
  CHECK(alpha_eq(eta_expand_link("x", "y", T("1 * bot")), P("x(a). y[b].(link a b : 1 | link x y : bot)")));
  CHECK(alpha_eq(eta_expand_link("x", "y", ty::top()), P("y.case()")));
}

TEST_CASE("parsing") {
  Program p = parse_program("proc Main () (x:1) = close x");
  REQUIRE(p.decls.size() == 1);
  CHECK(alpha_eq(p.decls[0].body, pr::close("x")));

  Program f = parse_program("proc F (p:{l:1}) (x:1) = run p(l=x)");
  REQUIRE(f.decls.size() == 1);
  REQUIRE(f.decls[0].theta.count("p"));
  CHECK(ctx_eq(f.decls[0].theta.at("p"), ctx1("l", ty::one())));
  CHECK(alpha_eq(f.decls[0].body, pr::invoke("p", rec1("l", "x"))));

  try {
    parse_program("proc Bad () (x:1) = close");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.pos().line == 1);
    CHECK(e.pos().col == 26);
  }
  CHECK(kind_of([] { parse_program("proc A () (x:1) = close x\nproc A () (x:1) = close x"); }) ==
        ErrorKind::DuplicateDeclaration);
  CHECK(kind_of([] { parse_process("close x^p"); }) == ErrorKind::SyntaxError);
  CHECK(CP("close x^p")->x == "x^p");
}

TEST_CASE("printing") {
  CHECK(print(pr::close("x")) == "close x");
  CHECK(print(pr::cut("x", ty::one(), "y", pr::close("x"), pr::wait("y", pr::close("z")))) ==
        "new x:1 y { close x | wait y. close z }");
  CHECK(print(pr::send_proc("x", rec1("l", "a"), pr::close("a"))) == "x[proc(l=a) => close a]");
  CHECK(print(T("!(all X. (X @ bot) & 1)")) == "!(all X. X @ bot & 1)");
}

TEST_CASE("desugaring shapes") {
  ProcPtr fo = desugar(P("x[=y]. close x"), {}, {{"x", T("1 * 1")}, {"y", ty::bot()}});
  REQUIRE(fo->kind == ProcKind::Send);
  CHECK(alpha_eq(fo, P("x[z].(link y z : 1 | close x)")));

  ProcPtr hi = desugar(P("x((p)). close x"), {}, {{"x", T("assume{} @ 1")}});
  CHECK(alpha_eq(hi, P("x(y). y(proc p). close x")));

  ProcPtr call = desugar(parse_process("call K(l=x)"), {}, {{"K", T("?assume{l:bot}")}, {"x", ty::one()}});
  CHECK(alpha_eq(call, P("?K[y]. y(proc p). run p(l=x)")));
  CHECK(is_core(call));
}

TEST_CASE("typing judgements") {
  CHECK(typecheck({}, pr::close("x"), {{"x", ty::one()}}).rule == Rule::One);
  CHECK(typecheck({{"p", ctx1("l", ty::one())}}, P("run p(l=x)"), {{"x", ty::one()}}).rule == Rule::Id);
  Derivation d = typecheck({}, P("x[proc(l=a) => close a]"), {{"x", T("provide{l:1}")}});
  CHECK(d.rule == Rule::Provide);
  REQUIRE(d.premises.size() == 1);
  CHECK(d.premises[0].rule == Rule::One);
  CHECK(kind_of([] { typecheck({}, pr::close("x"), {{"x", ty::bot()}}); }) == ErrorKind::TypeMismatch);
  CHECK(kind_of([] { typecheck({}, P("x(proc p). wait x. run p()"), {{"x", T("assume{} @ bot")}}); }) ==
        ErrorKind::TypeMismatch);
  CHECK(kind_of([] { typecheck({}, P("x[proc(l=a) => wait z. close a]"), {{"x", T("provide{l:1}")}, {"z", ty::bot()}}); }) ==
        ErrorKind::ContextNotEmpty);
  CHECK(kind_of([] { typecheck({}, P("wait x. close z"), {{"x", ty::bot()}, {"z", ty::one()}, {"w", ty::one()}}); }) ==
        ErrorKind::LinearityViolation);
  CHECK(kind_of([] { typecheck({}, P("!x(y). close z"), {{"x", T("!bot")}, {"z", ty::one()}}); }) ==
        ErrorKind::NonExponentialServerContext);
}

TEST_CASE("atomic axiom mode") {
  CheckOptions atomic;
  atomic.atomic_axioms = true;
  CHECK_NOTHROW(typecheck({}, P("link x y : X"), {{"x", T("~X")}, {"y", T("X")}}, atomic));
  CHECK(kind_of([&] { typecheck({}, P("link x y : 1"), {{"x", T("bot")}, {"y", T("1")}}, atomic); }) ==
        ErrorKind::TypeMismatch);
  CHECK_NOTHROW(typecheck({}, P("link x y : 1"), {{"x", T("bot")}, {"y", T("1")}}));
}

TEST_CASE("coherence") {
  ChannelCtx pa = check_coherence(gl::provide_assume("x", "y", ctx1("l", ty::one())));
  CHECK(ctx_eq(pa, ChannelCtx{{"x", T("provide{l:1}")}, {"y", T("assume{l:1}")}}));
  CHECK(ctx_eq(check_coherence(gl::close_wait({"x1", "x2"}, "y")),
               ChannelCtx{{"x1", ty::one()}, {"x2", ty::one()}, {"y", ty::bot()}}));
  CHECK(ctx_eq(check_coherence(gl::axiom("x", T("1 * X"), "y")), ChannelCtx{{"x", T("1 * X")}, {"y", T("bot @ ~X")}}));
  CHECK(kind_of([] { check_coherence(gl::close_wait({"x", "x"}, "y")); }) == ErrorKind::IncoherentGlobalType);
}

TEST_CASE("coherence cut typing") {
  Derivation d = typecheck({}, P("mnew closewait(x1, x2; y) { x1:1 -> close x1 | x2:1 -> close x2 | y:bot -> wait y. close z }"),
                           {{"z", ty::one()}});
  CHECK(d.rule == Rule::CCut);
  Derivation h = typecheck(
      {}, P("mnew provideassume(x; y : {l:1}) { x:provide{l:1} -> x[proc(l=a) => close a] | y:assume{l:1} -> y(proc p). run p(l=w) }"),
      {{"w", ty::one()}});
  CHECK(h.rule == Rule::CCut);
  CHECK(kind_of([] {
          typecheck({}, P("mnew closewait(x1, x2; y) { x1:1 -> close x1 | y:bot -> wait y. close z }"), {{"z", ty::one()}});
        }) == ErrorKind::IncoherentGlobalType);
}

TEST_CASE("single steps") {
  ChannelCtx z1{{"z", ty::one()}};
  auto s = step_checked({}, P("new x:1 y { close x | wait y. close z }"), z1);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, P("close z")));
  CHECK(s->tag.family == StepFamily::Principal);
  CHECK(s->tag.rule == "1⊥");

  s = step_checked({}, P("new x:provide{l:1} y { x[proc(l=a) => close a] | y(proc p). run p(l=z) }"), z1);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, P("let p = proc(l=a : 1) => close a in run p(l=z)")));
  CHECK(s->tag.rule == "⌈⌉⌊⌋");

  s = step_checked({}, P("let p = proc(l=z : 1) => close z in run p(l=z)"), z1);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, P("close z")));
  CHECK(s->tag.rule == "chop-invoke");

  ChannelCtx xw{{"x", T("bot @ 1")}};
  s = step_checked({}, P("let r = proc(w=w : 1) => close w in x(y). wait y. run r(w=x)"), xw);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, P("x(y). let r = proc(w=w : 1) => close w in wait y. run r(w=x)")));
  CHECK(s->tag.family == StepFamily::Commute);
  CHECK(s->tag.rule == "chop-commute-⅋");

  CHECK(kind_of([] { step_checked({}, P("close x"), {{"x", ty::bot()}}); }) == ErrorKind::NotWellFormed);
}

TEST_CASE("runs") {
  Trace t = run({}, P("new x:1 y { close x | wait y. close z }"), {{"z", ty::one()}}, {10});
  CHECK(t.status == RunStatus::NormalForm);
  CHECK(t.steps.size() == 1);
  CHECK(alpha_eq(t.final_term(), P("close z")));
  CHECK(kind_of([] { run({{"p", ctx1("l", ty::one())}}, P("run p(l=x)"), {{"x", ty::one()}}, {10}); }) ==
        ErrorKind::NotWellFormed);
  Trace nf = run({}, P("close z"), {{"z", ty::one()}});
  CHECK(nf.steps.empty());
}

TEST_CASE("chop elimination") {
  CHECK(alpha_eq(eliminate_chops(P("let p = proc(l=a : 1) => close a in run p(l=z)")), P("close z")));
  CHECK(alpha_eq(eliminate_chops(P("let p = proc(l=a : 1) => close a in x.case(run p(l=z), run p(l=z))")),
                 P("x.case(close z, close z)")));
  ProcPtr free = P("new x:1 y { close x | wait y. close z }");
  CHECK(alpha_eq(eliminate_chops(free), free));
}

TEST_CASE("type translation") {
  CHECK(same(translate_type(ty::one()), "1"));
  CHECK(same(translate_params(ctx1("l", ty::one())), "bot * 1"));
  CHECK(same(translate_type(T("provide{l:1}")), "(1 @ bot) * 1"));
  CHECK(same(translate_type(T("assume{l:1}")), "(bot * 1) @ bot"));
  CHECK(type_eq(dual(translate_type(T("provide{l:1}"))), translate_type(T("assume{l:1}"))));
  CHECK(translate_env({}).empty());
  CHECK(ctx_eq(translate_env({{"p", ctx1("l", ty::one())}}), ChannelCtx{{"x^p", T("bot * 1")}}));
  CHECK(ctx_eq(translate_env({{"p", ParamCtx{}}, {"q", ctx1("m", ty::bot())}}),
               ChannelCtx{{"x^p", T("1")}, {"x^q", T("1 * 1")}}));
}

TEST_CASE("process translation") {
  CheckOptions cp;
  cp.cp_mode = true;
  ProcEnv th{{"p", ctx1("l", ty::one())}};
  ChannelCtx z1{{"z", ty::one()}};
  ProcPtr id = translate_proc(typecheck(th, P("run p(l=z)"), z1));
  CHECK(alpha_eq(id, CP("x^p[c].(link z c : bot | close x^p)")));
  CHECK_NOTHROW(typecheck({}, id, {{"x^p", T("bot * 1")}, {"z", ty::one()}}, cp));

  ProcPtr prov = translate_proc(typecheck({}, P("x[proc(l=a) => close a]"), {{"x", T("provide{l:1}")}}));
  CHECK(alpha_eq(prov, P("x[y].(y(a). wait y. close a | close x)")));

  ProcPtr chop = translate_proc(typecheck({}, P("let p = proc(l=a : 1) => close a in run p(l=z)"), z1));
  CHECK(alpha_eq(chop, CP("new x^p:bot * 1 y^p { x^p[c].(link z c : bot | close x^p) | y^p(a). wait y^p. close a }")));
  CHECK_NOTHROW(typecheck({}, chop, z1, cp));
}

TEST_CASE("translation judgements") {
  Program closed = desugar(parse_program("proc Main () (z:1) = let p = proc(l=a : 1) => close a in run p(l=z)"));
  auto r = check_translation(closed);
  REQUIRE(r.size() == 1);
  CHECK(r[0].ok);
  for (auto& [x, a] : r[0].gamma) CHECK(x.find('^') == std::string::npos);

  Program open = desugar(parse_program("proc F (p:{l:1}) (z:1) = run p(l=z)"));
  auto o = check_translation(open);
  REQUIRE(o.size() == 1);
  CHECK(o[0].ok);
  REQUIRE(o[0].gamma.count("x^p"));
  CHECK(same(o[0].gamma.at("x^p"), "bot * 1"));
}

TEST_CASE("correspondence") {
  ChannelCtx z1{{"z", ty::one()}};
  auto c = correspondence_check({}, P("new x:1 y { close x | wait y. close z }"), z1);
  REQUIRE(c.size() == 1);
  CHECK(c[0].found);
  CHECK(c[0].path_length >= 1);

  CorrespondenceOptions opts;
  opts.max_depth = 16;
  auto h = correspondence_check({}, P("new x:provide{l:1} y { x[proc(l=a) => close a] | y(proc p). run p(l=z) }"), z1, opts);
  REQUIRE(!h.empty());
  CHECK(h[0].rule == "⌈⌉⌊⌋");
  for (auto& e : h) CHECK(e.found);

  CHECK(correspondence_check({}, P("close z"), z1).empty());
}

TEST_CASE("multiparty steps") {
  ChannelCtx w1{{"w", ty::one()}};
  auto s = step_checked(
      {}, P("mnew provideassume(x; y : {l:1}) { x:provide{l:1} -> x[proc(l=a) => close a] | y:assume{l:1} -> y(proc p). run p(l=w) }"),
      w1);
  REQUIRE(s);
  CHECK(s->tag.rule == "ccut-⌈⌉⌊⌋");
  CHECK(alpha_eq(s->result, P("let p = proc(l=a : 1) => close a in run p(l=w)")));

  Trace t = run({}, P("mnew closewait(x1, x2; y) { x1:1 -> close x1 | x2:1 -> close x2 | y:bot -> wait y. close z }"),
                {{"z", ty::one()}});
  CHECK(t.status == RunStatus::NormalForm);
  CHECK(alpha_eq(t.final_term(), P("close z")));

  ChannelCtx gu{{"u", ty::bot()}, {"z", ty::one()}};
  auto c = step_checked({}, P("mnew closewait(x1; y) { x1:1 -> wait u. close x1 | y:bot -> wait y. close z }"), gu);
  REQUIRE(c);
  CHECK(c->tag.family == StepFamily::Commute);
  CHECK(c->tag.rule == "ccut-commute-⊥");
  CHECK(c->result->kind == ProcKind::Wait);
}
