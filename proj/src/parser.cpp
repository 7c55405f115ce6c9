#include "chop/surface.hpp"
#include "chop/typetheory.hpp"

#include <cctype>
#include <set>

namespace chop {

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

const std::set<std::string> kKeywords = {
    "close", "wait", "link", "new", "let", "def", "call", "run", "mnew", "proc", "in", "type",
    "case", "inl", "inr", "ex", "all", "top", "bot", "provide", "assume", "gtype", "main"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '^';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else ++col;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) { adv(1); continue; }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    SourcePos pos{line, col};
    if (ident_start(c) || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      adv(j - i);
      continue;
    }
    if (i + 1 < src.size()) {
      std::string two(src.substr(i, 2));
      if (two == "=>" || two == "->") {
        out.push_back({Tok::Sym, two, pos});
        adv(2);
        continue;
      }
    }
    static const std::string singles = "()[]{}.,:=|*@+&~?!<>\\;";
    if (singles.find(c) == std::string::npos)
      throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
    out.push_back({Tok::Sym, std::string(1, c), pos});
    adv(1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
public:
  Parser(std::string_view src, ParseOptions opts) : toks_(lex(src)), opts_(opts) {}

  Program program() {
    Program prog;
    while (!at_end()) {
      const Token& t = peek();
      if (is_kw("type")) {
        next();
        Name n = ident("type alias name");
        expect("=");
        TypePtr a = type0();
        aliases_[n] = a;
        prog.aliases.emplace_back(n, a);
      } else if (is_kw("gtype")) {
        next();
        Name n = ident("global type name");
        expect("=");
        GlobalPtr g = global();
        globals_[n] = g;
        prog.globals.emplace_back(n, g);
      } else if (is_kw("proc")) {
        next();
        Declaration d;
        d.pos = t.pos;
        d.name = ident("declaration name");
        if (prog.find(d.name))
          throw Error(ErrorKind::DuplicateDeclaration, "duplicate declaration '" + d.name + "'", t.pos);
        expect("(");
        if (!is_sym(")")) {
          do {
            SourcePos ep = peek().pos;
            Name p = ident("process variable");
            expect(":");
            ParamCtx c = param_ctx();
            if (!d.theta.emplace(p, c).second)
              throw SyntaxError("duplicate process variable '" + p + "'", ep);
          } while (accept(","));
        }
        expect(")");
        expect("(");
        if (!is_sym(")")) {
          do {
            SourcePos ep = peek().pos;
            Name x = ident("channel");
            expect(":");
            TypePtr a = type0();
            if (!d.gamma.emplace(x, a).second)
              throw SyntaxError("duplicate channel '" + x + "'", ep);
          } while (accept(","));
        }
        expect(")");
        expect("=");
        d.body = process();
        prog.decls.push_back(std::move(d));
      } else if (is_kw("main")) {
        next();
        prog.main = ident("declaration name");
      } else {
        fail("'type', 'gtype', 'proc' or 'main'");
      }
    }
    if (prog.main && !prog.find(*prog.main))
      throw Error(ErrorKind::UnknownName, "main declaration '" + *prog.main + "' not found");
    return prog;
  }

  ProcPtr whole_process() {
    ProcPtr p = process();
    if (!at_end()) fail("end of input");
    return p;
  }

  TypePtr whole_type() {
    TypePtr a = type0();
    if (!at_end()) fail("end of input");
    return a;
  }

  GlobalPtr whole_global() {
    GlobalPtr g = global();
    if (!at_end()) fail("end of input");
    return g;
  }

private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  ParseOptions opts_;
  std::map<Name, TypePtr> aliases_;
  std::map<Name, GlobalPtr> globals_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  bool accept(const char* s) {
    if (is_sym(s)) { next(); return true; }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + expected + ", found " + found, t.pos);
  }

  void expect(const char* s) {
    if (!accept(s)) fail(std::string("'") + s + "'");
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail(std::string("'") + s + "'");
    next();
  }

  Name ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text) ||
        std::isdigit(static_cast<unsigned char>(t.text[0])))
      fail(what);
    if (!opts_.allow_reserved && t.text.find('^') != std::string::npos)
      throw SyntaxError("identifier '" + t.text + "' uses the reserved character '^'", t.pos);
    next();
    return t.text;
  }

  Label label() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("label");
    next();
    return t.text;
  }

  // ---- types -------------------------------------------------------------

  TypePtr type0() {
    TypePtr a = type1();
    if (is_sym("+")) { next(); return ty::plus(a, type0()); }
    if (is_sym("&")) { next(); return ty::with(a, type0()); }
    return a;
  }

  TypePtr type1() {
    TypePtr a = type2();
    if (is_sym("*")) { next(); return ty::tensor(a, type1()); }
    if (is_sym("@")) { next(); return ty::par(a, type1()); }
    return a;
  }

  TypePtr type2() {
    if (accept("?")) return ty::why_not(type2());
    if (accept("!")) return ty::of_course(type2());
    if (accept("~")) return dual(type2());
    if (is_kw("ex") || is_kw("all")) {
      bool ex = is_kw("ex");
      next();
      Name x = ident("type variable");
      expect(".");
      TypePtr body = type0();
      return ex ? ty::exists(x, body) : ty::forall(x, body);
    }
    if (accept("(")) {
      TypePtr a = type0();
      expect(")");
      return a;
    }
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "0") { next(); return ty::zero(); }
      if (t.text == "1") { next(); return ty::one(); }
      if (t.text == "top") { next(); return ty::top(); }
      if (t.text == "bot") { next(); return ty::bot(); }
      if (t.text == "provide") { next(); return ty::provide(param_ctx()); }
      if (t.text == "assume") { next(); return ty::assume(param_ctx()); }
      Name n = ident("type");
      auto it = aliases_.find(n);
      if (it != aliases_.end()) return it->second;
      return ty::var(n);
    }
    fail("type");
  }

  ParamCtx param_ctx() {
    expect("{");
    std::vector<ParamCtx::Entry> es;
    std::set<Label> seen;
    if (!is_sym("}")) {
      do {
        SourcePos lp = peek().pos;
        Label l = label();
        if (!seen.insert(l).second) throw SyntaxError("duplicate label '" + l + "'", lp);
        expect(":");
        es.emplace_back(l, type0());
      } while (accept(","));
    }
    expect("}");
    return ParamCtx(std::move(es));
  }

  // ---- records -------------------------------------------------------------

  ParamRecord record() {
    expect("(");
    std::vector<ParamRecord::Entry> es;
    std::set<Label> seen;
    if (!is_sym(")")) {
      do {
        SourcePos lp = peek().pos;
        Label l = label();
        if (!seen.insert(l).second) throw SyntaxError("duplicate label '" + l + "'", lp);
        expect("=");
        es.emplace_back(l, ident("channel"));
      } while (accept(","));
    }
    expect(")");
    try {
      return ParamRecord(std::move(es));
    } catch (const Error& e) {
      throw SyntaxError(e.message(), peek().pos);
    }
  }

  std::pair<ParamRecord, ParamCtx> typed_record() {
    expect("(");
    std::vector<ParamRecord::Entry> rs;
    std::vector<ParamCtx::Entry> cs;
    std::set<Label> seen;
    if (!is_sym(")")) {
      do {
        SourcePos lp = peek().pos;
        Label l = label();
        if (!seen.insert(l).second) throw SyntaxError("duplicate label '" + l + "'", lp);
        expect("=");
        rs.emplace_back(l, ident("channel"));
        expect(":");
        cs.emplace_back(l, type0());
      } while (accept(","));
    }
    expect(")");
    try {
      return {ParamRecord(std::move(rs)), ParamCtx(std::move(cs))};
    } catch (const Error& e) {
      throw SyntaxError(e.message(), peek().pos);
    }
  }

  // ---- global types ----------------------------------------------------------

  std::vector<Name> name_list() {
    std::vector<Name> out;
    do out.push_back(ident("endpoint")); while (accept(","));
    return out;
  }

  GlobalPtr global() {
    SourcePos pos = peek().pos;
    if (peek().kind != Tok::Ident) fail("global type");
    std::string head = peek().text;
    if (!is_sym("(", 1)) {
      Name n = ident("global type");
      auto it = globals_.find(n);
      if (it == globals_.end()) throw SyntaxError("unknown global type '" + n + "'", pos);
      return it->second;
    }
    next();
    expect("(");
    GlobalPtr g;
    if (head == "outin" || head == "closewait") {
      auto xs = name_list();
      expect(";");
      Name y = ident("endpoint");
      expect(")");
      if (head == "closewait") return gl::close_wait(xs, y);
      expect("(");
      GlobalPtr a = global();
      expect(",");
      GlobalPtr b = global();
      expect(")");
      return gl::out_in(xs, y, a, b);
    }
    if (head == "seloffer" || head == "emptychoice" || head == "bang") {
      Name x = ident("endpoint");
      expect(";");
      auto ys = name_list();
      expect(")");
      if (head == "emptychoice") return gl::empty_choice(x, ys);
      expect("(");
      GlobalPtr a = global();
      if (head == "bang") {
        expect(")");
        return gl::bang(x, ys, a);
      }
      expect(",");
      GlobalPtr b = global();
      expect(")");
      return gl::sel_offer(x, ys, a, b);
    }
    if (head == "typecomm") {
      Name tv = ident("type variable");
      expect(";");
      Name x = ident("endpoint");
      expect(";");
      auto ys = name_list();
      expect(")");
      expect("(");
      GlobalPtr a = global();
      expect(")");
      return gl::type_comm(tv, x, ys, a);
    }
    if (head == "axiom") {
      Name x = ident("endpoint");
      expect(";");
      Name y = ident("endpoint");
      expect(":");
      TypePtr a = type0();
      expect(")");
      return gl::axiom(x, a, y);
    }
    if (head == "provideassume") {
      Name x = ident("endpoint");
      expect(";");
      Name y = ident("endpoint");
      expect(":");
      ParamCtx d = param_ctx();
      expect(")");
      return gl::provide_assume(x, y, d);
    }
    throw SyntaxError("unknown global type constructor '" + head + "'", pos);
  }

  // ---- processes -------------------------------------------------------------

  ProcPtr process() {
    SourcePos pos = peek().pos;
    return pr::at_pos(process_inner(), pos);
  }

  ProcPtr process_inner() {
    using namespace pr;
    if (is_kw("close")) { next(); return close(ident("channel")); }
    if (is_kw("wait")) {
      next();
      Name x = ident("channel");
      expect(".");
      return wait(x, process());
    }
    if (is_kw("link")) {
      next();
      Name x = ident("channel");
      Name y = ident("channel");
      TypePtr a;
      if (accept(":")) a = type0();
      return link(x, y, a);
    }
    if (is_kw("new")) {
      next();
      Name x = ident("channel");
      expect(":");
      TypePtr a = type0();
      Name y = ident("channel");
      expect("{");
      ProcPtr p = process();
      expect("|");
      ProcPtr q = process();
      expect("}");
      return cut(x, a, y, p, q);
    }
    if (is_kw("let")) {
      next();
      Name p = ident("process variable");
      expect("=");
      expect_kw("proc");
      auto [rho, d] = typed_record();
      expect("=>");
      ProcPtr body = process();
      expect_kw("in");
      ProcPtr cont = process();
      return expl_subst(cont, p, rho, body, d);
    }
    if (is_kw("def")) {
      next();
      Name k = ident("procedure name");
      auto [rho, d] = typed_record();
      expect("=");
      ProcPtr body = process();
      expect_kw("in");
      ProcPtr cont = process();
      return def_proc(k, rho, d, body, cont);
    }
    if (is_kw("call")) {
      next();
      Name k = ident("procedure name");
      return call_proc(k, record());
    }
    if (is_kw("run")) {
      next();
      Name p = ident("process variable");
      return invoke(p, record());
    }
    if (is_kw("mnew")) {
      next();
      GlobalPtr g = global();
      expect("{");
      std::vector<std::pair<Name, TypePtr>> eps;
      std::vector<ProcPtr> kids;
      do {
        Name x = ident("endpoint");
        expect(":");
        TypePtr a = type0();
        expect("->");
        eps.emplace_back(x, a);
        kids.push_back(process());
      } while (accept("|"));
      expect("}");
      return mcut(g, eps, kids);
    }
    if (accept("?")) {
      Name x = ident("channel");
      expect("[");
      Name y = ident("channel");
      expect("]");
      expect(".");
      return client(x, y, process());
    }
    if (accept("!")) {
      Name x = ident("channel");
      expect("(");
      Name y = ident("channel");
      expect(")");
      expect(".");
      return server(x, y, process());
    }
    if (accept("(")) {
      ProcPtr p = process();
      expect(")");
      if (accept("<")) {
        Name x = ident("channel");
        expect("=");
        expect_kw("proc");
        auto [rho, d] = typed_record();
        expect("=>");
        ProcPtr q = process();
        expect(">");
        return ho_apply(p, x, rho, d, q);
      }
      return p;
    }
    if (peek().kind != Tok::Ident) fail("process");
    Name x = ident("process");
    if (accept("[")) {
      if (accept("=")) {
        Name y = ident("channel");
        expect("]");
        expect(".");
        return free_send(x, y, process());
      }
      if (accept("[")) {
        expect_kw("proc");
        ParamRecord rho = record();
        expect("=>");
        ProcPtr body = process();
        expect("]");
        expect("]");
        expect(".");
        return send_proc_cont(x, rho, body, process());
      }
      if (is_kw("inl") || is_kw("inr")) {
        bool left = is_kw("inl");
        next();
        expect("]");
        expect(".");
        ProcPtr p = process();
        return left ? sel_l(x, p) : sel_r(x, p);
      }
      if (is_kw("type")) {
        next();
        TypePtr a = type0();
        expect("]");
        expect(".");
        return send_type(x, a, process());
      }
      if (is_kw("proc")) {
        next();
        ParamRecord rho = record();
        expect("=>");
        ProcPtr body = process();
        expect("]");
        return send_proc(x, rho, body);
      }
      Name y = ident("channel");
      expect("]");
      expect(".");
      expect("(");
      ProcPtr p = process();
      expect("|");
      ProcPtr q = process();
      expect(")");
      return send(x, y, p, q);
    }
    if (accept("(")) {
      if (accept("(")) {
        Name p = ident("process variable");
        expect(")");
        expect(")");
        expect(".");
        return recv_proc_cont(x, p, process());
      }
      if (is_kw("type")) {
        next();
        Name tv = ident("type variable");
        expect(")");
        expect(".");
        return recv_type(x, tv, process());
      }
      if (is_kw("proc")) {
        next();
        Name p = ident("process variable");
        expect(")");
        expect(".");
        return recv_proc(x, p, process());
      }
      Name y = ident("channel");
      expect(")");
      expect(".");
      return recv(x, y, process());
    }
    if (accept(".")) {
      expect_kw("case");
      expect("(");
      if (accept(")")) return empty_offer(x);
      ProcPtr p = process();
      expect(",");
      ProcPtr q = process();
      expect(")");
      return offer(x, p, q);
    }
    if (accept("\\")) {
      Name p = ident("process variable");
      expect(".");
      return ho_param(x, p, process());
    }
    fail("'[', '(', '.' or '\\' after a channel name");
  }
};

} // namespace

const Declaration* Program::find(const Name& n) const {
  for (auto& d : decls)
    if (d.name == n) return &d;
  return nullptr;
}

const Declaration* Program::entry() const {
  if (main) return find(*main);
  return decls.empty() ? nullptr : &decls.back();
}

Program parse_program(std::string_view text, ParseOptions opts) { return Parser(text, opts).program(); }
ProcPtr parse_process(std::string_view text, ParseOptions opts) { return Parser(text, opts).whole_process(); }
TypePtr parse_type(std::string_view text) { return Parser(text, {}).whole_type(); }
GlobalPtr parse_global(std::string_view text) { return Parser(text, {}).whole_global(); }

} // namespace chop
