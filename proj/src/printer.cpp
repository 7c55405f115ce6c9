#include "chop/surface.hpp"

namespace chop {

namespace {

// Levels: 0 additive, 1 multiplicative, 2 prefix and atoms.
void type_out(const TypePtr& a, int ctx, std::string& out) {
  auto binary = [&](const char* op, int level) {
    bool paren = ctx > level;
    if (paren) out += "(";
    type_out(a->left, level + 1, out);
    out += op;
    type_out(a->right, level, out);
    if (paren) out += ")";
  };
  switch (a->kind) {
  case TypeKind::Var: out += a->var; break;
  case TypeKind::DualVar: out += "~" + a->var; break;
  case TypeKind::Zero: out += "0"; break;
  case TypeKind::Top: out += "top"; break;
  case TypeKind::One: out += "1"; break;
  case TypeKind::Bot: out += "bot"; break;
  case TypeKind::Tensor: binary(" * ", 1); break;
  case TypeKind::Par: binary(" @ ", 1); break;
  case TypeKind::Plus: binary(" + ", 0); break;
  case TypeKind::With: binary(" & ", 0); break;
  case TypeKind::WhyNot: out += "?"; type_out(a->left, 2, out); break;
  case TypeKind::OfCourse: out += "!"; type_out(a->left, 2, out); break;
  case TypeKind::Exists: case TypeKind::Forall: {
    bool paren = ctx > 0;
    if (paren) out += "(";
    out += a->kind == TypeKind::Exists ? "ex " : "all ";
    out += a->var + ". ";
    type_out(a->left, 0, out);
    if (paren) out += ")";
    break;
  }
  case TypeKind::Provide: case TypeKind::Assume:
    out += a->kind == TypeKind::Provide ? "provide" : "assume";
    out += print(a->ctx);
    break;
  }
}

std::string rec(const ParamRecord& r) {
  std::string s = "(";
  bool first = true;
  for (auto& [l, x] : r) {
    if (!first) s += ", ";
    first = false;
    s += l + "=" + x;
  }
  return s + ")";
}

std::string typed_rec(const ParamRecord& r, const ParamCtx& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) s += ", ";
    s += r.entries()[i].first + "=" + r.entries()[i].second + " : ";
    TypePtr t = c.find(r.entries()[i].first);
    s += t ? print(t) : "?";
  }
  return s + ")";
}

std::string names(const std::vector<Name>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) s += (i ? ", " : "") + ns[i];
  return s;
}

void proc_out(const ProcPtr& p, std::string& out) {
  const Process& n = *p;
  auto k = [&](std::size_t i) { proc_out(n.kids[i], out); };
  switch (n.kind) {
  case ProcKind::Send:
    out += n.x + "[" + n.y + "].(";
    k(0); out += " | "; k(1); out += ")";
    break;
  case ProcKind::Recv: out += n.x + "(" + n.y + "). "; k(0); break;
  case ProcKind::SelL: out += n.x + "[inl]. "; k(0); break;
  case ProcKind::SelR: out += n.x + "[inr]. "; k(0); break;
  case ProcKind::Offer:
    out += n.x + ".case(";
    k(0); out += ", "; k(1); out += ")";
    break;
  case ProcKind::EmptyOffer: out += n.x + ".case()"; break;
  case ProcKind::Client: out += "?" + n.x + "[" + n.y + "]. "; k(0); break;
  case ProcKind::Server: out += "!" + n.x + "(" + n.y + "). "; k(0); break;
  case ProcKind::SendType: out += n.x + "[type " + print(n.type) + "]. "; k(0); break;
  case ProcKind::RecvType: out += n.x + "(type " + n.var + "). "; k(0); break;
  case ProcKind::SendProc:
    out += n.x + "[proc" + rec(n.record) + " => ";
    k(0); out += "]";
    break;
  case ProcKind::RecvProc: out += n.x + "(proc " + n.var + "). "; k(0); break;
  case ProcKind::Invoke: out += "run " + n.var + rec(n.record); break;
  case ProcKind::Close: out += "close " + n.x; break;
  case ProcKind::Wait: out += "wait " + n.x + ". "; k(0); break;
  case ProcKind::Link:
    out += "link " + n.x + " " + n.y;
    if (n.type) out += " : " + print(n.type);
    break;
  case ProcKind::Cut:
    out += "new " + n.x + ":" + print(n.type) + " " + n.y + " { ";
    k(0); out += " | "; k(1); out += " }";
    break;
  case ProcKind::ExplSubst:
    out += "let " + n.var + " = proc" + typed_rec(n.record, n.params) + " => ";
    k(1); out += " in "; k(0);
    break;
  case ProcKind::MCut:
    out += "mnew " + print(n.global) + " { ";
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
      if (i) out += " | ";
      out += n.endpoints[i].first + ":" + print(n.endpoints[i].second) + " -> ";
      k(i);
    }
    out += " }";
    break;
  case ProcKind::FreeSend: out += n.x + "[=" + n.y + "]. "; k(0); break;
  case ProcKind::SendProcCont:
    out += n.x + "[[proc" + rec(n.record) + " => ";
    k(0); out += "]]. "; k(1);
    break;
  case ProcKind::RecvProcCont: out += n.x + "((" + n.var + ")). "; k(0); break;
  case ProcKind::DefProc:
    out += "def " + n.x + typed_rec(n.record, n.params) + " = ";
    k(0); out += " in "; k(1);
    break;
  case ProcKind::CallProc: out += "call " + n.x + rec(n.record); break;
  case ProcKind::HOParam: out += n.x + "\\" + n.var + ". "; k(0); break;
  case ProcKind::HOApply:
    out += "(";
    k(0);
    out += ") <" + n.x + " = proc" + typed_rec(n.record, n.params) + " => ";
    k(1); out += ">";
    break;
  }
}

} // namespace

std::string print(const TypePtr& a) {
  if (!a) return "_";
  std::string out;
  type_out(a, 0, out);
  return out;
}

std::string print(const ParamCtx& c) {
  std::string s = "{";
  bool first = true;
  for (auto& [l, t] : c) {
    if (!first) s += ", ";
    first = false;
    s += l + ":" + print(t);
  }
  return s + "}";
}

std::string print(const ChannelCtx& c) {
  std::string s;
  bool first = true;
  for (auto& [x, t] : c) {
    if (!first) s += ", ";
    first = false;
    s += x + ":" + print(t);
  }
  return s;
}

std::string print(const GlobalPtr& g) {
  switch (g->kind) {
  case GlobalKind::OutIn:
    return "outin(" + names(g->many) + " ; " + g->one + ")(" + print(g->g) + ", " + print(g->h) + ")";
  case GlobalKind::CloseWait:
    return "closewait(" + names(g->many) + " ; " + g->one + ")";
  case GlobalKind::SelOffer:
    return "seloffer(" + g->one + " ; " + names(g->many) + ")(" + print(g->g) + ", " + print(g->h) + ")";
  case GlobalKind::EmptyChoice:
    return "emptychoice(" + g->one + " ; " + names(g->many) + ")";
  case GlobalKind::Bang:
    return "bang(" + g->one + " ; " + names(g->many) + ")(" + print(g->g) + ")";
  case GlobalKind::TypeComm:
    return "typecomm(" + g->tvar + " ; " + g->one + " ; " + names(g->many) + ")(" + print(g->g) + ")";
  case GlobalKind::Axiom:
    return "axiom(" + g->one + " ; " + g->many.at(0) + " : " + print(g->type) + ")";
  case GlobalKind::ProvideAssume:
    return "provideassume(" + g->one + " ; " + g->many.at(0) + " : " + print(g->params) + ")";
  }
  return "";
}

std::string print(const ProcPtr& p) {
  std::string out;
  proc_out(p, out);
  return out;
}

std::string print(const Program& prog) {
  std::string out;
  for (auto& [n, a] : prog.aliases) out += "type " + n + " = " + print(a) + "\n";
  for (auto& [n, g] : prog.globals) out += "gtype " + n + " = " + print(g) + "\n";
  if (!prog.aliases.empty() || !prog.globals.empty()) out += "\n";
  for (auto& d : prog.decls) {
    out += "proc " + d.name + " (";
    bool first = true;
    for (auto& [p, c] : d.theta) {
      if (!first) out += ", ";
      first = false;
      out += p + ":" + print(c);
    }
    out += ") (" + print(d.gamma) + ") =\n  " + print(d.body) + "\n\n";
  }
  if (prog.main) out += "main " + *prog.main + "\n";
  return out;
}

} // namespace chop
