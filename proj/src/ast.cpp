#include "chop/ast.hpp"
#include "chop/typetheory.hpp"

#include <algorithm>
#include <cctype>

namespace chop {

// ---------------------------------------------------------------------------
// fresh names

Name NameSupply::fresh(const Name& base) {
  Name stem = base;
  auto us = stem.rfind('_');
  if (us != Name::npos && us + 1 < stem.size() && us > 0 &&
      std::all_of(stem.begin() + us + 1, stem.end(), [](unsigned char c) { return std::isdigit(c); }))
    stem = stem.substr(0, us);
  auto [it, inserted] = next_.try_emplace(stem, seed_ + 1);
  for (;; ++it->second) {
    Name cand = stem + "_" + std::to_string(it->second);
    if (!used_.count(cand)) {
      used_.insert(cand);
      ++it->second;
      return cand;
    }
  }
}

void NameSupply::reserve_all(const ProcPtr& p) { reserve(all_names(p)); }

// ---------------------------------------------------------------------------
// binding structure

namespace {

std::vector<Name> subject_channels(const Process& p) {
  switch (p.kind) {
  case ProcKind::Send: case ProcKind::Recv: case ProcKind::SelL: case ProcKind::SelR:
  case ProcKind::Offer: case ProcKind::EmptyOffer: case ProcKind::Client: case ProcKind::Server:
  case ProcKind::SendType: case ProcKind::RecvType: case ProcKind::SendProc: case ProcKind::RecvProc:
  case ProcKind::Close: case ProcKind::Wait: case ProcKind::SendProcCont: case ProcKind::RecvProcCont:
  case ProcKind::HOParam:
    return {p.x};
  case ProcKind::FreeSend:
  case ProcKind::Link:
    return {p.x, p.y};
  case ProcKind::Invoke:
    return p.record.image();
  case ProcKind::CallProc: {
    auto v = p.record.image();
    v.push_back(p.x);
    return v;
  }
  default:
    return {};
  }
}

void global_ftv(const GlobalPtr& g, NameSet& out) {
  if (!g) return;
  if (g->type)
    for (auto& v : free_type_vars(g->type)) out.insert(v);
  for (auto& v : free_type_vars(g->params)) out.insert(v);
  NameSet inner;
  global_ftv(g->g, inner);
  global_ftv(g->h, inner);
  if (g->kind == GlobalKind::TypeComm) inner.erase(g->tvar);
  out.insert(inner.begin(), inner.end());
}

void node_ftv(const Process& p, NameSet& out) {
  if (p.type)
    for (auto& v : free_type_vars(p.type)) out.insert(v);
  for (auto& v : free_type_vars(p.params)) out.insert(v);
  for (auto& [n, t] : p.endpoints)
    if (t)
      for (auto& v : free_type_vars(t)) out.insert(v);
  global_ftv(p.global, out);
}

void global_names(const GlobalPtr& g, NameSet& out) {
  if (!g) return;
  out.insert(g->one);
  out.insert(g->many.begin(), g->many.end());
  if (!g->tvar.empty()) out.insert(g->tvar);
  global_names(g->g, out);
  global_names(g->h, out);
}

void type_names(const TypePtr& a, NameSet& out) {
  if (!a) return;
  if (!a->var.empty()) out.insert(a->var);
  type_names(a->left, out);
  type_names(a->right, out);
  for (auto& [l, t] : a->ctx) type_names(t, out);
}

} // namespace

Scope kid_scope(const Process& p, std::size_t i) {
  Scope s;
  switch (p.kind) {
  case ProcKind::Send:
    if (i == 0) s.channels = {p.y};
    break;
  case ProcKind::Recv: case ProcKind::Client: case ProcKind::Server:
    s.channels = {p.y};
    break;
  case ProcKind::RecvType:
    s.typevars = {p.var};
    break;
  case ProcKind::SendProc:
    s.channels = p.record.image();
    break;
  case ProcKind::RecvProc: case ProcKind::RecvProcCont: case ProcKind::HOParam:
    s.procvars = {p.var};
    break;
  case ProcKind::Cut:
    s.channels = {i == 0 ? p.x : p.y};
    break;
  case ProcKind::ExplSubst:
    if (i == 0) s.procvars = {p.var};
    else s.channels = p.record.image();
    break;
  case ProcKind::MCut:
    s.channels = {p.endpoints.at(i).first};
    break;
  case ProcKind::SendProcCont:
    if (i == 0) s.channels = p.record.image();
    break;
  case ProcKind::DefProc:
    if (i == 0) s.channels = p.record.image();
    else s.channels = {p.x};
    break;
  case ProcKind::HOApply:
    if (i == 0) s.channels = {p.x};
    else s.channels = p.record.image();
    break;
  default:
    break;
  }
  return s;
}

NameSet free_channels(const ProcPtr& p) {
  auto subj = subject_channels(*p);
  NameSet out(subj.begin(), subj.end());
  for (std::size_t i = 0; i < p->kids.size(); ++i) {
    NameSet k = free_channels(p->kids[i]);
    for (auto& b : kid_scope(*p, i).channels) k.erase(b);
    out.insert(k.begin(), k.end());
  }
  return out;
}

bool channel_free_in(const Name& x, const ProcPtr& p) { return free_channels(p).count(x) > 0; }

NameSet free_proc_vars(const ProcPtr& p) {
  NameSet out;
  if (p->kind == ProcKind::Invoke) out.insert(p->var);
  for (std::size_t i = 0; i < p->kids.size(); ++i) {
    NameSet k = free_proc_vars(p->kids[i]);
    for (auto& b : kid_scope(*p, i).procvars) k.erase(b);
    out.insert(k.begin(), k.end());
  }
  return out;
}

NameSet free_type_vars(const TypePtr& a) {
  NameSet out;
  if (!a) return out;
  switch (a->kind) {
  case TypeKind::Var: case TypeKind::DualVar:
    out.insert(a->var);
    break;
  case TypeKind::Exists: case TypeKind::Forall:
    out = free_type_vars(a->left);
    out.erase(a->var);
    break;
  case TypeKind::Provide: case TypeKind::Assume:
    out = free_type_vars(a->ctx);
    break;
  default:
    for (auto& v : free_type_vars(a->left)) out.insert(v);
    for (auto& v : free_type_vars(a->right)) out.insert(v);
  }
  return out;
}

NameSet free_type_vars(const ParamCtx& c) {
  NameSet out;
  for (auto& [l, t] : c)
    for (auto& v : free_type_vars(t)) out.insert(v);
  return out;
}

NameSet free_type_vars(const ProcPtr& p) {
  NameSet out;
  node_ftv(*p, out);
  for (std::size_t i = 0; i < p->kids.size(); ++i) {
    NameSet k = free_type_vars(p->kids[i]);
    for (auto& b : kid_scope(*p, i).typevars) k.erase(b);
    out.insert(k.begin(), k.end());
  }
  return out;
}

NameSet all_names(const ProcPtr& p) {
  NameSet out;
  for (const Name* n : {&p->x, &p->y, &p->var})
    if (!n->empty()) out.insert(*n);
  for (auto& [l, n] : p->record) out.insert(n);
  for (auto& [n, t] : p->endpoints) {
    out.insert(n);
    type_names(t, out);
  }
  type_names(p->type, out);
  for (auto& [l, t] : p->params) type_names(t, out);
  global_names(p->global, out);
  for (auto& k : p->kids) {
    auto ks = all_names(k);
    out.insert(ks.begin(), ks.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// substitution

namespace {

Name lookup_or(const std::map<Name, Name>& m, const Name& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

TypePtr subst_types(TypePtr a, const std::map<Name, TypePtr>& m) {
  if (!a) return a;
  for (auto& [x, b] : m) a = subst_type_var(a, b, x);
  return a;
}

ParamCtx subst_types(const ParamCtx& c, const std::map<Name, TypePtr>& m) {
  if (m.empty()) return c;
  std::vector<ParamCtx::Entry> es;
  for (auto& [l, t] : c) es.emplace_back(l, subst_types(t, m));
  return ParamCtx(std::move(es));
}

GlobalPtr rename_global(const GlobalPtr& g, const std::map<Name, Name>& cm, const std::map<Name, TypePtr>& tm) {
  if (!g) return g;
  Global n = *g;
  n.one = lookup_or(cm, n.one);
  for (auto& x : n.many) x = lookup_or(cm, x);
  auto inner_tm = tm;
  if (n.kind == GlobalKind::TypeComm) inner_tm.erase(n.tvar);
  n.type = subst_types(n.type, tm);
  n.params = subst_types(n.params, tm);
  n.g = rename_global(n.g, cm, inner_tm);
  n.h = rename_global(n.h, cm, inner_tm);
  return std::make_shared<const Global>(std::move(n));
}

ParamRecord map_record(const ParamRecord& r, const std::map<Name, Name>& m) {
  std::vector<ParamRecord::Entry> es;
  for (auto& [l, n] : r) es.emplace_back(l, lookup_or(m, n));
  return ParamRecord(std::move(es));
}

enum class Space { Chan, PVar, TVar };

void rename_binder(Process& n, std::size_t i, Space sp, const Name& from, const Name& to) {
  if (sp == Space::PVar || sp == Space::TVar) {
    n.var = to;
    return;
  }
  switch (n.kind) {
  case ProcKind::Send: case ProcKind::Recv: case ProcKind::Client: case ProcKind::Server:
    n.y = to;
    break;
  case ProcKind::Cut:
    (i == 0 ? n.x : n.y) = to;
    break;
  case ProcKind::MCut:
    n.endpoints.at(i).first = to;
    n.global = rename_global(n.global, {{from, to}}, {});
    break;
  case ProcKind::DefProc:
    if (i == 1) n.x = to;
    else n.record = map_record(n.record, {{from, to}});
    break;
  case ProcKind::HOApply:
    if (i == 0) n.x = to;
    else n.record = map_record(n.record, {{from, to}});
    break;
  default: // record binders
    n.record = map_record(n.record, {{from, to}});
  }
}

ProcPtr subst_rec(const ProcPtr& p, const Subst& s, NameSupply& names) {
  if (s.empty()) return p;
  Process n = *p;
  // subject occurrences at this node
  switch (n.kind) {
  case ProcKind::Invoke:
    n.var = lookup_or(s.pvar, n.var);
    n.record = map_record(n.record, s.chan);
    break;
  case ProcKind::CallProc:
    n.x = lookup_or(s.chan, n.x);
    n.record = map_record(n.record, s.chan);
    break;
  case ProcKind::FreeSend: case ProcKind::Link:
    n.x = lookup_or(s.chan, n.x);
    n.y = lookup_or(s.chan, n.y);
    break;
  default:
    if (!subject_channels(*p).empty()) n.x = lookup_or(s.chan, n.x);
  }
  if (!s.tvar.empty()) {
    n.type = subst_types(n.type, s.tvar);
    n.params = subst_types(n.params, s.tvar);
    for (auto& [e, t] : n.endpoints) t = subst_types(t, s.tvar);
    n.global = rename_global(n.global, {}, s.tvar);
  }

  for (std::size_t i = 0; i < n.kids.size(); ++i) {
    const ProcPtr& kid = p->kids[i];
    Scope sc = kid_scope(*p, i);
    Subst si;
    NameSet fc = free_channels(kid);
    for (auto& [from, to] : s.chan)
      if (fc.count(from) && std::find(sc.channels.begin(), sc.channels.end(), from) == sc.channels.end())
        si.chan[from] = to;
    NameSet fp = free_proc_vars(kid);
    for (auto& [from, to] : s.pvar)
      if (fp.count(from) && std::find(sc.procvars.begin(), sc.procvars.end(), from) == sc.procvars.end())
        si.pvar[from] = to;
    if (!s.tvar.empty()) {
      NameSet ft = free_type_vars(kid);
      for (auto& [from, to] : s.tvar)
        if (ft.count(from) && std::find(sc.typevars.begin(), sc.typevars.end(), from) == sc.typevars.end())
          si.tvar[from] = to;
    }
    if (si.empty()) continue;

    // avoid capture by the binders of this child
    NameSet chan_range, pvar_range, tvar_range;
    for (auto& [f, t] : si.chan) chan_range.insert(t);
    for (auto& [f, t] : si.pvar) pvar_range.insert(t);
    for (auto& [f, t] : si.tvar)
      for (auto& v : free_type_vars(t)) tvar_range.insert(v);
    for (auto& b : sc.channels)
      if (chan_range.count(b)) {
        Name nb = names.fresh(b);
        rename_binder(n, i, Space::Chan, b, nb);
        si.chan[b] = nb;
      }
    for (auto& b : sc.procvars)
      if (pvar_range.count(b)) {
        Name nb = names.fresh(b);
        rename_binder(n, i, Space::PVar, b, nb);
        si.pvar[b] = nb;
      }
    for (auto& b : sc.typevars)
      if (tvar_range.count(b)) {
        Name nb = names.fresh(b);
        rename_binder(n, i, Space::TVar, b, nb);
        si.tvar[b] = ty::var(nb);
      }
    n.kids[i] = subst_rec(kid, si, names);
  }
  return std::make_shared<const Process>(std::move(n));
}

} // namespace

ProcPtr substitute(const ProcPtr& p, const Subst& s, NameSupply& names) {
  names.reserve_all(p);
  for (auto& [f, t] : s.chan) names.reserve(t);
  for (auto& [f, t] : s.pvar) names.reserve(t);
  for (auto& [f, t] : s.tvar) names.reserve(free_type_vars(t));
  return subst_rec(p, s, names);
}

ProcPtr rename_channels(const ProcPtr& p, const std::map<Name, Name>& m) {
  NameSupply names;
  Subst s;
  for (auto& [f, t] : m)
    if (f != t) s.chan[f] = t;
  return substitute(p, s, names);
}

ProcPtr rename_channel(const ProcPtr& p, const Name& w, const Name& y) {
  return rename_channels(p, {{y, w}});
}

ProcPtr rename_proc_var(const ProcPtr& p, const Name& to, const Name& from) {
  NameSupply names;
  Subst s;
  if (to != from) s.pvar[from] = to;
  return substitute(p, s, names);
}

std::map<Name, Name> compose_records(const ParamRecord& rho, const ParamRecord& rho_prime) {
  if (rho.preimage() != rho_prime.preimage())
    throw Error(ErrorKind::LabelMismatch, "records have different labels");
  std::map<Name, Name> m;
  for (std::size_t i = 0; i < rho.size(); ++i)
    m[rho_prime.entries()[i].second] = rho.entries()[i].second;
  return m;
}

// ---------------------------------------------------------------------------
// canonical keys (de Bruijn indices per namespace)

namespace {

struct Env {
  std::vector<Name> ch, pv, tv;
};

std::string idx(const std::vector<Name>& stack, const Name& n) {
  for (std::size_t i = stack.size(); i-- > 0;)
    if (stack[i] == n) return "#" + std::to_string(stack.size() - 1 - i);
  return "$" + n;
}

void type_key(const TypePtr& a, std::vector<Name>& tv, std::string& out) {
  if (!a) {
    out += "?";
    return;
  }
  switch (a->kind) {
  case TypeKind::Var: out += "V" + idx(tv, a->var); break;
  case TypeKind::DualVar: out += "D" + idx(tv, a->var); break;
  case TypeKind::Zero: out += "0"; break;
  case TypeKind::Top: out += "T"; break;
  case TypeKind::One: out += "1"; break;
  case TypeKind::Bot: out += "B"; break;
  case TypeKind::WhyNot: out += "?("; type_key(a->left, tv, out); out += ")"; break;
  case TypeKind::OfCourse: out += "!("; type_key(a->left, tv, out); out += ")"; break;
  case TypeKind::Exists: case TypeKind::Forall:
    out += a->kind == TypeKind::Exists ? "E(" : "A(";
    tv.push_back(a->var);
    type_key(a->left, tv, out);
    tv.pop_back();
    out += ")";
    break;
  case TypeKind::Provide: case TypeKind::Assume:
    out += a->kind == TypeKind::Provide ? "P{" : "Q{";
    for (auto& [l, t] : a->ctx) {
      out += l + ":";
      type_key(t, tv, out);
      out += ",";
    }
    out += "}";
    break;
  default: {
    static const char* ops[] = {"*", "@", "+", "&"};
    int op = a->kind == TypeKind::Tensor ? 0 : a->kind == TypeKind::Par ? 1 : a->kind == TypeKind::Plus ? 2 : 3;
    out += "(";
    type_key(a->left, tv, out);
    out += ops[op];
    type_key(a->right, tv, out);
    out += ")";
  }
  }
}

std::string tkey(const TypePtr& a, Env& env) {
  std::string s;
  type_key(a, env.tv, s);
  return s;
}

std::string ctx_key(const ParamCtx& c, Env& env) {
  std::string s = "{";
  for (auto& [l, t] : c) s += l + ":" + tkey(t, env) + ",";
  return s + "}";
}

std::string global_key(const GlobalPtr& g, Env& env) {
  if (!g) return "";
  std::string s = "G" + std::to_string(static_cast<int>(g->kind)) + "<" + idx(env.ch, g->one);
  for (auto& m : g->many) s += "," + idx(env.ch, m);
  s += ">";
  if (g->type) s += tkey(g->type, env);
  s += ctx_key(g->params, env);
  bool binds = g->kind == GlobalKind::TypeComm;
  if (binds) env.tv.push_back(g->tvar);
  s += "(" + global_key(g->g, env) + ";" + global_key(g->h, env) + ")";
  if (binds) env.tv.pop_back();
  return s;
}

std::string key_rec(const ProcPtr& p, Env& env, bool sym);

std::string kid_key(const ProcPtr& p, std::size_t i, Env& env, bool sym) {
  Scope sc = kid_scope(*p, i);
  for (auto& b : sc.channels) env.ch.push_back(b);
  for (auto& b : sc.procvars) env.pv.push_back(b);
  for (auto& b : sc.typevars) env.tv.push_back(b);
  std::string s = key_rec(p->kids[i], env, sym);
  env.ch.resize(env.ch.size() - sc.channels.size());
  env.pv.resize(env.pv.size() - sc.procvars.size());
  env.tv.resize(env.tv.size() - sc.typevars.size());
  return s;
}

std::string key_rec(const ProcPtr& p, Env& env, bool sym) {
  const Process& n = *p;
  auto c = [&](const Name& x) { return idx(env.ch, x); };

  if (sym && n.kind == ProcKind::Cut) {
    std::string a = tkey(n.type, env) + kid_key(p, 0, env, sym);
    std::string b = tkey(n.type ? dual(n.type) : nullptr, env) + kid_key(p, 1, env, sym);
    if (b < a) std::swap(a, b);
    return "new[" + a + "|" + b + "]";
  }
  if (sym && n.kind == ProcKind::Link) {
    std::string a = c(n.x) + "," + c(n.y) + ":" + tkey(n.type, env);
    std::string b = c(n.y) + "," + c(n.x) + ":" + tkey(n.type ? dual(n.type) : nullptr, env);
    return "link(" + std::min(a, b) + ")";
  }

  std::string s = "K" + std::to_string(static_cast<int>(n.kind));
  switch (n.kind) {
  case ProcKind::Invoke:
    s += "<" + idx(env.pv, n.var) + ">";
    for (auto& [l, x] : n.record) s += l + "=" + c(x) + ",";
    return s;
  case ProcKind::CallProc:
    s += "<" + c(n.x) + ">";
    for (auto& [l, x] : n.record) s += l + "=" + c(x) + ",";
    return s;
  case ProcKind::Link: case ProcKind::FreeSend:
    s += "<" + c(n.x) + "," + c(n.y) + ">";
    break;
  case ProcKind::Cut: case ProcKind::ExplSubst: case ProcKind::MCut:
  case ProcKind::DefProc: case ProcKind::HOApply:
    break;
  default:
    s += "<" + c(n.x) + ">";
  }
  if (n.type) s += "T" + tkey(n.type, env);
  if (!n.record.empty() || n.kind == ProcKind::SendProc || n.kind == ProcKind::ExplSubst) {
    s += "R";
    for (auto& [l, x] : n.record) s += l + ",";
  }
  if (!n.params.empty()) s += "C" + ctx_key(n.params, env);
  if (n.kind == ProcKind::MCut) {
    for (auto& [e, t] : n.endpoints) {
      env.ch.push_back(e);
      s += "E" + tkey(t, env);
    }
    s += global_key(n.global, env);
    env.ch.resize(env.ch.size() - n.endpoints.size());
  }
  s += "(";
  for (std::size_t i = 0; i < n.kids.size(); ++i) {
    if (i) s += "|";
    s += kid_key(p, i, env, sym);
  }
  return s + ")";
}

} // namespace

std::string canonical_key(const ProcPtr& p, bool modulo_symmetry) {
  Env env;
  return key_rec(p, env, modulo_symmetry);
}

std::string canonical_key(const TypePtr& a) {
  Env env;
  return tkey(a, env);
}

bool alpha_eq(const ProcPtr& p, const ProcPtr& q) { return canonical_key(p) == canonical_key(q); }

bool type_eq(const TypePtr& a, const TypePtr& b) { return canonical_key(a) == canonical_key(b); }

bool ctx_eq(const ParamCtx& a, const ParamCtx& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.entries()[i].first != b.entries()[i].first ||
        !type_eq(a.entries()[i].second, b.entries()[i].second))
      return false;
  return true;
}

bool ctx_eq(const ChannelCtx& a, const ChannelCtx& b) {
  if (a.size() != b.size()) return false;
  for (auto& [x, t] : a) {
    auto it = b.find(x);
    if (it == b.end() || !type_eq(t, it->second)) return false;
  }
  return true;
}

std::vector<Name> channel_uses(const Process& p) { return subject_channels(p); }

GlobalPtr rename_global_names(const GlobalPtr& g, const std::map<Name, Name>& chans,
                              const std::map<Name, TypePtr>& types) {
  return rename_global(g, chans, types);
}

} // namespace chop
