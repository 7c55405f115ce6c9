#include "chop/semantics.hpp"
#include "chop/surface.hpp"
#include "chop/typetheory.hpp"

#include <algorithm>

namespace chop {

const char* family_name(StepFamily f) {
  switch (f) {
  case StepFamily::Principal: return "Principal";
  case StepFamily::Eta: return "Eta";
  case StepFamily::Commute: return "Commute";
  case StepFamily::StructEquiv: return "StructEquiv";
  }
  return "?";
}

const char* status_name(RunStatus s) {
  switch (s) {
  case RunStatus::NormalForm: return "NormalForm";
  case RunStatus::FuelExhausted: return "FuelExhausted";
  case RunStatus::Stuck: return "Stuck";
  }
  return "?";
}

namespace {

ProcPtr mk(Process n) { return std::make_shared<const Process>(std::move(n)); }

std::string prefix_name(ProcKind k) {
  switch (k) {
  case ProcKind::Send: return "⊗";
  case ProcKind::Recv: return "⅋";
  case ProcKind::SelL: case ProcKind::SelR: return "⊕";
  case ProcKind::Offer: return "&";
  case ProcKind::EmptyOffer: return "⊤";
  case ProcKind::Client: return "?";
  case ProcKind::Server: return "!";
  case ProcKind::SendType: return "∃";
  case ProcKind::RecvType: return "∀";
  case ProcKind::Wait: return "⊥";
  case ProcKind::SendProc: return "⌈⌉";
  case ProcKind::RecvProc: return "⌊⌋";
  case ProcKind::Cut: return "cut";
  case ProcKind::MCut: return "ccut";
  default: return "?";
  }
}

std::string type_name(TypeKind k) {
  switch (k) {
  case TypeKind::Tensor: return "⊗";
  case TypeKind::Par: return "⅋";
  case TypeKind::Plus: return "⊕";
  case TypeKind::With: return "&";
  case TypeKind::Zero: return "0";
  case TypeKind::Top: return "⊤";
  case TypeKind::One: return "1";
  case TypeKind::Bot: return "⊥";
  case TypeKind::WhyNot: return "?";
  case TypeKind::OfCourse: return "!";
  case TypeKind::Exists: return "∃";
  case TypeKind::Forall: return "∀";
  case TypeKind::Provide: return "⌈⌉";
  case TypeKind::Assume: return "⌊⌋";
  default: return "X";
  }
}

bool is_unary_prefix(ProcKind k) {
  switch (k) {
  case ProcKind::Recv: case ProcKind::SelL: case ProcKind::SelR: case ProcKind::Client: case ProcKind::Server:
  case ProcKind::SendType: case ProcKind::RecvType: case ProcKind::Wait: case ProcKind::RecvProc:
    return true;
  default:
    return false;
  }
}

NameSet unite(NameSet a, const NameSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

// Channel free in kid i of a node, not counting the node's own binders.
bool free_in_kid(const Process& n, std::size_t i, const Name& z) {
  for (auto& b : kid_scope(n, i).channels)
    if (b == z) return false;
  return channel_free_in(z, n.kids[i]);
}

bool pv_free_in_kid(const Process& n, std::size_t i, const Name& r) {
  for (auto& b : kid_scope(n, i).procvars)
    if (b == r) return false;
  return free_proc_vars(n.kids[i]).count(r) > 0;
}

TypePtr lookup(const ChannelCtx& g, const Name& x) {
  auto it = g.find(x);
  return it == g.end() ? nullptr : it->second;
}

// Types of the channels free in kid i, as far as they can be read off.
ChannelCtx kid_gamma(const Process& n, std::size_t i, ChannelCtx g) {
  TypePtr t = lookup(g, n.x);
  auto kind_is = [&](TypeKind k) { return t && t->kind == k; };
  switch (n.kind) {
  case ProcKind::Cut:
    if (i == 0) g[n.x] = n.type;
    else g[n.y] = dual(n.type);
    break;
  case ProcKind::MCut:
    g[n.endpoints[i].first] = n.endpoints[i].second;
    break;
  case ProcKind::Send:
    if (kind_is(TypeKind::Tensor)) {
      if (i == 0) g[n.y] = t->left;
      else g[n.x] = t->right;
    }
    break;
  case ProcKind::Recv:
    if (kind_is(TypeKind::Par)) {
      g[n.y] = t->left;
      g[n.x] = t->right;
    }
    break;
  case ProcKind::SelL: if (kind_is(TypeKind::Plus)) g[n.x] = t->left; break;
  case ProcKind::SelR: if (kind_is(TypeKind::Plus)) g[n.x] = t->right; break;
  case ProcKind::Offer: if (kind_is(TypeKind::With)) g[n.x] = i == 0 ? t->left : t->right; break;
  case ProcKind::Client: if (kind_is(TypeKind::WhyNot)) g[n.y] = t->left; break;
  case ProcKind::Server: if (kind_is(TypeKind::OfCourse)) { g[n.y] = t->left; g.erase(n.x); } break;
  case ProcKind::SendType: if (kind_is(TypeKind::Exists)) g[n.x] = subst_type_var(t->left, n.type, t->var); break;
  case ProcKind::RecvType:
    if (kind_is(TypeKind::Forall)) g[n.x] = subst_type_var(t->left, ty::var(n.var), t->var);
    break;
  case ProcKind::Wait: g.erase(n.x); break;
  case ProcKind::RecvProc: g.erase(n.x); break;
  default: break;
  }
  return g;
}

struct Oriented {
  Name z;
  TypePtr a;
  Name w;
  ProcPtr l, r;
  bool swapped;

  // A cut with the same orientation as the original.
  ProcPtr cut(const ProcPtr& left, const ProcPtr& right) const {
    return swapped ? pr::cut(w, dual(a), z, right, left) : pr::cut(z, a, w, left, right);
  }
};

Oriented orient(const Process& c, bool swap) {
  if (swap) return {c.y, dual(c.type), c.x, c.kids[1], c.kids[0], true};
  return {c.x, c.type, c.y, c.kids[0], c.kids[1], false};
}

bool acts_on(const ProcPtr& p, ProcKind k, const Name& z) { return p->kind == k && p->x == z; }

Step principal(ProcPtr r, const std::string& rule) { return {std::move(r), {StepFamily::Principal, rule, {}}, priority::principal}; }
Step commute(ProcPtr r, const std::string& rule, int prio = priority::commute) {
  return {std::move(r), {StepFamily::Commute, rule, {}}, prio};
}

// Preorder walk over free uses of z. `visit` returns true to stop.
template <class F>
bool walk_uses(const ProcPtr& p, const Name& z, F&& visit) {
  for (auto& u : channel_uses(*p))
    if (u == z && visit(p)) return true;
  for (std::size_t i = 0; i < p->kids.size(); ++i) {
    auto sc = kid_scope(*p, i).channels;
    if (std::find(sc.begin(), sc.end(), z) != sc.end()) continue;
    if (walk_uses(p->kids[i], z, visit)) return true;
  }
  return false;
}

ProcPtr rename_first(const ProcPtr& p, const Name& z, const Name& z1, bool& done) {
  auto uses = channel_uses(*p);
  if (std::find(uses.begin(), uses.end(), z) != uses.end()) {
    Process n = *p;
    if (n.kind == ProcKind::Invoke) {
      std::vector<ParamRecord::Entry> es;
      for (auto [l, x] : n.record) es.emplace_back(l, x == z ? z1 : x);
      n.record = ParamRecord(std::move(es));
    } else if (n.kind == ProcKind::Link && n.x != z) {
      n.y = z1;
    } else {
      n.x = z1;
    }
    done = true;
    return mk(std::move(n));
  }
  for (std::size_t i = 0; i < p->kids.size() && !done; ++i) {
    auto sc = kid_scope(*p, i).channels;
    if (std::find(sc.begin(), sc.end(), z) != sc.end()) continue;
    ProcPtr k = rename_first(p->kids[i], z, z1, done);
    if (done) return pr::with_kid(p, i, k);
  }
  return p;
}

} // namespace

std::size_t count_uses(const ProcPtr& p, const Name& z) {
  std::size_t n = 0;
  walk_uses(p, z, [&](const ProcPtr&) {
    ++n;
    return false;
  });
  return n;
}

ProcPtr split_uses(const ProcPtr& p, const Name& z, const Name& z1, const Name& z2) {
  bool done = false;
  ProcPtr q = rename_first(p, z, z1, done);
  return rename_channel(q, z2, z);
}

ProcPtr Engine::freshen(const ProcPtr& p, const NameSet& bad_ch, const NameSet& bad_pv, const NameSet& bad_tv) {
  Process n = *p;
  switch (n.kind) {
  case ProcKind::Send: case ProcKind::Recv: case ProcKind::Client: case ProcKind::Server:
    if (bad_ch.count(n.y)) {
      Name y2 = names_.fresh(n.y);
      n.kids[0] = rename_channel(n.kids[0], y2, n.y);
      n.y = y2;
      return mk(std::move(n));
    }
    return p;
  case ProcKind::RecvType:
    if (bad_tv.count(n.var)) {
      Name v2 = names_.fresh(n.var);
      Subst s;
      s.tvar[n.var] = ty::var(v2);
      n.kids[0] = substitute(n.kids[0], s, names_);
      n.var = v2;
      return mk(std::move(n));
    }
    return p;
  case ProcKind::RecvProc:
    if (bad_pv.count(n.var)) {
      Name v2 = names_.fresh(n.var);
      n.kids[0] = rename_proc_var(n.kids[0], v2, n.var);
      n.var = v2;
      return mk(std::move(n));
    }
    return p;
  default:
    return p;
  }
}

std::vector<Step> Engine::cut_steps(const ProcPtr& p, const ChannelCtx& gamma) {
  std::vector<Step> out;
  const Process& c = *p;

  for (int s = 0; s < 2; ++s) {
    Oriented o = orient(c, s == 1);
    const Process& L = *o.l;
    const Process& R = *o.r;
    const TypePtr& a = o.a;

    if (acts_on(o.l, ProcKind::Send, o.z) && acts_on(o.r, ProcKind::Recv, o.w)) {
      ProcPtr body = R.kids[0];
      Name v = R.y;
      if (channel_free_in(v, L.kids[1]) || v == o.z || v == o.w) {
        Name v2 = names_.fresh(v);
        body = rename_channel(body, v2, v);
        v = v2;
      }
      ProcPtr inner = pr::cut(o.z, a->right, o.w, L.kids[1], body);
      out.push_back(principal(pr::cut(L.y, a->left, v, L.kids[0], inner), "⊗⅋"));
    }
    if ((acts_on(o.l, ProcKind::SelL, o.z) || acts_on(o.l, ProcKind::SelR, o.z)) &&
        acts_on(o.r, ProcKind::Offer, o.w)) {
      bool left = L.kind == ProcKind::SelL;
      out.push_back(principal(pr::cut(o.z, left ? a->left : a->right, o.w, L.kids[0], R.kids[left ? 0 : 1]),
                              left ? "⊕&-left" : "⊕&-right"));
    }
    if (acts_on(o.r, ProcKind::Server, o.w) && a->kind == TypeKind::WhyNot) {
      std::size_t uses = count_uses(o.l, o.z);
      if (uses == 0) {
        out.push_back(principal(o.l, "?!-weaken"));
      } else if (acts_on(o.l, ProcKind::Client, o.z) && !channel_free_in(o.z, L.kids[0])) {
        out.push_back(principal(pr::cut(L.y, a->left, R.y, L.kids[0], R.kids[0]), "?!-principal"));
      } else if (uses >= 2) {
        Name z1 = names_.fresh(o.z), z2 = names_.fresh(o.z);
        Name w1 = names_.fresh(o.w), w2 = names_.fresh(o.w);
        ProcPtr l2 = split_uses(o.l, o.z, z1, z2);
        ProcPtr inner = pr::cut(z2, a, w2, l2, rename_channel(o.r, w2, o.w));
        out.push_back(principal(pr::cut(z1, a, w1, inner, rename_channel(o.r, w1, o.w)), "?!-contract"));
      }
    }
    if (acts_on(o.l, ProcKind::SendType, o.z) && acts_on(o.r, ProcKind::RecvType, o.w)) {
      Subst sub;
      sub.tvar[R.var] = L.type;
      ProcPtr q = substitute(R.kids[0], sub, names_);
      out.push_back(principal(pr::cut(o.z, subst_type_var(a->left, L.type, a->var), o.w, L.kids[0], q), "∃∀"));
    }
    if (acts_on(o.l, ProcKind::Close, o.z) && acts_on(o.r, ProcKind::Wait, o.w))
      out.push_back(principal(R.kids[0], "1⊥"));
    if (acts_on(o.l, ProcKind::SendProc, o.z) && acts_on(o.r, ProcKind::RecvProc, o.w))
      out.push_back(principal(pr::expl_subst(R.kids[0], R.var, L.record, L.kids[0], a->ctx), "⌈⌉⌊⌋"));
    if (L.kind == ProcKind::Link && (L.x == o.z || L.y == o.z)) {
      Name other = L.x == o.z ? L.y : L.x;
      if (is_atomic(a) || general_axiom_)
        out.push_back(principal(rename_channel(o.r, other, o.w), "axiom"));
      if (!is_atomic(a)) {
        ProcPtr expanded = eta_expand_link(L.x, L.y, L.type, names_);
        out.push_back({o.cut(expanded, o.r), {StepFamily::Eta, "η-" + type_name(L.type->kind), {}}, priority::eta});
      }
    }
  }

  for (int s = 0; s < 2; ++s) {
    Oriented o = orient(c, s == 1);
    const Process& L0 = *o.l;
    bool own = false;
    for (auto& u : channel_uses(L0)) own = own || u == o.z;
    if (own) continue;
    if (!is_unary_prefix(L0.kind) && L0.kind != ProcKind::Send && L0.kind != ProcKind::Offer &&
        L0.kind != ProcKind::EmptyOffer)
      continue;
    std::string rule = "cut-commute-" + prefix_name(L0.kind);
    if (L0.kind == ProcKind::EmptyOffer) {
      out.push_back(commute(o.l, rule));
      continue;
    }
    if (L0.kind == ProcKind::Server) {
      // Only sound when the other side needs nothing but exponentials.
      bool ok = true;
      for (auto& f : free_channels(o.r)) {
        if (f == o.w) continue;
        TypePtr t = lookup(gamma, f);
        ok = ok && t && t->kind == TypeKind::WhyNot;
      }
      if (!ok) continue;
    }
    NameSet bad_ch = free_channels(o.r);
    bad_ch.insert(o.z);
    bad_ch.insert(o.w);
    NameSet bad_tv = unite(free_type_vars(o.r), free_type_vars(o.a));
    ProcPtr lf = freshen(o.l, bad_ch, free_proc_vars(o.r), bad_tv);
    const Process& L = *lf;
    if (L.kind == ProcKind::Offer) {
      out.push_back(commute(pr::offer(L.x, o.cut(L.kids[0], o.r), o.cut(L.kids[1], o.r)), rule));
    } else if (L.kind == ProcKind::Send) {
      std::size_t k = free_in_kid(L, 0, o.z) ? 0 : free_in_kid(L, 1, o.z) ? 1 : can_absorb(L.kids[0], true) ? 0 : 1;
      out.push_back(commute(pr::with_kid(lf, k, o.cut(L.kids[k], o.r)), rule));
    } else {
      out.push_back(commute(pr::with_kid(lf, 0, o.cut(L.kids[0], o.r)), rule));
    }
  }
  return out;
}

std::vector<Step> Engine::chop_steps(const ProcPtr& p) {
  std::vector<Step> out;
  const Process& e = *p;
  const ProcPtr& body = e.kids[1];
  auto chop = [&](const ProcPtr& cont) { return pr::expl_subst(cont, e.var, e.record, body, e.params); };
  const Process& P0 = *e.kids[0];
  std::string rule = "chop-commute-" + prefix_name(P0.kind);

  if (P0.kind == ProcKind::Invoke) {
    if (P0.var == e.var) {
      Subst s;
      s.chan = compose_records(P0.record, e.record);
      out.push_back(principal(substitute(body, s, names_), "chop-invoke"));
    }
    return out;
  }
  if (P0.kind == ProcKind::EmptyOffer) {
    out.push_back(commute(e.kids[0], rule, priority::chop_move));
    return out;
  }
  NameSet bad_pv = free_proc_vars(body);
  bad_pv.insert(e.var);
  NameSet bad_tv = unite(free_type_vars(body), free_type_vars(e.params));
  ProcPtr pf = freshen(e.kids[0], {}, bad_pv, bad_tv);
  const Process& P = *pf;
  switch (P.kind) {
  case ProcKind::Recv: case ProcKind::SelL: case ProcKind::SelR: case ProcKind::Client: case ProcKind::SendType:
  case ProcKind::RecvType: case ProcKind::Wait: case ProcKind::RecvProc: case ProcKind::SendProc:
    out.push_back(commute(pr::with_kid(pf, 0, chop(P.kids[0])), rule, priority::chop_move));
    break;
  case ProcKind::Send: case ProcKind::Cut: case ProcKind::MCut: {
    std::size_t k = P.kids.size();
    for (std::size_t i = 0; i < P.kids.size() && k == P.kids.size(); ++i)
      if (pv_free_in_kid(P, i, e.var)) k = i;
    for (std::size_t i = 0; i < P.kids.size() && k == P.kids.size(); ++i)
      if (can_absorb(P.kids[i], false)) k = i;
    if (k == P.kids.size()) break;
    out.push_back(commute(pr::with_kid(pf, k, chop(P.kids[k])), rule, priority::chop_move));
    break;
  }
  case ProcKind::Offer:
    out.push_back(commute(pr::offer(P.x, chop(P.kids[0]), chop(P.kids[1])), rule, priority::chop_duplicate));
    break;
  default:
    break;
  }
  return out;
}

std::vector<Step> Engine::assoc_steps(const ProcPtr& p) {
  std::vector<Step> out;
  const Process& c = *p;
  for (int s = 0; s < 2; ++s) {
    Oriented o = orient(c, s == 1);
    if (o.l->kind == ProcKind::MCut) {
      // new z w (mnew G {.. e:P ..} | R)  ≡  mnew G {.. e:new z w (P | R) ..}   when z ∈ fn(P)
      const Process& m = *o.l;
      bool clash = false;
      for (auto& [e, a] : m.endpoints) clash = clash || e == o.z || channel_free_in(e, o.r);
      if (clash) continue;
      for (std::size_t j = 0; j < m.kids.size(); ++j)
        if (channel_free_in(o.z, m.kids[j]))
          out.push_back({pr::with_kid(o.l, j, o.cut(m.kids[j], o.r)),
                         {StepFamily::StructEquiv, "cut-assoc-ccut", {}},
                         priority::equivalence});
      continue;
    }
    if (o.l->kind != ProcKind::Cut) continue;
    for (int t = 0; t < 2; ++t) {
      Oriented in = orient(*o.l, t == 1);
      // new z w (new x y (P | Q) | R)  ≡  new x y (P | new z w (Q | R))   when z ∈ fn(Q)
      if (!channel_free_in(o.z, in.r)) continue;
      if (channel_free_in(in.z, o.r) || channel_free_in(in.w, o.r)) continue;
      ProcPtr moved = in.cut(in.l, o.cut(in.r, o.r));
      out.push_back({moved, {StepFamily::StructEquiv, "cut-assoc", {}}, priority::equivalence});
    }
  }
  return out;
}

std::vector<Step> Engine::local_steps(const ProcPtr& p, const ChannelCtx& gamma) {
  switch (p->kind) {
  case ProcKind::Cut: return cut_steps(p, gamma);
  case ProcKind::ExplSubst: return chop_steps(p);
  case ProcKind::MCut: return mcut_steps(p, gamma);
  default: return {};
  }
}

void Engine::collect(const ProcPtr& p, const ChannelCtx& gamma, bool deep, bool equivalences,
                     std::vector<int>& path, std::vector<Step>& out) {
  for (auto& s : local_steps(p, gamma)) {
    s.tag.path = path;
    out.push_back(std::move(s));
  }
  if (equivalences && p->kind == ProcKind::Cut)
    for (auto& s : assoc_steps(p)) {
      s.tag.path = path;
      out.push_back(std::move(s));
    }
  const Process& n = *p;
  if (n.kind == ProcKind::SendProc) return; // abstraction bodies are frozen
  for (std::size_t i = 0; i < n.kids.size(); ++i) {
    bool congruence = n.kind == ProcKind::Cut || n.kind == ProcKind::MCut || (n.kind == ProcKind::ExplSubst && i == 0);
    if (n.kind == ProcKind::ExplSubst && i == 1) continue;
    if (!congruence && !deep) continue;
    std::vector<Step> sub;
    path.push_back(static_cast<int>(i));
    collect(n.kids[i], kid_gamma(n, i, gamma), deep, equivalences, path, sub);
    path.pop_back();
    for (auto& s : sub) {
      s.result = pr::with_kid(p, i, s.result);
      out.push_back(std::move(s));
    }
  }
}

std::vector<Step> Engine::all_steps(const ProcPtr& p, const ChannelCtx& gamma, bool deep, bool equivalences) {
  std::vector<Step> out;
  std::vector<int> path;
  collect(p, gamma, deep, equivalences, path, out);
  return out;
}

std::optional<Step> Engine::step(const ProcPtr& p, const ChannelCtx& gamma, bool deep) {
  auto steps = all_steps(p, gamma, deep);
  if (steps.empty()) return std::nullopt;
  auto best = std::min_element(steps.begin(), steps.end(),
                               [](const Step& a, const Step& b) { return a.priority < b.priority; });
  return std::move(*best);
}

bool is_normal_form(const ProcPtr& p) {
  return p->kind != ProcKind::Cut && p->kind != ProcKind::ExplSubst && p->kind != ProcKind::MCut;
}

namespace {

void require_checked(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma) {
  try {
    typecheck(theta, p, gamma);
  } catch (const TypeError& e) {
    throw Error(ErrorKind::NotWellFormed, std::string("refusing to step an unchecked term: ") + e.what(), e.pos());
  }
}

} // namespace

std::optional<Step> step_checked(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma, unsigned seed) {
  require_checked(theta, p, gamma);
  Engine eng(seed);
  eng.reserve(p);
  for (auto& [x, a] : gamma) eng.names().reserve(x);
  return eng.step(p, gamma);
}

Trace run(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma, const RunOptions& opts) {
  require_checked(theta, p, gamma);
  NameSet open = free_proc_vars(p);
  if (!open.empty())
    throw Error(ErrorKind::NotWellFormed, "cannot run an open term: free process variable '" + *open.begin() + "'");
  Engine eng(opts.seed);
  eng.reserve(p);
  for (auto& [x, a] : gamma) eng.names().reserve(x);
  Trace t;
  t.initial = p;
  ProcPtr cur = p;
  for (std::size_t i = 0; i < opts.fuel; ++i) {
    auto s = eng.step(cur, gamma, opts.deep);
    if (!s) {
      t.status = opts.deep || is_normal_form(cur) ? RunStatus::NormalForm : RunStatus::Stuck;
      return t;
    }
    cur = s->result;
    t.steps.push_back({std::move(s->tag), cur});
  }
  t.status = is_normal_form(cur) && !eng.step(cur, gamma, opts.deep) ? RunStatus::NormalForm : RunStatus::FuelExhausted;
  return t;
}

namespace {

struct ChopEliminator {
  NameSupply names;

  ProcPtr inline_body(const ProcPtr& p, const Name& r, const ParamRecord& rho, const ProcPtr& body,
                      const NameSet& body_ftv) {
    const Process& n = *p;
    if (n.kind == ProcKind::Invoke && n.var == r) {
      Subst s;
      s.chan = compose_records(n.record, rho);
      return substitute(body, s, names);
    }
    if (n.kind == ProcKind::RecvProc && n.var == r) return p;
    ProcPtr q = p;
    if (n.kind == ProcKind::RecvType && body_ftv.count(n.var)) {
      Process m = n;
      Name v2 = names.fresh(n.var);
      Subst s;
      s.tvar[n.var] = ty::var(v2);
      m.kids[0] = substitute(m.kids[0], s, names);
      m.var = v2;
      q = mk(std::move(m));
    }
    std::vector<ProcPtr> kids;
    bool changed = q != p;
    for (auto& k : q->kids) {
      kids.push_back(inline_body(k, r, rho, body, body_ftv));
      changed = changed || kids.back() != k;
    }
    return changed ? pr::with_kids(q, std::move(kids)) : p;
  }

  ProcPtr run(const ProcPtr& p) {
    std::vector<ProcPtr> kids;
    bool changed = false;
    for (auto& k : p->kids) {
      kids.push_back(run(k));
      changed = changed || kids.back() != k;
    }
    ProcPtr q = changed ? pr::with_kids(p, std::move(kids)) : p;
    if (q->kind != ProcKind::ExplSubst) return q;
    return inline_body(q->kids[0], q->var, q->record, q->kids[1], free_type_vars(q->kids[1]));
  }
};

} // namespace

ProcPtr eliminate_chops(const ProcPtr& p, unsigned seed) {
  ChopEliminator e{NameSupply(seed)};
  e.names.reserve_all(p);
  return e.run(p);
}

ProcPtr make_mcut(const GlobalPtr& g, const std::vector<std::pair<Name, ProcPtr>>& branches) {
  ChannelCtx eps = check_coherence(g);
  std::vector<std::pair<Name, TypePtr>> endpoints;
  std::vector<ProcPtr> kids;
  for (auto& [x, q] : branches) {
    auto it = eps.find(x);
    if (it == eps.end())
      throw Error(ErrorKind::IncoherentGlobalType, "endpoint '" + x + "' is not in " + print(g));
    endpoints.emplace_back(x, it->second);
    kids.push_back(q);
  }
  return pr::mcut(g, std::move(endpoints), std::move(kids));
}

} // namespace chop
