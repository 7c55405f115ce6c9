#include "chop/typetheory.hpp"

namespace chop {

TypePtr dual(const TypePtr& a) {
  switch (a->kind) {
  case TypeKind::Var: return ty::dual_var(a->var);
  case TypeKind::DualVar: return ty::var(a->var);
  case TypeKind::Tensor: return ty::par(dual(a->left), dual(a->right));
  case TypeKind::Par: return ty::tensor(dual(a->left), dual(a->right));
  case TypeKind::Plus: return ty::with(dual(a->left), dual(a->right));
  case TypeKind::With: return ty::plus(dual(a->left), dual(a->right));
  case TypeKind::Zero: return ty::top();
  case TypeKind::Top: return ty::zero();
  case TypeKind::One: return ty::bot();
  case TypeKind::Bot: return ty::one();
  case TypeKind::WhyNot: return ty::of_course(dual(a->left));
  case TypeKind::OfCourse: return ty::why_not(dual(a->left));
  case TypeKind::Exists: return ty::forall(a->var, dual(a->left));
  case TypeKind::Forall: return ty::exists(a->var, dual(a->left));
  case TypeKind::Provide: return ty::assume(a->ctx);
  case TypeKind::Assume: return ty::provide(a->ctx);
  }
  return a;
}

ParamCtx dual(const ParamCtx& c) {
  std::vector<ParamCtx::Entry> es;
  for (auto& [l, t] : c) es.emplace_back(l, dual(t));
  return ParamCtx(std::move(es));
}

namespace {

void collect_type_names(const TypePtr& a, NameSet& out) {
  if (!a) return;
  if (!a->var.empty()) out.insert(a->var);
  collect_type_names(a->left, out);
  collect_type_names(a->right, out);
  for (auto& [l, t] : a->ctx) collect_type_names(t, out);
}

TypePtr subst(const TypePtr& a, const TypePtr& b, const Name& x, const NameSet& fvb, NameSupply& names) {
  switch (a->kind) {
  case TypeKind::Var: return a->var == x ? b : a;
  case TypeKind::DualVar: return a->var == x ? dual(b) : a;
  case TypeKind::Zero: case TypeKind::Top: case TypeKind::One: case TypeKind::Bot:
    return a;
  case TypeKind::WhyNot: return ty::why_not(subst(a->left, b, x, fvb, names));
  case TypeKind::OfCourse: return ty::of_course(subst(a->left, b, x, fvb, names));
  case TypeKind::Exists: case TypeKind::Forall: {
    if (a->var == x || !free_type_vars(a->left).count(x)) return a;
    Name v = a->var;
    TypePtr body = a->left;
    if (fvb.count(v)) {
      Name nv = names.fresh(v);
      body = subst(body, ty::var(nv), v, {nv}, names);
      v = nv;
    }
    body = subst(body, b, x, fvb, names);
    return a->kind == TypeKind::Exists ? ty::exists(v, body) : ty::forall(v, body);
  }
  case TypeKind::Provide: case TypeKind::Assume: {
    std::vector<ParamCtx::Entry> es;
    for (auto& [l, t] : a->ctx) es.emplace_back(l, subst(t, b, x, fvb, names));
    ParamCtx c(std::move(es));
    return a->kind == TypeKind::Provide ? ty::provide(c) : ty::assume(c);
  }
  case TypeKind::Tensor: return ty::tensor(subst(a->left, b, x, fvb, names), subst(a->right, b, x, fvb, names));
  case TypeKind::Par: return ty::par(subst(a->left, b, x, fvb, names), subst(a->right, b, x, fvb, names));
  case TypeKind::Plus: return ty::plus(subst(a->left, b, x, fvb, names), subst(a->right, b, x, fvb, names));
  case TypeKind::With: return ty::with(subst(a->left, b, x, fvb, names), subst(a->right, b, x, fvb, names));
  }
  return a;
}

} // namespace

TypePtr subst_type_var(const TypePtr& a, const TypePtr& b, const Name& x) {
  NameSupply names;
  NameSet used;
  collect_type_names(a, used);
  collect_type_names(b, used);
  names.reserve(used);
  return subst(a, b, x, free_type_vars(b), names);
}

ChannelCtx instantiate(const ParamCtx& gamma, const ParamRecord& rho) {
  if (gamma.labels() != rho.preimage())
    throw Error(ErrorKind::LabelMismatch, "record labels do not match the process type");
  ChannelCtx out;
  for (std::size_t i = 0; i < gamma.size(); ++i)
    out[rho.entries()[i].second] = gamma.entries()[i].second;
  return out;
}

ProcPtr eta_expand_link(const Name& x, const Name& y, const TypePtr& a, NameSupply& names) {
  using namespace pr;
  names.reserve(x);
  names.reserve(y);
  auto ho = [&](const Name& from, const Name& to, const ParamCtx& d) {
    // from : ⌊Δ⌋ receives the abstraction and re-offers it on `to`
    Name p = names.fresh("p");
    std::vector<ParamRecord::Entry> es;
    for (auto& l : d.labels()) es.emplace_back(l, names.fresh("c"));
    ParamRecord rho(std::move(es));
    return recv_proc(from, p, send_proc(to, rho, invoke(p, rho)));
  };
  switch (a->kind) {
  case TypeKind::Var: case TypeKind::DualVar:
    throw Error(ErrorKind::AtomicType, "links at atomic types are not expanded");
  case TypeKind::Tensor: {
    Name u = names.fresh(x), v = names.fresh(y);
    return recv(x, u, send(y, v, link(u, v, a->left), link(x, y, a->right)));
  }
  case TypeKind::Par: {
    Name u = names.fresh(x), v = names.fresh(y);
    return recv(y, v, send(x, u, link(u, v, a->left), link(x, y, a->right)));
  }
  case TypeKind::Plus:
    return offer(x, sel_l(y, link(x, y, a->left)), sel_r(y, link(x, y, a->right)));
  case TypeKind::With:
    return offer(y, sel_l(x, link(x, y, a->left)), sel_r(x, link(x, y, a->right)));
  case TypeKind::Zero: return empty_offer(x);
  case TypeKind::Top: return empty_offer(y);
  case TypeKind::One: return wait(x, close(y));
  case TypeKind::Bot: return wait(y, close(x));
  case TypeKind::WhyNot: {
    Name u = names.fresh(x), v = names.fresh(y);
    return server(x, u, client(y, v, link(u, v, a->left)));
  }
  case TypeKind::OfCourse: {
    Name u = names.fresh(x), v = names.fresh(y);
    return server(y, v, client(x, u, link(u, v, a->left)));
  }
  case TypeKind::Exists:
    return recv_type(x, a->var, send_type(y, ty::var(a->var), link(x, y, a->left)));
  case TypeKind::Forall:
    return recv_type(y, a->var, send_type(x, ty::var(a->var), link(x, y, a->left)));
  case TypeKind::Provide: return ho(x, y, a->ctx);
  case TypeKind::Assume: return ho(y, x, a->ctx);
  }
  return nullptr;
}

ProcPtr eta_expand_link(const Name& x, const Name& y, const TypePtr& a) {
  NameSupply names;
  return eta_expand_link(x, y, a, names);
}

ProcPtr eta_expand_fully(const ProcPtr& p, NameSupply& names) {
  names.reserve_all(p);
  if (p->kind == ProcKind::Link && p->type && !is_atomic(p->type))
    return eta_expand_fully(eta_expand_link(p->x, p->y, p->type, names), names);
  if (p->kids.empty()) return p;
  std::vector<ProcPtr> kids;
  for (auto& k : p->kids) kids.push_back(eta_expand_fully(k, names));
  return pr::with_kids(p, std::move(kids));
}

} // namespace chop
