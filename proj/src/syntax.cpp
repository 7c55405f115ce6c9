#include "chop/syntax.hpp"

#include <algorithm>

namespace chop {

const char* to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
  case ErrorKind::UnknownProcedure: return "UnknownProcedure";
  case ErrorKind::TypeMismatch: return "TypeMismatch";
  case ErrorKind::LinearityViolation: return "LinearityViolation";
  case ErrorKind::UnknownName: return "UnknownName";
  case ErrorKind::ContextNotEmpty: return "ContextNotEmpty";
  case ErrorKind::NonExponentialServerContext: return "NonExponentialServerContext";
  case ErrorKind::TypeVarEscape: return "TypeVarEscape";
  case ErrorKind::LabelMismatch: return "LabelMismatch";
  case ErrorKind::IncoherentGlobalType: return "IncoherentGlobalType";
  case ErrorKind::AtomicType: return "AtomicType";
  case ErrorKind::NotWellFormed: return "NotWellFormed";
  case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Error";
}

ParamCtx::ParamCtx(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].first == entries_[i - 1].first)
      throw Error(ErrorKind::LabelMismatch, "duplicate label '" + entries_[i].first + "'");
}

TypePtr ParamCtx::find(const Label& l) const {
  for (auto& [k, t] : entries_)
    if (k == l) return t;
  return nullptr;
}

std::vector<Label> ParamCtx::labels() const {
  std::vector<Label> out;
  for (auto& e : entries_) out.push_back(e.first);
  return out;
}

ParamRecord::ParamRecord(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  NameSet seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first == entries_[i - 1].first)
      throw Error(ErrorKind::LabelMismatch, "duplicate label '" + entries_[i].first + "'");
    if (!seen.insert(entries_[i].second).second)
      throw Error(ErrorKind::LinearityViolation,
                  "channel '" + entries_[i].second + "' appears twice in a record");
  }
}

std::vector<Label> ParamRecord::preimage() const {
  std::vector<Label> out;
  for (auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<Name> ParamRecord::image() const {
  std::vector<Name> out;
  for (auto& e : entries_) out.push_back(e.second);
  return out;
}

std::optional<Name> ParamRecord::lookup(const Label& l) const {
  for (auto& [k, v] : entries_)
    if (k == l) return v;
  return std::nullopt;
}

namespace {
TypePtr mk(TypeKind k, Name v = {}, TypePtr l = nullptr, TypePtr r = nullptr, ParamCtx c = {}) {
  return std::make_shared<const Type>(Type{k, std::move(v), std::move(l), std::move(r), std::move(c)});
}
} // namespace

namespace ty {
TypePtr var(Name x) { return mk(TypeKind::Var, std::move(x)); }
TypePtr dual_var(Name x) { return mk(TypeKind::DualVar, std::move(x)); }
TypePtr tensor(TypePtr a, TypePtr b) { return mk(TypeKind::Tensor, {}, a, b); }
TypePtr par(TypePtr a, TypePtr b) { return mk(TypeKind::Par, {}, a, b); }
TypePtr plus(TypePtr a, TypePtr b) { return mk(TypeKind::Plus, {}, a, b); }
TypePtr with(TypePtr a, TypePtr b) { return mk(TypeKind::With, {}, a, b); }
TypePtr zero() { static const TypePtr t = mk(TypeKind::Zero); return t; }
TypePtr top() { static const TypePtr t = mk(TypeKind::Top); return t; }
TypePtr one() { static const TypePtr t = mk(TypeKind::One); return t; }
TypePtr bot() { static const TypePtr t = mk(TypeKind::Bot); return t; }
TypePtr why_not(TypePtr a) { return mk(TypeKind::WhyNot, {}, a); }
TypePtr of_course(TypePtr a) { return mk(TypeKind::OfCourse, {}, a); }
TypePtr exists(Name x, TypePtr a) { return mk(TypeKind::Exists, std::move(x), a); }
TypePtr forall(Name x, TypePtr a) { return mk(TypeKind::Forall, std::move(x), a); }
TypePtr provide(ParamCtx c) { return mk(TypeKind::Provide, {}, nullptr, nullptr, std::move(c)); }
TypePtr assume(ParamCtx c) { return mk(TypeKind::Assume, {}, nullptr, nullptr, std::move(c)); }
} // namespace ty

bool is_atomic(const TypePtr& a) {
  return a->kind == TypeKind::Var || a->kind == TypeKind::DualVar;
}

bool is_binary(TypeKind k) {
  return k == TypeKind::Tensor || k == TypeKind::Par || k == TypeKind::Plus || k == TypeKind::With;
}

namespace gl {
namespace {
GlobalPtr mk(Global g) { return std::make_shared<const Global>(std::move(g)); }
} // namespace
GlobalPtr out_in(std::vector<Name> xs, Name y, GlobalPtr g, GlobalPtr h) {
  return mk({GlobalKind::OutIn, std::move(y), std::move(xs), {}, nullptr, {}, g, h});
}
GlobalPtr close_wait(std::vector<Name> xs, Name y) {
  return mk({GlobalKind::CloseWait, std::move(y), std::move(xs), {}, nullptr, {}, nullptr, nullptr});
}
GlobalPtr sel_offer(Name x, std::vector<Name> ys, GlobalPtr g, GlobalPtr h) {
  return mk({GlobalKind::SelOffer, std::move(x), std::move(ys), {}, nullptr, {}, g, h});
}
GlobalPtr empty_choice(Name x, std::vector<Name> ys) {
  return mk({GlobalKind::EmptyChoice, std::move(x), std::move(ys), {}, nullptr, {}, nullptr, nullptr});
}
GlobalPtr bang(Name x, std::vector<Name> ys, GlobalPtr g) {
  return mk({GlobalKind::Bang, std::move(x), std::move(ys), {}, nullptr, {}, g, nullptr});
}
GlobalPtr type_comm(Name tv, Name x, std::vector<Name> ys, GlobalPtr g) {
  return mk({GlobalKind::TypeComm, std::move(x), std::move(ys), std::move(tv), nullptr, {}, g, nullptr});
}
GlobalPtr axiom(Name x, TypePtr a, Name y) {
  return mk({GlobalKind::Axiom, std::move(x), {std::move(y)}, {}, a, {}, nullptr, nullptr});
}
GlobalPtr provide_assume(Name x, Name y, ParamCtx d) {
  return mk({GlobalKind::ProvideAssume, std::move(x), {std::move(y)}, {}, nullptr, std::move(d), nullptr, nullptr});
}
} // namespace gl

std::vector<Name> global_endpoints(const GlobalPtr& g) {
  std::vector<Name> out;
  auto add = [&](const Name& n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  switch (g->kind) {
  case GlobalKind::OutIn:
  case GlobalKind::CloseWait:
    for (auto& n : g->many) add(n);
    add(g->one);
    break;
  default:
    add(g->one);
    for (auto& n : g->many) add(n);
  }
  // Participants not mentioned at the head still belong to the composition.
  for (const GlobalPtr& sub : {g->g, g->h})
    if (sub)
      for (auto& n : global_endpoints(sub)) add(n);
  return out;
}

bool is_sugar(ProcKind k) {
  switch (k) {
  case ProcKind::FreeSend:
  case ProcKind::SendProcCont:
  case ProcKind::RecvProcCont:
  case ProcKind::DefProc:
  case ProcKind::CallProc:
  case ProcKind::HOParam:
  case ProcKind::HOApply:
    return true;
  default:
    return false;
  }
}

namespace pr {
namespace {
ProcPtr mk(Process p) { return std::make_shared<const Process>(std::move(p)); }
Process base(ProcKind k) { return Process{k, {}, {}, {}, nullptr, {}, {}, {}, nullptr, {}, {}}; }
} // namespace

ProcPtr send(Name x, Name y, ProcPtr p, ProcPtr q) {
  auto n = base(ProcKind::Send); n.x = std::move(x); n.y = std::move(y); n.kids = {p, q}; return mk(n);
}
ProcPtr recv(Name x, Name y, ProcPtr p) {
  auto n = base(ProcKind::Recv); n.x = std::move(x); n.y = std::move(y); n.kids = {p}; return mk(n);
}
ProcPtr sel_l(Name x, ProcPtr p) { auto n = base(ProcKind::SelL); n.x = std::move(x); n.kids = {p}; return mk(n); }
ProcPtr sel_r(Name x, ProcPtr p) { auto n = base(ProcKind::SelR); n.x = std::move(x); n.kids = {p}; return mk(n); }
ProcPtr offer(Name x, ProcPtr p, ProcPtr q) {
  auto n = base(ProcKind::Offer); n.x = std::move(x); n.kids = {p, q}; return mk(n);
}
ProcPtr empty_offer(Name x) { auto n = base(ProcKind::EmptyOffer); n.x = std::move(x); return mk(n); }
ProcPtr client(Name x, Name y, ProcPtr p) {
  auto n = base(ProcKind::Client); n.x = std::move(x); n.y = std::move(y); n.kids = {p}; return mk(n);
}
ProcPtr server(Name x, Name y, ProcPtr p) {
  auto n = base(ProcKind::Server); n.x = std::move(x); n.y = std::move(y); n.kids = {p}; return mk(n);
}
ProcPtr send_type(Name x, TypePtr a, ProcPtr p) {
  auto n = base(ProcKind::SendType); n.x = std::move(x); n.type = a; n.kids = {p}; return mk(n);
}
ProcPtr recv_type(Name x, Name tv, ProcPtr p) {
  auto n = base(ProcKind::RecvType); n.x = std::move(x); n.var = std::move(tv); n.kids = {p}; return mk(n);
}
ProcPtr send_proc(Name x, ParamRecord r, ProcPtr p) {
  auto n = base(ProcKind::SendProc); n.x = std::move(x); n.record = std::move(r); n.kids = {p}; return mk(n);
}
ProcPtr recv_proc(Name x, Name pv, ProcPtr p) {
  auto n = base(ProcKind::RecvProc); n.x = std::move(x); n.var = std::move(pv); n.kids = {p}; return mk(n);
}
ProcPtr invoke(Name pv, ParamRecord r) {
  auto n = base(ProcKind::Invoke); n.var = std::move(pv); n.record = std::move(r); return mk(n);
}
ProcPtr close(Name x) { auto n = base(ProcKind::Close); n.x = std::move(x); return mk(n); }
ProcPtr wait(Name x, ProcPtr p) { auto n = base(ProcKind::Wait); n.x = std::move(x); n.kids = {p}; return mk(n); }
ProcPtr link(Name x, Name y, TypePtr a) {
  auto n = base(ProcKind::Link); n.x = std::move(x); n.y = std::move(y); n.type = a; return mk(n);
}
ProcPtr cut(Name x, TypePtr a, Name y, ProcPtr p, ProcPtr q) {
  auto n = base(ProcKind::Cut); n.x = std::move(x); n.type = a; n.y = std::move(y); n.kids = {p, q}; return mk(n);
}
ProcPtr expl_subst(ProcPtr p, Name pv, ParamRecord r, ProcPtr q, ParamCtx d) {
  auto n = base(ProcKind::ExplSubst);
  n.var = std::move(pv); n.record = std::move(r); n.params = std::move(d); n.kids = {p, q};
  return mk(n);
}
ProcPtr mcut(GlobalPtr g, std::vector<std::pair<Name, TypePtr>> eps, std::vector<ProcPtr> kids) {
  auto n = base(ProcKind::MCut); n.global = g; n.endpoints = std::move(eps); n.kids = std::move(kids);
  return mk(n);
}

ProcPtr free_send(Name x, Name y, ProcPtr p) {
  auto n = base(ProcKind::FreeSend); n.x = std::move(x); n.y = std::move(y); n.kids = {p}; return mk(n);
}
ProcPtr send_proc_cont(Name x, ParamRecord r, ProcPtr body, ProcPtr cont) {
  auto n = base(ProcKind::SendProcCont); n.x = std::move(x); n.record = std::move(r); n.kids = {body, cont};
  return mk(n);
}
ProcPtr recv_proc_cont(Name x, Name pv, ProcPtr p) {
  auto n = base(ProcKind::RecvProcCont); n.x = std::move(x); n.var = std::move(pv); n.kids = {p}; return mk(n);
}
ProcPtr def_proc(Name k, ParamRecord r, ParamCtx d, ProcPtr body, ProcPtr cont) {
  auto n = base(ProcKind::DefProc);
  n.x = std::move(k); n.record = std::move(r); n.params = std::move(d); n.kids = {body, cont};
  return mk(n);
}
ProcPtr call_proc(Name k, ParamRecord r) {
  auto n = base(ProcKind::CallProc); n.x = std::move(k); n.record = std::move(r); return mk(n);
}
ProcPtr ho_param(Name x, Name pv, ProcPtr p) {
  auto n = base(ProcKind::HOParam); n.x = std::move(x); n.var = std::move(pv); n.kids = {p}; return mk(n);
}
ProcPtr ho_apply(ProcPtr p, Name x, ParamRecord r, ParamCtx d, ProcPtr q) {
  auto n = base(ProcKind::HOApply);
  n.x = std::move(x); n.record = std::move(r); n.params = std::move(d); n.kids = {p, q};
  return mk(n);
}

ProcPtr with_kids(const ProcPtr& p, std::vector<ProcPtr> kids) {
  Process n = *p;
  n.kids = std::move(kids);
  return mk(std::move(n));
}

ProcPtr with_kid(const ProcPtr& p, std::size_t i, ProcPtr k) {
  Process n = *p;
  n.kids.at(i) = std::move(k);
  return mk(std::move(n));
}

ProcPtr at_pos(ProcPtr p, SourcePos pos) {
  Process n = *p;
  n.pos = pos;
  return mk(std::move(n));
}
} // namespace pr

std::size_t node_count(const ProcPtr& p) {
  std::size_t n = 1;
  for (auto& k : p->kids) n += node_count(k);
  return n;
}

std::size_t count_kind(const ProcPtr& p, ProcKind k) {
  std::size_t n = p->kind == k ? 1 : 0;
  for (auto& c : p->kids) n += count_kind(c, k);
  return n;
}

} // namespace chop
