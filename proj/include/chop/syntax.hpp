#pragma once

#include "chop/error.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace chop {

using Name = std::string;
using Label = std::string;
using NameSet = std::set<Name>;

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Process type over labels. Entries are kept sorted by label.
class ParamCtx {
public:
  using Entry = std::pair<Label, TypePtr>;

  ParamCtx() = default;
  explicit ParamCtx(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  TypePtr find(const Label& l) const;
  std::vector<Label> labels() const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

private:
  std::vector<Entry> entries_;
};

enum class TypeKind {
  Var, DualVar, Tensor, Par, Plus, With, Zero, Top, One, Bot,
  WhyNot, OfCourse, Exists, Forall, Provide, Assume,
};

struct Type {
  TypeKind kind;
  Name var;      // Var, DualVar, Exists, Forall
  TypePtr left;  // binary left operand, or the body of unary/quantified types
  TypePtr right; // binary right operand
  ParamCtx ctx;  // Provide, Assume
};

namespace ty {
TypePtr var(Name x);
TypePtr dual_var(Name x);
TypePtr tensor(TypePtr a, TypePtr b);
TypePtr par(TypePtr a, TypePtr b);
TypePtr plus(TypePtr a, TypePtr b);
TypePtr with(TypePtr a, TypePtr b);
TypePtr zero();
TypePtr top();
TypePtr one();
TypePtr bot();
TypePtr why_not(TypePtr a);
TypePtr of_course(TypePtr a);
TypePtr exists(Name x, TypePtr a);
TypePtr forall(Name x, TypePtr a);
TypePtr provide(ParamCtx c);
TypePtr assume(ParamCtx c);
} // namespace ty

bool is_atomic(const TypePtr& a);
bool is_binary(TypeKind k);

using ChannelCtx = std::map<Name, TypePtr>;
using ProcEnv = std::map<Name, ParamCtx>;

// Record ρ from labels to channel names, kept sorted by label.
class ParamRecord {
public:
  using Entry = std::pair<Label, Name>;

  ParamRecord() = default;
  explicit ParamRecord(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<Label> preimage() const;
  std::vector<Name> image() const;
  std::optional<Name> lookup(const Label& l) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const ParamRecord&) const = default;

private:
  std::vector<Entry> entries_;
};

// Global types: proof terms of the coherence judgement.
enum class GlobalKind { OutIn, CloseWait, SelOffer, EmptyChoice, Bang, TypeComm, Axiom, ProvideAssume };

struct Global;
using GlobalPtr = std::shared_ptr<const Global>;

// Field use per kind:
//   OutIn(many=x̃, one=y, g, h)      CloseWait(many=x̃, one=y)
//   SelOffer(one=x, many=ỹ, g, h)   EmptyChoice(one=x, many=ỹ)
//   Bang(one=x, many=ỹ, g)          TypeComm(tvar, one=x, many=ỹ, g)
//   Axiom(one=x, type, many={y})    ProvideAssume(one=x, many={y}, params)
struct Global {
  GlobalKind kind;
  Name one;
  std::vector<Name> many;
  Name tvar;
  TypePtr type;
  ParamCtx params;
  GlobalPtr g, h;
};

namespace gl {
GlobalPtr out_in(std::vector<Name> xs, Name y, GlobalPtr g, GlobalPtr h);
GlobalPtr close_wait(std::vector<Name> xs, Name y);
GlobalPtr sel_offer(Name x, std::vector<Name> ys, GlobalPtr g, GlobalPtr h);
GlobalPtr empty_choice(Name x, std::vector<Name> ys);
GlobalPtr bang(Name x, std::vector<Name> ys, GlobalPtr g);
GlobalPtr type_comm(Name tv, Name x, std::vector<Name> ys, GlobalPtr g);
GlobalPtr axiom(Name x, TypePtr a, Name y);
GlobalPtr provide_assume(Name x, Name y, ParamCtx d);
} // namespace gl

// Endpoint names introduced by a global type (its typing's domain).
std::vector<Name> global_endpoints(const GlobalPtr& g);

enum class ProcKind {
  // core
  Send, Recv, SelL, SelR, Offer, EmptyOffer, Client, Server, SendType, RecvType,
  SendProc, RecvProc, Invoke, Close, Wait, Link, Cut, ExplSubst, MCut,
  // surface sugar, removed by desugaring
  FreeSend, SendProcCont, RecvProcCont, DefProc, CallProc, HOParam, HOApply,
};

bool is_sugar(ProcKind k);

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

// One generic node. Field use per kind:
//   Send(x,y,[P,Q])  Recv(x,y,[P])  SelL/SelR(x,[P])  Offer(x,[P,Q])  EmptyOffer(x)
//   Client/Server(x,y,[P])  SendType(x,type,[P])  RecvType(x,var,[P])
//   SendProc(x,record,[P])  RecvProc(x,var,[P])  Invoke(var,record)  Close(x)  Wait(x,[P])
//   Link(x,y,type)   x : dual(type), y : type; a null type is a hole filled by the checker
//   Cut(x,type,y,[P,Q])   x : type in P, y : dual(type) in Q
//   ExplSubst([P,Q],var,record,params)   P is the continuation, Q the abstraction body
//   MCut(global,endpoints,kids)
//   FreeSend(x,y,[P])  SendProcCont(x,record,[P,Q])  RecvProcCont(x,var,[P])
//   DefProc(x=K,record,params,[P,Q])  CallProc(x=K,record)  HOParam(x,var,[P])
//   HOApply(x,record,params,[P,Q])    P binds x, Q is the abstraction body
struct Process {
  ProcKind kind;
  Name x, y;
  Name var;
  TypePtr type;
  ParamRecord record;
  ParamCtx params;
  std::vector<ProcPtr> kids;
  GlobalPtr global;
  std::vector<std::pair<Name, TypePtr>> endpoints;
  SourcePos pos;

  const ProcPtr& kid(std::size_t i) const { return kids.at(i); }
};

namespace pr {
ProcPtr send(Name x, Name y, ProcPtr p, ProcPtr q);
ProcPtr recv(Name x, Name y, ProcPtr p);
ProcPtr sel_l(Name x, ProcPtr p);
ProcPtr sel_r(Name x, ProcPtr p);
ProcPtr offer(Name x, ProcPtr p, ProcPtr q);
ProcPtr empty_offer(Name x);
ProcPtr client(Name x, Name y, ProcPtr p);
ProcPtr server(Name x, Name y, ProcPtr p);
ProcPtr send_type(Name x, TypePtr a, ProcPtr p);
ProcPtr recv_type(Name x, Name tv, ProcPtr p);
ProcPtr send_proc(Name x, ParamRecord r, ProcPtr p);
ProcPtr recv_proc(Name x, Name pv, ProcPtr p);
ProcPtr invoke(Name pv, ParamRecord r);
ProcPtr close(Name x);
ProcPtr wait(Name x, ProcPtr p);
ProcPtr link(Name x, Name y, TypePtr a);
ProcPtr cut(Name x, TypePtr a, Name y, ProcPtr p, ProcPtr q);
ProcPtr expl_subst(ProcPtr p, Name pv, ParamRecord r, ProcPtr q, ParamCtx d);
ProcPtr mcut(GlobalPtr g, std::vector<std::pair<Name, TypePtr>> eps, std::vector<ProcPtr> kids);

ProcPtr free_send(Name x, Name y, ProcPtr p);
ProcPtr send_proc_cont(Name x, ParamRecord r, ProcPtr body, ProcPtr cont);
ProcPtr recv_proc_cont(Name x, Name pv, ProcPtr p);
ProcPtr def_proc(Name k, ParamRecord r, ParamCtx d, ProcPtr body, ProcPtr cont);
ProcPtr call_proc(Name k, ParamRecord r);
ProcPtr ho_param(Name x, Name pv, ProcPtr p);
ProcPtr ho_apply(ProcPtr p, Name x, ParamRecord r, ParamCtx d, ProcPtr q);

// Copy of `p` with new children (same arity).
ProcPtr with_kids(const ProcPtr& p, std::vector<ProcPtr> kids);
ProcPtr with_kid(const ProcPtr& p, std::size_t i, ProcPtr k);
ProcPtr at_pos(ProcPtr p, SourcePos pos);
} // namespace pr

std::size_t node_count(const ProcPtr& p);
std::size_t count_kind(const ProcPtr& p, ProcKind k);

} // namespace chop
