#pragma once

#include "chop/syntax.hpp"

#include <map>

namespace chop {

// Deterministic fresh-name supply. A fresh name is the base with any `_N`
// suffix stripped, plus a new `_N` suffix that avoids every reserved name.
class NameSupply {
public:
  explicit NameSupply(unsigned seed = 0) : seed_(seed) {}

  void reserve(const Name& n) { used_.insert(n); }
  void reserve(const NameSet& ns) { used_.insert(ns.begin(), ns.end()); }
  void reserve_all(const ProcPtr& p);
  Name fresh(const Name& base);

private:
  unsigned seed_;
  NameSet used_;
  std::map<Name, unsigned> next_;
};

NameSet free_channels(const ProcPtr& p);
NameSet free_proc_vars(const ProcPtr& p);
NameSet free_type_vars(const TypePtr& a);
NameSet free_type_vars(const ParamCtx& c);
NameSet free_type_vars(const ProcPtr& p);
// Every name (free or bound, any namespace) that occurs in p.
NameSet all_names(const ProcPtr& p);

bool channel_free_in(const Name& x, const ProcPtr& p);

// Channels a node uses itself (subjects, link ends, invocation arguments).
std::vector<Name> channel_uses(const Process& p);

// Renames endpoints and substitutes type variables inside a global type.
GlobalPtr rename_global_names(const GlobalPtr& g, const std::map<Name, Name>& chans,
                              const std::map<Name, TypePtr>& types);

// Binders a node introduces for its i-th child.
struct Scope {
  std::vector<Name> channels;
  std::vector<Name> procvars;
  std::vector<Name> typevars;
};
Scope kid_scope(const Process& p, std::size_t i);

// Simultaneous capture-avoiding substitution on all three namespaces.
struct Subst {
  std::map<Name, Name> chan;
  std::map<Name, Name> pvar;
  std::map<Name, TypePtr> tvar;
  bool empty() const { return chan.empty() && pvar.empty() && tvar.empty(); }
};
ProcPtr substitute(const ProcPtr& p, const Subst& s, NameSupply& names);

ProcPtr rename_channels(const ProcPtr& p, const std::map<Name, Name>& m);
// P{w/y}
ProcPtr rename_channel(const ProcPtr& p, const Name& w, const Name& y);
ProcPtr rename_proc_var(const ProcPtr& p, const Name& to, const Name& from);

// ρ ∘ ρ'⁻¹ : sends ρ'(l) to ρ(l).
std::map<Name, Name> compose_records(const ParamRecord& rho, const ParamRecord& rho_prime);

// Canonical keys: equal exactly when the terms are alpha-equivalent. With
// `modulo_symmetry` cuts and links are additionally identified up to swapping.
std::string canonical_key(const ProcPtr& p, bool modulo_symmetry = false);
std::string canonical_key(const TypePtr& a);
bool alpha_eq(const ProcPtr& p, const ProcPtr& q);
bool type_eq(const TypePtr& a, const TypePtr& b);
bool ctx_eq(const ParamCtx& a, const ParamCtx& b);
bool ctx_eq(const ChannelCtx& a, const ChannelCtx& b);

} // namespace chop
