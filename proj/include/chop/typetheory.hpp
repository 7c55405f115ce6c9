#pragma once

#include "chop/ast.hpp"

namespace chop {

TypePtr dual(const TypePtr& a);
ParamCtx dual(const ParamCtx& c);

// A{B/X}, capture avoiding; ~X becomes dual(B).
TypePtr subst_type_var(const TypePtr& a, const TypePtr& b, const Name& x);

// Γρ
ChannelCtx instantiate(const ParamCtx& gamma, const ParamRecord& rho);

// One layer of η-expansion of `link x y : A` (x : dual A, y : A).
ProcPtr eta_expand_link(const Name& x, const Name& y, const TypePtr& a, NameSupply& names);
ProcPtr eta_expand_link(const Name& x, const Name& y, const TypePtr& a);

// Expands every non-atomic link in p until only atomic links remain.
ProcPtr eta_expand_fully(const ProcPtr& p, NameSupply& names);

} // namespace chop
