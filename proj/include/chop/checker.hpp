#pragma once

#include "chop/ast.hpp"

namespace chop {

enum class Rule {
  Axiom, Cut, Tensor, Par, Plus1, Plus2, With, WhyNot, OfCourse, Exists, Forall,
  Weaken, Contract, One, Bot, Top, Id, Chop, Provide, Assume, CCut,
};

const char* rule_name(Rule r);

struct Judgement {
  ProcEnv theta;
  ProcPtr process;
  ChannelCtx gamma;
};

struct Derivation {
  Rule rule;
  Judgement conclusion;
  std::vector<Derivation> premises;
  // Weaken: the discharged channel. Contract: x (conclusion) from y, z (premise).
  Name x, y, z;
};

struct CheckOptions {
  bool atomic_axioms = false;
  // First-order fragment: reject Id, Chop, provide and assume rules and types.
  bool cp_mode = false;
};

Derivation typecheck(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma,
                     const CheckOptions& opts = {});

ChannelCtx check_coherence(const GlobalPtr& g);

struct CCutBranch {
  Name channel;
  ProcPtr process;
};
Derivation typecheck_ccut(const GlobalPtr& g, const std::vector<CCutBranch>& branches,
                          const std::vector<ProcEnv>& thetas, const std::vector<ChannelCtx>& gammas,
                          const CheckOptions& opts = {});

// Re-checks every node of a derivation against the declarative rule it names.
// Throws TypeError describing the first bad node.
void validate(const Derivation& d, const CheckOptions& opts = {});

// Whether an empty offer reachable in p can discharge an unused linear
// channel (or process variable); used to route resources nobody mentions.
bool can_absorb(const ProcPtr& p, bool channel);

bool is_cp_type(const TypePtr& a);
bool is_cp_process(const ProcPtr& p);

} // namespace chop
