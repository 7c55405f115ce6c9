#pragma once

#include "chop/semantics.hpp"
#include "chop/surface.hpp"

namespace chop {

// Channels standing for process variables in translated terms. The '^' makes
// them unwritable in ordinary source.
Name proc_channel(const Name& p);      // x^p
Name proc_peer_channel(const Name& p); // y^p

TypePtr translate_type(const TypePtr& a);
// ⟦l1:A1, ..., ln:An⟧ = ⟦~A1⟧ ⊗ ... ⊗ ⟦~An⟧ ⊗ 1
TypePtr translate_params(const ParamCtx& d);
ChannelCtx translate_env(const ProcEnv& theta);
ChannelCtx translate_ctx(const ChannelCtx& gamma);
GlobalPtr translate_global(const GlobalPtr& g);

// Derivation-directed translation into the first-order fragment.
ProcPtr translate_proc(const Derivation& d, unsigned seed = 0);

struct TranslationEntry {
  Name decl;
  bool ok = false;
  ChannelCtx gamma; // ⟦Θ⟧, ⟦Γ⟧
  ProcPtr process;  // null when the source did not check
  std::string error;
};
std::vector<TranslationEntry> check_translation(const Program& prog);

struct CorrespondenceEntry {
  std::size_t step = 0; // index into the source trace
  std::string rule;
  bool found = false;
  std::size_t path_length = 0; // target steps taken when found
  std::size_t explored = 0;
};

struct CorrespondenceOptions {
  std::size_t max_depth = 32;
  std::size_t fuel = 10000;       // source steps examined
  std::size_t max_states = 200000; // per search
  unsigned seed = 0;
};

// Completeness: for every step P -> P' of the execution of P, searches for
// ⟦P'⟧ among the reducts of ⟦P⟧, up to equivalence.
std::vector<CorrespondenceEntry> correspondence_check(const ProcEnv& theta, const ProcPtr& p,
                                                      const ChannelCtx& gamma,
                                                      const CorrespondenceOptions& opts = {});

// Bounded breadth-first search; returns the number of steps, if reachable.
std::optional<std::size_t> search_reduct(const ProcPtr& from, const ProcPtr& to, const ChannelCtx& gamma,
                                         std::size_t max_depth, std::size_t max_states, unsigned seed,
                                         std::size_t* explored = nullptr);

} // namespace chop
