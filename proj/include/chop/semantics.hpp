#pragma once

#include "chop/checker.hpp"

#include <optional>

namespace chop {

enum class StepFamily { Principal, Eta, Commute, StructEquiv };
const char* family_name(StepFamily f);

struct StepTag {
  StepFamily family;
  std::string rule;
  std::vector<int> path; // child indices from the root to the redex
};

// Lower runs first: principal, non-duplicating chop moves, commuting
// conversions, η, duplicating chop moves. Equivalence moves only appear in
// searches.
namespace priority {
inline constexpr int principal = 1;
inline constexpr int chop_move = 2;
inline constexpr int commute = 3;
inline constexpr int eta = 4;
inline constexpr int chop_duplicate = 5;
inline constexpr int equivalence = 9;
} // namespace priority

struct Step {
  ProcPtr result;
  StepTag tag;
  int priority;
};

class Engine {
public:
  explicit Engine(unsigned seed = 0) : names_(seed) {}

  // Every name of p becomes unavailable to the fresh-name supply.
  void reserve(const ProcPtr& p) { names_.reserve_all(p); }
  NameSupply& names() { return names_; }
  // Searches may also reduce a link at composite type directly (the
  // generalised axiom), besides expanding it.
  void set_general_axiom(bool on) { general_axiom_ = on; }

  // Steps whose redex is p itself (a cut, chop or coherence composition).
  // gamma types the channels free at p.
  std::vector<Step> local_steps(const ProcPtr& p, const ChannelCtx& gamma);

  // Steps at every congruence position, in preorder. With `deep`, also
  // below prefixes; with `equivalences`, also cut associativity moves.
  std::vector<Step> all_steps(const ProcPtr& p, const ChannelCtx& gamma, bool deep = false,
                              bool equivalences = false);

  // The step the execution strategy takes: least priority, then preorder.
  std::optional<Step> step(const ProcPtr& p, const ChannelCtx& gamma, bool deep = false);

private:
  NameSupply names_;
  bool general_axiom_ = false;

  void collect(const ProcPtr& p, const ChannelCtx& gamma, bool deep, bool equivalences, std::vector<int>& path,
               std::vector<Step>& out);
  std::vector<Step> cut_steps(const ProcPtr& p, const ChannelCtx& gamma);
  std::vector<Step> chop_steps(const ProcPtr& p);
  std::vector<Step> mcut_steps(const ProcPtr& p, const ChannelCtx& gamma);
  std::vector<Step> assoc_steps(const ProcPtr& p);

  ProcPtr freshen(const ProcPtr& n, const NameSet& bad_ch, const NameSet& bad_pv, const NameSet& bad_tv);
};

// Renames the first free use of z (in preorder) to z1 and every other free use to z2.
ProcPtr split_uses(const ProcPtr& p, const Name& z, const Name& z1, const Name& z2);
std::size_t count_uses(const ProcPtr& p, const Name& z);

// Builds a composition, reading endpoint types off the global type.
ProcPtr make_mcut(const GlobalPtr& g, const std::vector<std::pair<Name, ProcPtr>>& branches);

enum class RunStatus { NormalForm, FuelExhausted, Stuck };
const char* status_name(RunStatus s);

struct TraceEntry {
  StepTag tag;
  ProcPtr term;
};

struct Trace {
  ProcPtr initial;
  std::vector<TraceEntry> steps;
  RunStatus status = RunStatus::NormalForm;
  const ProcPtr& final_term() const { return steps.empty() ? initial : steps.back().term; }
};

struct RunOptions {
  std::size_t fuel = 10000;
  unsigned seed = 0;
  // Also reduce below prefixes, reaching a normal form with no redex anywhere.
  bool deep = false;
};

// Checks the judgement (NotWellFormed otherwise), requires a closed term, then
// follows the execution strategy until a normal form or the fuel runs out.
Trace run(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma, const RunOptions& opts = {});

// One strategy step on a checked judgement; NotWellFormed if it does not check.
std::optional<Step> step_checked(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma,
                                 unsigned seed = 0);

// True when no cut, chop or composition sits at a congruence position.
bool is_normal_form(const ProcPtr& p);

// Removes every explicit substitution, innermost first, by substituting the
// abstraction body for each invocation.
ProcPtr eliminate_chops(const ProcPtr& p, unsigned seed = 0);

} // namespace chop
