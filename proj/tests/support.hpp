#pragma once

#include "chop/translate.hpp"

#include <random>
#include <string>
#include <vector>

namespace chop::testing {

struct CorpusFile {
  std::string path;
  std::string name; // file stem
  std::string text;
  std::string expect; // expected error kind for invalid programs, empty otherwise
};

std::vector<CorpusFile> corpus_files(bool invalid = false);

struct CorpusDecl {
  std::string file;
  Declaration decl; // desugared
};
// Every declaration of every valid corpus file, desugared.
std::vector<CorpusDecl> corpus_decls();

bool is_closed(const Declaration& d);
bool has_exponentials(const ProcPtr& p);

// Random types. `depth` counts constructor layers; atoms sit at depth 1.
struct TypeGen {
  std::mt19937 rng;
  bool higher_order = true;
  explicit TypeGen(unsigned seed) : rng(seed) {}
  TypePtr operator()(int depth);
};

// Every first-order type of height at most `depth` over the atom X (and ~X),
// the units, and binders for X.
std::vector<TypePtr> all_types(int depth);

// Declarative checker that tries every way of splitting the context at every
// multiplicative rule, with ?-typed channels copied to any subset of parts.
bool exhaustive_check(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma);

} // namespace chop::testing
