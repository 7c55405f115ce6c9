#pragma once

#include "chop/ast.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace chop {

struct Declaration {
  Name name;
  ProcEnv theta;
  ChannelCtx gamma;
  ProcPtr body;
  SourcePos pos;
};

struct Program {
  std::vector<std::pair<Name, TypePtr>> aliases;
  std::vector<std::pair<Name, GlobalPtr>> globals;
  std::vector<Declaration> decls;
  std::optional<Name> main;

  const Declaration* find(const Name& n) const;
  // The designated main declaration, or the last one.
  const Declaration* entry() const;
};

struct ParseOptions {
  // Accept identifiers containing '^' (reserved for translated channels).
  bool allow_reserved = false;
};

Program parse_program(std::string_view text, ParseOptions opts = {});
ProcPtr parse_process(std::string_view text, ParseOptions opts = {});
TypePtr parse_type(std::string_view text);
GlobalPtr parse_global(std::string_view text);

std::string print(const TypePtr& a);
std::string print(const ParamCtx& c);
std::string print(const ChannelCtx& c);
std::string print(const GlobalPtr& g);
std::string print(const ProcPtr& p);
std::string print(const Program& prog);

// Removes every sugar node. Link holes introduced for free output are filled
// by checking the result against the declaration's judgement.
Program desugar(const Program& prog);
ProcPtr desugar(const ProcPtr& p, const ProcEnv& theta, const ChannelCtx& gamma);

bool is_core(const ProcPtr& p);

} // namespace chop
