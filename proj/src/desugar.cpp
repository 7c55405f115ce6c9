#include "chop/checker.hpp"
#include "chop/surface.hpp"

namespace chop {

namespace {

struct Desugarer {
  NameSupply names;

  // `known` holds every channel name a call may refer to at this point.
  ProcPtr run(const ProcPtr& p, const NameSet& known) {
    const Process& n = *p;
    std::vector<ProcPtr> kids;
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
      NameSet inner = known;
      for (auto& b : kid_scope(n, i).channels) inner.insert(b);
      kids.push_back(run(n.kids[i], inner));
    }
    switch (n.kind) {
    case ProcKind::FreeSend: {
      Name z = names.fresh(n.y);
      return pr::at_pos(pr::send(n.x, z, pr::link(n.y, z, nullptr), kids[0]), n.pos);
    }
    case ProcKind::SendProcCont: {
      Name y = names.fresh(n.x);
      return pr::at_pos(pr::send(n.x, y, pr::send_proc(y, n.record, kids[0]), kids[1]), n.pos);
    }
    case ProcKind::RecvProcCont: {
      Name y = names.fresh(n.x);
      return pr::at_pos(pr::recv(n.x, y, pr::recv_proc(y, n.var, kids[0])), n.pos);
    }
    case ProcKind::DefProc: {
      Name srv = names.fresh(n.x), y = names.fresh("y");
      ProcPtr server = pr::server(srv, y, pr::send_proc(y, n.record, kids[0]));
      return pr::at_pos(pr::cut(srv, ty::of_course(ty::provide(n.params)), n.x, server, kids[1]), n.pos);
    }
    case ProcKind::CallProc: {
      if (!known.count(n.x))
        throw Error(ErrorKind::UnknownProcedure, "procedure '" + n.x + "' is not defined here", n.pos);
      Name y = names.fresh("y"), q = names.fresh("p");
      return pr::at_pos(pr::client(n.x, y, pr::recv_proc(y, q, pr::invoke(q, n.record))), n.pos);
    }
    case ProcKind::HOParam:
      return pr::at_pos(pr::recv_proc(n.x, n.var, kids[0]), n.pos);
    case ProcKind::HOApply: {
      Name y = names.fresh(n.x);
      return pr::at_pos(pr::cut(y, ty::provide(n.params), n.x, pr::send_proc(y, n.record, kids[1]), kids[0]), n.pos);
    }
    default:
      return kids.empty() ? p : pr::with_kids(p, std::move(kids));
    }
  }
};

bool has_hole(const ProcPtr& p) {
  if (p->kind == ProcKind::Link && !p->type) return true;
  for (auto& k : p->kids)
    if (has_hole(k)) return true;
  return false;
}

} // namespace

bool is_core(const ProcPtr& p) {
  if (is_sugar(p->kind)) return false;
  for (auto& k : p->kids)
    if (!is_core(k)) return false;
  return true;
}

ProcPtr desugar(const ProcPtr& p, const ProcEnv& theta, const ChannelCtx& gamma) {
  if (is_core(p) && !has_hole(p)) return p;
  Desugarer d;
  d.names.reserve_all(p);
  NameSet known;
  for (auto& [x, a] : gamma) {
    d.names.reserve(x);
    known.insert(x);
  }
  for (auto& [q, c] : theta) d.names.reserve(q);
  ProcPtr core = d.run(p, known);
  if (!has_hole(core)) return core;
  // Free-output links take their type from the judgement; leave holes if it does not check.
  try {
    return typecheck(theta, core, gamma).conclusion.process;
  } catch (const TypeError&) {
    return core;
  }
}

Program desugar(const Program& prog) {
  Program out = prog;
  for (auto& d : out.decls) d.body = desugar(d.body, d.theta, d.gamma);
  return out;
}

} // namespace chop
