#include "chop/translate.hpp"
#include "chop/typetheory.hpp"

#include <deque>
#include <unordered_set>

namespace chop {

Name proc_channel(const Name& p) { return "x^" + p; }
Name proc_peer_channel(const Name& p) { return "y^" + p; }

TypePtr translate_type(const TypePtr& a) {
  switch (a->kind) {
  case TypeKind::Var: case TypeKind::DualVar: case TypeKind::Zero: case TypeKind::Top: case TypeKind::One:
  case TypeKind::Bot:
    return a;
  case TypeKind::Tensor: return ty::tensor(translate_type(a->left), translate_type(a->right));
  case TypeKind::Par: return ty::par(translate_type(a->left), translate_type(a->right));
  case TypeKind::Plus: return ty::plus(translate_type(a->left), translate_type(a->right));
  case TypeKind::With: return ty::with(translate_type(a->left), translate_type(a->right));
  case TypeKind::WhyNot: return ty::why_not(translate_type(a->left));
  case TypeKind::OfCourse: return ty::of_course(translate_type(a->left));
  case TypeKind::Exists: return ty::exists(a->var, translate_type(a->left));
  case TypeKind::Forall: return ty::forall(a->var, translate_type(a->left));
  case TypeKind::Provide: return ty::tensor(dual(translate_params(a->ctx)), ty::one());
  case TypeKind::Assume: return ty::par(translate_params(a->ctx), ty::bot());
  }
  return a;
}

TypePtr translate_params(const ParamCtx& d) {
  TypePtr t = ty::one();
  const auto& es = d.entries();
  for (auto it = es.rbegin(); it != es.rend(); ++it) t = ty::tensor(translate_type(dual(it->second)), t);
  return t;
}

ChannelCtx translate_env(const ProcEnv& theta) {
  ChannelCtx out;
  for (auto& [p, d] : theta) out[proc_channel(p)] = translate_params(d);
  return out;
}

ChannelCtx translate_ctx(const ChannelCtx& gamma) {
  ChannelCtx out;
  for (auto& [x, a] : gamma) out[x] = translate_type(a);
  return out;
}

GlobalPtr translate_global(const GlobalPtr& g) {
  switch (g->kind) {
  case GlobalKind::OutIn: return gl::out_in(g->many, g->one, translate_global(g->g), translate_global(g->h));
  case GlobalKind::CloseWait: return g;
  case GlobalKind::SelOffer: return gl::sel_offer(g->one, g->many, translate_global(g->g), translate_global(g->h));
  case GlobalKind::EmptyChoice: return g;
  case GlobalKind::Bang: return gl::bang(g->one, g->many, translate_global(g->g));
  case GlobalKind::TypeComm: return gl::type_comm(g->tvar, g->one, g->many, translate_global(g->g));
  case GlobalKind::Axiom: return gl::axiom(g->one, translate_type(g->type), g->many.at(0));
  case GlobalKind::ProvideAssume: {
    // x : ~⟦Δ⟧ ⊗ 1 sends the reference, y : ⟦Δ⟧ ⅋ ⊥ receives it.
    const Name& y = g->many.at(0);
    return gl::out_in({g->one}, y, gl::axiom(g->one, dual(translate_params(g->params)), y),
                      gl::close_wait({g->one}, y));
  }
  }
  return g;
}

namespace {

struct Translator {
  NameSupply names;

  // y(z1). ... y(zk). wait y. body
  ProcPtr receive_params(const Name& y, const ParamRecord& rho, ProcPtr body) {
    body = pr::wait(y, std::move(body));
    const auto& es = rho.entries();
    for (auto it = es.rbegin(); it != es.rend(); ++it) body = pr::recv(y, it->second, body);
    return body;
  }

  ProcPtr run(const Derivation& d) {
    const Process& n = *d.conclusion.process;
    auto kid = [&](std::size_t i) { return run(d.premises.at(i)); };
    switch (d.rule) {
    case Rule::Weaken: return kid(0);
    case Rule::Contract: return rename_channels(kid(0), {{d.y, d.x}, {d.z, d.x}});
    case Rule::Axiom: return pr::link(n.x, n.y, translate_type(n.type));
    case Rule::Cut: return pr::cut(n.x, translate_type(n.type), n.y, kid(0), kid(1));
    case Rule::Tensor: return pr::send(n.x, n.y, kid(0), kid(1));
    case Rule::Par: return pr::recv(n.x, n.y, kid(0));
    case Rule::Plus1: return pr::sel_l(n.x, kid(0));
    case Rule::Plus2: return pr::sel_r(n.x, kid(0));
    case Rule::With: return pr::offer(n.x, kid(0), kid(1));
    case Rule::WhyNot: return pr::client(n.x, n.y, kid(0));
    case Rule::OfCourse: return pr::server(n.x, n.y, kid(0));
    case Rule::Exists: return pr::send_type(n.x, translate_type(n.type), kid(0));
    case Rule::Forall: return pr::recv_type(n.x, n.var, kid(0));
    case Rule::One: return pr::close(n.x);
    case Rule::Bot: return pr::wait(n.x, kid(0));
    case Rule::Top: return pr::empty_offer(n.x);
    case Rule::Id: {
      // One free output per parameter, in label order, then close.
      const ParamCtx& gamma = d.conclusion.theta.at(n.var);
      Name xp = proc_channel(n.var);
      ProcPtr out = pr::close(xp);
      const auto& es = n.record.entries();
      for (auto it = es.rbegin(); it != es.rend(); ++it) {
        Name c = names.fresh("c");
        out = pr::send(xp, c, pr::link(it->second, c, translate_type(dual(gamma.find(it->first)))), out);
      }
      return out;
    }
    case Rule::Provide: {
      Name y = names.fresh("y");
      return pr::send(n.x, y, receive_params(y, n.record, kid(0)), pr::close(n.x));
    }
    case Rule::Assume: return pr::recv(n.x, proc_channel(n.var), pr::wait(n.x, kid(0)));
    case Rule::Chop: {
      Name yp = proc_peer_channel(n.var);
      return pr::cut(proc_channel(n.var), translate_params(n.params), yp, kid(0),
                     receive_params(yp, n.record, kid(1)));
    }
    case Rule::CCut: {
      std::vector<std::pair<Name, TypePtr>> eps;
      std::vector<ProcPtr> kids;
      for (std::size_t i = 0; i < n.endpoints.size(); ++i) {
        eps.emplace_back(n.endpoints[i].first, translate_type(n.endpoints[i].second));
        kids.push_back(kid(i));
      }
      return pr::mcut(translate_global(n.global), std::move(eps), std::move(kids));
    }
    }
    throw Error(ErrorKind::Unsupported, std::string("no translation for rule ") + rule_name(d.rule));
  }
};

} // namespace

ProcPtr translate_proc(const Derivation& d, unsigned seed) {
  Translator t{NameSupply(seed)};
  t.names.reserve_all(d.conclusion.process);
  return t.run(d);
}

std::vector<TranslationEntry> check_translation(const Program& prog) {
  std::vector<TranslationEntry> out;
  CheckOptions cp;
  cp.cp_mode = true;
  for (auto& decl : prog.decls) {
    TranslationEntry e;
    e.decl = decl.name;
    try {
      Derivation d = typecheck(decl.theta, decl.body, decl.gamma);
      e.gamma = translate_env(decl.theta);
      for (auto& [x, a] : translate_ctx(decl.gamma)) e.gamma[x] = a;
      e.process = translate_proc(d);
      typecheck({}, e.process, e.gamma, cp);
      e.ok = is_cp_process(e.process);
      if (!e.ok) e.error = "translation left a higher-order construct";
    } catch (const Error& err) {
      e.error = std::string(to_string(err.kind())) + ": " + err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<std::size_t> search_reduct(const ProcPtr& from, const ProcPtr& to, const ChannelCtx& gamma,
                                         std::size_t max_depth, std::size_t max_states, unsigned seed,
                                         std::size_t* explored) {
  Engine eng(seed);
  eng.reserve(from);
  eng.reserve(to);
  for (auto& [x, a] : gamma) eng.names().reserve(x);
  eng.set_general_axiom(true);

  const std::string target = canonical_key(to, true);
  std::unordered_set<std::string> seen{canonical_key(from, true)};
  std::vector<ProcPtr> frontier{from};
  auto done = [&](std::optional<std::size_t> r) {
    if (explored) *explored = seen.size();
    return r;
  };
  for (std::size_t depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    std::vector<ProcPtr> next;
    for (auto& q : frontier) {
      for (auto& s : eng.all_steps(q, gamma, true, true)) {
        std::string k = canonical_key(s.result, true);
        if (k == target) return done(depth);
        if (seen.insert(std::move(k)).second) next.push_back(s.result);
        if (seen.size() > max_states) return done(std::nullopt);
      }
    }
    frontier = std::move(next);
  }
  return done(std::nullopt);
}

std::vector<CorrespondenceEntry> correspondence_check(const ProcEnv& theta, const ProcPtr& p,
                                                      const ChannelCtx& gamma, const CorrespondenceOptions& opts) {
  RunOptions ro;
  ro.fuel = opts.fuel;
  ro.seed = opts.seed;
  Trace t = run(theta, p, gamma, ro);
  ChannelCtx tg = translate_env(theta);
  for (auto& [x, a] : translate_ctx(gamma)) tg[x] = a;

  std::vector<CorrespondenceEntry> out;
  ProcPtr prev = translate_proc(typecheck(theta, p, gamma), opts.seed);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    ProcPtr next = translate_proc(typecheck(theta, t.steps[i].term, gamma), opts.seed);
    CorrespondenceEntry e;
    e.step = i;
    e.rule = t.steps[i].tag.rule;
    auto r = search_reduct(prev, next, tg, opts.max_depth, opts.max_states, opts.seed, &e.explored);
    e.found = r.has_value();
    e.path_length = r.value_or(0);
    out.push_back(std::move(e));
    prev = next;
  }
  return out;
}

} // namespace chop
