#include "chop/checker.hpp"
#include "chop/surface.hpp"
#include "chop/typetheory.hpp"

#include <algorithm>
#include <optional>

namespace chop {

const char* rule_name(Rule r) {
  switch (r) {
  case Rule::Axiom: return "Axiom";
  case Rule::Cut: return "Cut";
  case Rule::Tensor: return "⊗";
  case Rule::Par: return "⅋";
  case Rule::Plus1: return "⊕1";
  case Rule::Plus2: return "⊕2";
  case Rule::With: return "&";
  case Rule::WhyNot: return "?";
  case Rule::OfCourse: return "!";
  case Rule::Exists: return "∃";
  case Rule::Forall: return "∀";
  case Rule::Weaken: return "Weaken";
  case Rule::Contract: return "Contract";
  case Rule::One: return "1";
  case Rule::Bot: return "⊥";
  case Rule::Top: return "⊤";
  case Rule::Id: return "Id";
  case Rule::Chop: return "Chop";
  case Rule::Provide: return "⌈⌉";
  case Rule::Assume: return "⌊⌋";
  case Rule::CCut: return "CCut";
  }
  return "?";
}

bool is_cp_type(const TypePtr& a) {
  if (!a) return true;
  if (a->kind == TypeKind::Provide || a->kind == TypeKind::Assume) return false;
  return is_cp_type(a->left) && is_cp_type(a->right);
}

bool is_cp_process(const ProcPtr& p) {
  switch (p->kind) {
  case ProcKind::SendProc: case ProcKind::RecvProc: case ProcKind::Invoke: case ProcKind::ExplSubst:
    return false;
  default:
    break;
  }
  if (is_sugar(p->kind)) return false;
  if (!is_cp_type(p->type)) return false;
  for (auto& [e, t] : p->endpoints)
    if (!is_cp_type(t)) return false;
  for (auto& k : p->kids)
    if (!is_cp_process(k)) return false;
  return true;
}

namespace {

[[noreturn]] void fail(ErrorKind k, const ProcPtr& p, const std::string& msg) {
  throw TypeError(k, msg, p ? p->pos : SourcePos{});
}

bool is_why_not(const TypePtr& a) { return a && a->kind == TypeKind::WhyNot; }

// Whether a ⊤ reachable in p could discharge an unused linear resource.
bool absorbs(const ProcPtr& p, bool channel) {
  switch (p->kind) {
  case ProcKind::EmptyOffer:
    return true;
  case ProcKind::Recv: case ProcKind::SelL: case ProcKind::SelR: case ProcKind::Client:
  case ProcKind::SendType: case ProcKind::RecvType: case ProcKind::RecvProc: case ProcKind::Wait:
    return absorbs(p->kids[0], channel);
  case ProcKind::Offer:
    return absorbs(p->kids[0], channel) && absorbs(p->kids[1], channel);
  case ProcKind::Send: case ProcKind::Cut: case ProcKind::MCut:
    return std::any_of(p->kids.begin(), p->kids.end(), [&](auto& k) { return absorbs(k, channel); });
  case ProcKind::ExplSubst:
    return channel ? absorbs(p->kids[0], true)
                   : absorbs(p->kids[0], false) || absorbs(p->kids[1], false);
  case ProcKind::SendProc:
    return !channel && absorbs(p->kids[0], false);
  default:
    return false;
  }
}

ChannelCtx without(ChannelCtx g, const Name& x) {
  g.erase(x);
  return g;
}

std::string show(const ProcPtr& p) {
  std::string s = print(p);
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

// A part of a multiplicative split: one child with the binders it adds.
struct Part {
  NameSet fc, fpv;           // free in the child, as seen from the parent
  NameSet binds_ch, binds_pv;
  bool takes_channels = true;
  bool absorb_ch = false, absorb_pv = false;
};

struct Assignment {
  std::vector<ChannelCtx> gammas;
  std::vector<ProcEnv> thetas;
};

class Checker {
public:
  explicit Checker(const CheckOptions& o) : opts_(o) {}

  NameSupply names;

  Derivation check(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma) {
    if (is_sugar(p->kind)) fail(ErrorKind::Unsupported, p, "surface sugar must be desugared before checking");
    if (opts_.cp_mode) cp_guard(theta, p, gamma);

    NameSet fc = free_channels(p);
    NameSet fpv = free_proc_vars(p);
    for (auto& x : fc)
      if (!gamma.count(x)) fail(ErrorKind::UnknownName, p, "channel '" + x + "' is not in the context");
    for (auto& q : fpv)
      if (!theta.count(q)) fail(ErrorKind::UnknownName, p, "process variable '" + q + "' is not in the context");

    if (p->kind != ProcKind::EmptyOffer) {
      std::vector<std::pair<Name, TypePtr>> weakened;
      for (auto& [x, a] : gamma) {
        if (fc.count(x)) continue;
        if (is_why_not(a)) weakened.emplace_back(x, a);
        else if (!absorbs(p, true))
          fail(ErrorKind::LinearityViolation, p, "linear channel '" + x + "' is never used");
      }
      for (auto& [q, c] : theta)
        if (!fpv.count(q) && !absorbs(p, false))
          fail(ErrorKind::LinearityViolation, p, "process variable '" + q + "' is never used");
      if (!weakened.empty()) {
        ChannelCtx g = gamma;
        for (auto& [x, a] : weakened) g.erase(x);
        Derivation d = check(theta, p, g);
        for (auto it = weakened.rbegin(); it != weakened.rend(); ++it) {
          g[it->first] = it->second;
          Derivation w{Rule::Weaken, {theta, d.conclusion.process, g}, {}, it->first, {}, {}};
          w.premises.push_back(std::move(d));
          d = std::move(w);
        }
        return d;
      }
    }
    return dispatch(theta, p, gamma);
  }

private:
  CheckOptions opts_;

  void cp_guard(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma) {
    if (!theta.empty()) fail(ErrorKind::Unsupported, p, "process variables are not part of the first-order fragment");
    for (auto& [x, a] : gamma)
      if (!is_cp_type(a)) fail(ErrorKind::Unsupported, p, "channel '" + x + "' has a higher-order type");
    switch (p->kind) {
    case ProcKind::SendProc: case ProcKind::RecvProc: case ProcKind::Invoke: case ProcKind::ExplSubst:
      fail(ErrorKind::Unsupported, p, "higher-order construct outside the first-order fragment");
    default:
      break;
    }
    if (!is_cp_type(p->type)) fail(ErrorKind::Unsupported, p, "higher-order type outside the first-order fragment");
  }

  TypePtr need(const ChannelCtx& g, const Name& x, const ProcPtr& p) {
    auto it = g.find(x);
    if (it == g.end()) fail(ErrorKind::UnknownName, p, "channel '" + x + "' is not in the context");
    return it->second;
  }

  TypePtr need_kind(const ChannelCtx& g, const Name& x, TypeKind k, const ProcPtr& p, const char* what) {
    TypePtr a = need(g, x, p);
    if (a->kind != k)
      fail(ErrorKind::TypeMismatch, p, "channel '" + x + "' has type " + print(a) + ", expected " + what);
    return a;
  }

  void no_shadow(const ChannelCtx& g, const Name& y, const ProcPtr& p) {
    if (g.count(y)) fail(ErrorKind::LinearityViolation, p, "binder '" + y + "' shadows a channel in the context");
  }

  static Derivation node(Rule r, const ProcEnv& theta, ProcPtr proc, const ChannelCtx& gamma,
                         std::vector<Derivation> prem = {}) {
    return Derivation{r, {theta, std::move(proc), gamma}, std::move(prem), {}, {}, {}};
  }

  // Conclusion process rebuilt from the (elaborated) premise processes.
  static Derivation built(Rule r, const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma,
                          std::vector<Derivation> prem) {
    std::vector<ProcPtr> kids;
    for (auto& d : prem) kids.push_back(d.conclusion.process);
    ProcPtr proc = kids.empty() ? p : pr::with_kids(p, std::move(kids));
    return node(r, theta, std::move(proc), gamma, std::move(prem));
  }

  Part part_for(const ProcPtr& p, std::size_t i) {
    Scope sc = kid_scope(*p, i);
    Part pt;
    pt.fc = free_channels(p->kids[i]);
    pt.fpv = free_proc_vars(p->kids[i]);
    for (auto& b : sc.channels) { pt.fc.erase(b); pt.binds_ch.insert(b); }
    for (auto& b : sc.procvars) { pt.fpv.erase(b); pt.binds_pv.insert(b); }
    pt.absorb_ch = absorbs(p->kids[i], true);
    pt.absorb_pv = absorbs(p->kids[i], false);
    return pt;
  }

  // All ways to route the resources; more than one only when ⊤ must absorb.
  std::vector<Assignment> split(const ProcPtr& p, const ProcEnv& theta, const ChannelCtx& gamma,
                                const std::vector<Part>& parts) {
    std::size_t n = parts.size();
    Assignment base{std::vector<ChannelCtx>(n), std::vector<ProcEnv>(n)};
    std::vector<std::pair<bool, Name>> open; // unused linear resources (is_channel, name)
    std::vector<std::vector<std::size_t>> options;
    for (auto& [x, a] : gamma) {
      std::vector<std::size_t> users;
      for (std::size_t i = 0; i < n; ++i)
        if (parts[i].takes_channels && parts[i].fc.count(x)) users.push_back(i);
      if (users.size() > 1)
        fail(ErrorKind::LinearityViolation, p, "linear channel '" + x + "' is used in two parallel components");
      if (users.size() == 1) {
        base.gammas[users[0]][x] = a;
        continue;
      }
      std::vector<std::size_t> opts;
      for (std::size_t i = 0; i < n; ++i)
        if (parts[i].takes_channels && parts[i].absorb_ch && !parts[i].binds_ch.count(x)) opts.push_back(i);
      if (opts.empty()) fail(ErrorKind::LinearityViolation, p, "linear channel '" + x + "' is never used");
      open.emplace_back(true, x);
      options.push_back(opts);
    }
    for (auto& [q, c] : theta) {
      std::vector<std::size_t> users;
      for (std::size_t i = 0; i < n; ++i)
        if (parts[i].fpv.count(q)) users.push_back(i);
      if (users.size() > 1)
        fail(ErrorKind::LinearityViolation, p, "process variable '" + q + "' is used in two parallel components");
      if (users.size() == 1) {
        base.thetas[users[0]][q] = c;
        continue;
      }
      std::vector<std::size_t> opts;
      for (std::size_t i = 0; i < n; ++i)
        if (parts[i].absorb_pv && !parts[i].binds_pv.count(q)) opts.push_back(i);
      if (opts.empty()) fail(ErrorKind::LinearityViolation, p, "process variable '" + q + "' is never used");
      open.emplace_back(false, q);
      options.push_back(opts);
    }
    std::vector<Assignment> out;
    std::vector<std::size_t> choice(open.size(), 0);
    for (;;) {
      Assignment a = base;
      for (std::size_t k = 0; k < open.size(); ++k) {
        std::size_t i = options[k][choice[k]];
        if (open[k].first) a.gammas[i][open[k].second] = gamma.at(open[k].second);
        else a.thetas[i][open[k].second] = theta.at(open[k].second);
      }
      out.push_back(std::move(a));
      std::size_t k = 0;
      for (; k < open.size(); ++k) {
        if (++choice[k] < options[k].size()) break;
        choice[k] = 0;
      }
      if (k == open.size()) break;
    }
    return out;
  }

  template <class F>
  Derivation first_success(const std::vector<Assignment>& cands, F build) {
    std::optional<TypeError> first;
    for (auto& c : cands) {
      try {
        return build(c);
      } catch (const TypeError& e) {
        if (!first) first = e;
      }
    }
    throw *first;
  }

  // ?-typed channel free in two parts: rename apart and contract.
  std::optional<Derivation> contract_split(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma,
                                           const std::vector<Part>& parts) {
    for (auto& [x, a] : gamma) {
      if (!is_why_not(a)) continue;
      std::vector<std::size_t> users;
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].takes_channels && parts[i].fc.count(x)) users.push_back(i);
      if (users.size() < 2) continue;
      Name x1 = names.fresh(x), x2 = names.fresh(x);
      std::vector<ProcPtr> kids = p->kids;
      for (std::size_t u = 0; u < users.size(); ++u)
        kids[users[u]] = rename_channel(kids[users[u]], u == 0 ? x1 : x2, x);
      ProcPtr renamed = pr::with_kids(p, kids);
      ChannelCtx g = without(gamma, x);
      g[x1] = a;
      g[x2] = a;
      return contract(theta, gamma, check(theta, renamed, g), x, x1, x2);
    }
    return std::nullopt;
  }

  Derivation contract(const ProcEnv& theta, const ChannelCtx& gamma, Derivation prem, const Name& x,
                      const Name& x1, const Name& x2) {
    ProcPtr back = rename_channels(prem.conclusion.process, {{x1, x}, {x2, x}});
    Derivation d{Rule::Contract, {theta, back, gamma}, {}, x, x1, x2};
    d.premises.push_back(std::move(prem));
    return d;
  }

  Derivation dispatch(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma) {
    const Process& n = *p;
    switch (n.kind) {
    case ProcKind::Link: {
      if (n.x == n.y) fail(ErrorKind::LinearityViolation, p, "link endpoints must differ");
      TypePtr a = n.type ? n.type : need(gamma, n.y, p);
      if (opts_.atomic_axioms && !is_atomic(a))
        fail(ErrorKind::TypeMismatch, p, "non-atomic axiom at type " + print(a) + " (atomic-axiom mode)");
      TypePtr tx = need(gamma, n.x, p), tyy = need(gamma, n.y, p);
      if (gamma.size() != 2) fail(ErrorKind::LinearityViolation, p, "link uses exactly its two endpoints");
      if (!type_eq(tyy, a) || !type_eq(tx, dual(a)))
        fail(ErrorKind::TypeMismatch, p,
             "link " + n.x + " " + n.y + " : " + print(a) + " needs " + n.x + ":" + print(dual(a)) + ", " + n.y +
                 ":" + print(a));
      if (!theta.empty()) fail(ErrorKind::LinearityViolation, p, "link cannot use process variables");
      ProcPtr elab = n.type ? p : pr::at_pos(pr::link(n.x, n.y, a), n.pos);
      return node(Rule::Axiom, theta, elab, gamma);
    }
    case ProcKind::Close: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::One, p, "1");
      (void)a;
      if (gamma.size() != 1) fail(ErrorKind::LinearityViolation, p, "close leaves other channels unused");
      if (!theta.empty()) fail(ErrorKind::LinearityViolation, p, "close leaves process variables unused");
      return node(Rule::One, theta, p, gamma);
    }
    case ProcKind::Wait: {
      need_kind(gamma, n.x, TypeKind::Bot, p, "bot");
      auto d = check(theta, n.kids[0], without(gamma, n.x));
      std::vector<Derivation> prem;
      prem.push_back(std::move(d));
      return built(Rule::Bot, theta, p, gamma, std::move(prem));
    }
    case ProcKind::EmptyOffer:
      need_kind(gamma, n.x, TypeKind::Top, p, "top");
      return node(Rule::Top, theta, p, gamma);
    case ProcKind::Recv: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Par, p, "a par type");
      ChannelCtx g = without(gamma, n.x);
      no_shadow(g, n.y, p);
      g[n.y] = a->left;
      g[n.x] = a->right;
      if (n.x == n.y) fail(ErrorKind::LinearityViolation, p, "received channel shadows the subject");
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::Par, theta, p, gamma, std::move(prem));
    }
    case ProcKind::SelL: case ProcKind::SelR: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Plus, p, "a plus type");
      ChannelCtx g = gamma;
      bool left = n.kind == ProcKind::SelL;
      g[n.x] = left ? a->left : a->right;
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(left ? Rule::Plus1 : Rule::Plus2, theta, p, gamma, std::move(prem));
    }
    case ProcKind::Offer: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::With, p, "a with type");
      ChannelCtx gl = gamma, gr = gamma;
      gl[n.x] = a->left;
      gr[n.x] = a->right;
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], gl));
      prem.push_back(check(theta, n.kids[1], gr));
      return built(Rule::With, theta, p, gamma, std::move(prem));
    }
    case ProcKind::Client: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::WhyNot, p, "a why-not type");
      if (channel_free_in(n.x, n.kids[0]) && n.x != n.y) {
        Name x1 = names.fresh(n.x), x2 = names.fresh(n.x);
        ProcPtr renamed = pr::at_pos(pr::client(x1, n.y, rename_channel(n.kids[0], x2, n.x)), n.pos);
        ChannelCtx g = without(gamma, n.x);
        g[x1] = a;
        g[x2] = a;
        return contract(theta, gamma, check(theta, renamed, g), n.x, x1, x2);
      }
      ChannelCtx g = without(gamma, n.x);
      no_shadow(g, n.y, p);
      g[n.y] = a->left;
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::WhyNot, theta, p, gamma, std::move(prem));
    }
    case ProcKind::Server: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::OfCourse, p, "an of-course type");
      if (!theta.empty())
        fail(ErrorKind::NonExponentialServerContext, p, "a server cannot use process variables");
      for (auto& [z, b] : gamma)
        if (z != n.x && !is_why_not(b))
          fail(ErrorKind::NonExponentialServerContext, p,
               "server context channel '" + z + "' has non-exponential type " + print(b));
      ChannelCtx g = without(gamma, n.x);
      no_shadow(g, n.y, p);
      g[n.y] = a->left;
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::OfCourse, theta, p, gamma, std::move(prem));
    }
    case ProcKind::SendType: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Exists, p, "an existential type");
      if (opts_.cp_mode && !is_cp_type(n.type))
        fail(ErrorKind::Unsupported, p, "higher-order witness type in the first-order fragment");
      ChannelCtx g = gamma;
      g[n.x] = subst_type_var(a->left, n.type, a->var);
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::Exists, theta, p, gamma, std::move(prem));
    }
    case ProcKind::RecvType: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Forall, p, "a universal type");
      NameSet esc;
      for (auto& [z, b] : gamma)
        if (z != n.x)
          for (auto& v : free_type_vars(b)) esc.insert(v);
      for (auto& [q, c] : theta)
        for (auto& v : free_type_vars(c)) esc.insert(v);
      if (esc.count(n.var))
        fail(ErrorKind::TypeVarEscape, p, "type variable '" + n.var + "' occurs free in the context");
      ChannelCtx g = gamma;
      g[n.x] = subst_type_var(a->left, ty::var(n.var), a->var);
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::Forall, theta, p, gamma, std::move(prem));
    }
    case ProcKind::SendProc: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Provide, p, "a provide type");
      if (gamma.size() != 1)
        fail(ErrorKind::ContextNotEmpty, p, "sending an abstraction requires the context to hold only '" + n.x + "'");
      check_closed(n.record, n.kids[0], p);
      ChannelCtx g = instantiate_or_fail(a->ctx, n.record, p);
      std::vector<Derivation> prem;
      prem.push_back(check(theta, n.kids[0], g));
      return built(Rule::Provide, theta, p, gamma, std::move(prem));
    }
    case ProcKind::RecvProc: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Assume, p, "an assume type");
      if (theta.count(n.var))
        fail(ErrorKind::LinearityViolation, p, "process variable '" + n.var + "' shadows one in the context");
      ProcEnv t = theta;
      t[n.var] = a->ctx;
      std::vector<Derivation> prem;
      prem.push_back(check(t, n.kids[0], without(gamma, n.x)));
      return built(Rule::Assume, theta, p, gamma, std::move(prem));
    }
    case ProcKind::Invoke: {
      auto it = theta.find(n.var);
      if (it == theta.end()) fail(ErrorKind::UnknownName, p, "process variable '" + n.var + "' is not in the context");
      if (theta.size() != 1) fail(ErrorKind::LinearityViolation, p, "run leaves other process variables unused");
      ChannelCtx want = instantiate_or_fail(it->second, n.record, p);
      for (auto& [z, b] : want) {
        auto g = gamma.find(z);
        if (g == gamma.end()) fail(ErrorKind::UnknownName, p, "channel '" + z + "' is not in the context");
        if (!type_eq(g->second, b))
          fail(ErrorKind::TypeMismatch, p,
               "channel '" + z + "' has type " + print(g->second) + ", parameter expects " + print(b));
      }
      if (gamma.size() != want.size()) fail(ErrorKind::LinearityViolation, p, "run leaves channels unused");
      return node(Rule::Id, theta, p, gamma);
    }
    case ProcKind::Send: {
      TypePtr a = need_kind(gamma, n.x, TypeKind::Tensor, p, "a tensor type");
      if (n.x == n.y) fail(ErrorKind::LinearityViolation, p, "sent channel shadows the subject");
      ChannelCtx rest = without(gamma, n.x);
      std::vector<Part> parts{part_for(p, 0), part_for(p, 1)};
      // the subject continues in Q only
      if (parts[0].fc.count(n.x))
        fail(ErrorKind::LinearityViolation, p, "channel '" + n.x + "' is used while it sends");
      parts[1].fc.erase(n.x);
      parts[1].binds_ch.insert(n.x);
      if (auto d = contract_split(theta, p, gamma, parts)) return std::move(*d);
      return first_success(split(p, theta, rest, parts), [&](const Assignment& as) {
        ChannelCtx g0 = as.gammas[0], g1 = as.gammas[1];
        no_shadow(g0, n.y, p);
        g0[n.y] = a->left;
        g1[n.x] = a->right;
        std::vector<Derivation> prem;
        prem.push_back(check(as.thetas[0], n.kids[0], g0));
        prem.push_back(check(as.thetas[1], n.kids[1], g1));
        return built(Rule::Tensor, theta, p, gamma, std::move(prem));
      });
    }
    case ProcKind::Cut: {
      if (opts_.cp_mode && !is_cp_type(n.type))
        fail(ErrorKind::Unsupported, p, "higher-order cut type in the first-order fragment");
      std::vector<Part> parts{part_for(p, 0), part_for(p, 1)};
      if (auto d = contract_split(theta, p, gamma, parts)) return std::move(*d);
      return first_success(split(p, theta, gamma, parts), [&](const Assignment& as) {
        ChannelCtx g0 = as.gammas[0], g1 = as.gammas[1];
        no_shadow(g0, n.x, p);
        no_shadow(g1, n.y, p);
        g0[n.x] = n.type;
        g1[n.y] = dual(n.type);
        std::vector<Derivation> prem;
        prem.push_back(check(as.thetas[0], n.kids[0], g0));
        prem.push_back(check(as.thetas[1], n.kids[1], g1));
        return built(Rule::Cut, theta, p, gamma, std::move(prem));
      });
    }
    case ProcKind::ExplSubst: {
      if (theta.count(n.var))
        fail(ErrorKind::LinearityViolation, p, "process variable '" + n.var + "' shadows one in the context");
      check_closed(n.record, n.kids[1], p);
      std::vector<Part> parts{part_for(p, 0), part_for(p, 1)};
      parts[1].takes_channels = false;
      return first_success(split(p, theta, gamma, parts), [&](const Assignment& as) {
        ProcEnv t0 = as.thetas[0];
        t0[n.var] = n.params;
        std::vector<Derivation> prem;
        prem.push_back(check(t0, n.kids[0], as.gammas[0]));
        prem.push_back(check(as.thetas[1], n.kids[1], instantiate_or_fail(n.params, n.record, p)));
        return built(Rule::Chop, theta, p, gamma, std::move(prem));
      });
    }
    case ProcKind::MCut: {
      ChannelCtx eps = coherence_or_fail(n.global, p);
      if (eps.size() != n.endpoints.size())
        fail(ErrorKind::IncoherentGlobalType, p, "global type has " + std::to_string(eps.size()) +
                                                     " endpoints but the composition has " +
                                                     std::to_string(n.endpoints.size()) + " branches");
      for (auto& [e, t] : n.endpoints) {
        auto it = eps.find(e);
        if (it == eps.end()) fail(ErrorKind::IncoherentGlobalType, p, "endpoint '" + e + "' not in the global type");
        if (!type_eq(it->second, t))
          fail(ErrorKind::IncoherentGlobalType, p,
               "endpoint '" + e + "' annotated " + print(t) + " but the global type gives " + print(it->second));
      }
      std::vector<Part> parts;
      for (std::size_t i = 0; i < n.kids.size(); ++i) parts.push_back(part_for(p, i));
      if (auto d = contract_split(theta, p, gamma, parts)) return std::move(*d);
      return first_success(split(p, theta, gamma, parts), [&](const Assignment& as) {
        std::vector<Derivation> prem;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          ChannelCtx g = as.gammas[i];
          no_shadow(g, n.endpoints[i].first, p);
          g[n.endpoints[i].first] = n.endpoints[i].second;
          prem.push_back(check(as.thetas[i], n.kids[i], g));
        }
        return built(Rule::CCut, theta, p, gamma, std::move(prem));
      });
    }
    default:
      fail(ErrorKind::Unsupported, p, "unexpected construct");
    }
  }

  void check_closed(const ParamRecord& rho, const ProcPtr& body, const ProcPtr& p) {
    NameSet fc = free_channels(body);
    for (auto& z : rho.image())
      if (!fc.count(z))
        fail(ErrorKind::LinearityViolation, p, "abstraction parameter '" + z + "' is not used by its body");
    for (auto& z : fc)
      if (std::find(rho.image().begin(), rho.image().end(), z) == rho.image().end())
        fail(ErrorKind::ContextNotEmpty, p, "abstraction body uses channel '" + z + "' that is not a parameter");
  }

  ChannelCtx instantiate_or_fail(const ParamCtx& c, const ParamRecord& r, const ProcPtr& p) {
    try {
      return instantiate(c, r);
    } catch (const Error& e) {
      fail(ErrorKind::LabelMismatch, p, "record labels do not match the process type " + print(c));
    }
  }

  ChannelCtx coherence_or_fail(const GlobalPtr& g, const ProcPtr& p) {
    try {
      return check_coherence(g);
    } catch (const Error& e) {
      fail(ErrorKind::IncoherentGlobalType, p, e.message());
    }
  }
};

// ---------------------------------------------------------------------------
// coherence

[[noreturn]] void incoherent(const GlobalPtr& g, const std::string& msg) {
  throw TypeError(ErrorKind::IncoherentGlobalType, msg + " in " + print(g));
}

void distinct(const GlobalPtr& g, std::vector<Name> ns) {
  std::sort(ns.begin(), ns.end());
  if (std::adjacent_find(ns.begin(), ns.end()) != ns.end()) incoherent(g, "repeated endpoint");
}

TypePtr take(ChannelCtx& c, const Name& x, const GlobalPtr& g) {
  auto it = c.find(x);
  if (it == c.end()) incoherent(g, "endpoint '" + x + "' missing from a sub-derivation");
  TypePtr a = it->second;
  c.erase(it);
  return a;
}

} // namespace

bool can_absorb(const ProcPtr& p, bool channel) { return absorbs(p, channel); }

ChannelCtx check_coherence(const GlobalPtr& g) {
  ChannelCtx out;
  switch (g->kind) {
  case GlobalKind::CloseWait: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    for (auto& x : g->many) out[x] = ty::one();
    out[g->one] = ty::bot();
    return out;
  }
  case GlobalKind::OutIn: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    ChannelCtx tg = check_coherence(g->g), th = check_coherence(g->h);
    for (auto& x : g->many) out[x] = ty::tensor(take(tg, x, g), take(th, x, g));
    out[g->one] = ty::par(take(tg, g->one, g), take(th, g->one, g));
    if (!tg.empty()) incoherent(g, "left premise has extra endpoints");
    for (auto& [x, a] : th) out[x] = a;
    return out;
  }
  case GlobalKind::SelOffer: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    ChannelCtx tg = check_coherence(g->g), th = check_coherence(g->h);
    out[g->one] = ty::plus(take(tg, g->one, g), take(th, g->one, g));
    for (auto& y : g->many) out[y] = ty::with(take(tg, y, g), take(th, y, g));
    if (!ctx_eq(tg, th)) incoherent(g, "branches disagree on the shared context");
    for (auto& [x, a] : tg) out[x] = a;
    return out;
  }
  case GlobalKind::EmptyChoice: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    out[g->one] = ty::zero();
    for (auto& y : g->many) out[y] = ty::top();
    return out;
  }
  case GlobalKind::Bang: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    ChannelCtx tg = check_coherence(g->g);
    out[g->one] = ty::why_not(take(tg, g->one, g));
    for (auto& y : g->many) out[y] = ty::of_course(take(tg, y, g));
    if (!tg.empty()) incoherent(g, "replication with extra endpoints");
    return out;
  }
  case GlobalKind::TypeComm: {
    auto all = g->many;
    all.push_back(g->one);
    distinct(g, all);
    ChannelCtx tg = check_coherence(g->g);
    out[g->one] = ty::exists(g->tvar, take(tg, g->one, g));
    for (auto& y : g->many) out[y] = ty::forall(g->tvar, take(tg, y, g));
    for (auto& [x, a] : tg) {
      if (free_type_vars(a).count(g->tvar)) incoherent(g, "type variable escapes");
      out[x] = a;
    }
    return out;
  }
  case GlobalKind::Axiom:
    if (g->one == g->many.at(0)) incoherent(g, "repeated endpoint");
    out[g->one] = g->type;
    out[g->many.at(0)] = dual(g->type);
    return out;
  case GlobalKind::ProvideAssume:
    if (g->one == g->many.at(0)) incoherent(g, "repeated endpoint");
    out[g->one] = ty::provide(g->params);
    out[g->many.at(0)] = ty::assume(g->params);
    return out;
  }
  return out;
}

Derivation typecheck(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma, const CheckOptions& opts) {
  Checker c(opts);
  c.names.reserve_all(p);
  for (auto& [x, a] : gamma) c.names.reserve(x);
  for (auto& [q, d] : theta) c.names.reserve(q);
  return c.check(theta, p, gamma);
}

Derivation typecheck_ccut(const GlobalPtr& g, const std::vector<CCutBranch>& branches,
                          const std::vector<ProcEnv>& thetas, const std::vector<ChannelCtx>& gammas,
                          const CheckOptions& opts) {
  ChannelCtx eps = check_coherence(g);
  if (branches.size() != eps.size() || thetas.size() != branches.size() || gammas.size() != branches.size())
    throw TypeError(ErrorKind::IncoherentGlobalType, "the number of branches does not match the global type");
  ProcEnv theta;
  ChannelCtx gamma;
  std::vector<std::pair<Name, TypePtr>> endpoints;
  std::vector<ProcPtr> kids;
  std::vector<Derivation> prem;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    auto it = eps.find(branches[i].channel);
    if (it == eps.end())
      throw TypeError(ErrorKind::IncoherentGlobalType, "endpoint '" + branches[i].channel + "' not in the global type");
    for (auto& [q, c] : thetas[i])
      if (!theta.emplace(q, c).second)
        throw TypeError(ErrorKind::LinearityViolation, "process variable '" + q + "' shared between branches");
    for (auto& [x, a] : gammas[i])
      if (!gamma.emplace(x, a).second)
        throw TypeError(ErrorKind::LinearityViolation, "channel '" + x + "' shared between branches");
    ChannelCtx gi = gammas[i];
    if (gi.count(branches[i].channel))
      throw TypeError(ErrorKind::LinearityViolation, "endpoint '" + branches[i].channel + "' already in context");
    gi[branches[i].channel] = it->second;
    prem.push_back(typecheck(thetas[i], branches[i].process, gi, opts));
    endpoints.emplace_back(branches[i].channel, it->second);
    kids.push_back(prem.back().conclusion.process);
  }
  Derivation d{Rule::CCut, {theta, pr::mcut(g, endpoints, kids), gamma}, std::move(prem), {}, {}, {}};
  return d;
}

// ---------------------------------------------------------------------------
// literal validation

namespace {

struct Validator {
  CheckOptions opts;

  [[noreturn]] static void bad(const Derivation& d, const std::string& msg) {
    throw TypeError(ErrorKind::NotWellFormed,
                    std::string("invalid ") + rule_name(d.rule) + " node at '" + show(d.conclusion.process) + "': " + msg,
                    d.conclusion.process->pos);
  }

  static ChannelCtx merge(const Derivation& d, const ChannelCtx& a, const ChannelCtx& b) {
    ChannelCtx out = a;
    for (auto& [x, t] : b)
      if (!out.emplace(x, t).second) bad(d, "channel '" + x + "' in both premises");
    return out;
  }
  static ProcEnv merge(const Derivation& d, const ProcEnv& a, const ProcEnv& b) {
    ProcEnv out = a;
    for (auto& [x, t] : b)
      if (!out.emplace(x, t).second) bad(d, "process variable '" + x + "' in both premises");
    return out;
  }
  static bool theta_eq(const ProcEnv& a, const ProcEnv& b) {
    if (a.size() != b.size()) return false;
    for (auto& [q, c] : a) {
      auto it = b.find(q);
      if (it == b.end() || !ctx_eq(c, it->second)) return false;
    }
    return true;
  }
  // Removes x : a from c, failing unless present with that type.
  static ChannelCtx take(const Derivation& d, ChannelCtx c, const Name& x, const TypePtr& a) {
    auto it = c.find(x);
    if (it == c.end()) bad(d, "premise lacks '" + x + "'");
    if (!type_eq(it->second, a)) bad(d, "'" + x + "' has type " + print(it->second) + ", expected " + print(a));
    c.erase(it);
    return c;
  }
  static TypePtr get(const Derivation& d, const ChannelCtx& c, const Name& x, TypeKind k) {
    auto it = c.find(x);
    if (it == c.end()) bad(d, "conclusion lacks '" + x + "'");
    if (it->second->kind != k) bad(d, "'" + x + "' has the wrong connective");
    return it->second;
  }
  static void arity(const Derivation& d, std::size_t n, ProcKind k) {
    if (d.premises.size() != n) bad(d, "wrong number of premises");
    if (d.conclusion.process->kind != k) bad(d, "rule does not match the process");
  }
  static void same_proc(const Derivation& d, const Derivation& prem, const ProcPtr& kid) {
    if (!alpha_eq(prem.conclusion.process, kid)) bad(d, "premise is about a different process");
  }
  static void same_theta(const Derivation& d, const Derivation& prem) {
    if (!theta_eq(d.conclusion.theta, prem.conclusion.theta)) bad(d, "premise has a different process context");
  }
  static void same_gamma(const Derivation& d, const ChannelCtx& a, const ChannelCtx& b) {
    if (!ctx_eq(a, b)) bad(d, "contexts differ: {" + print(a) + "} vs {" + print(b) + "}");
  }

  void run(const Derivation& d) {
    for (auto& p : d.premises) run(p);
    const ProcPtr& P = d.conclusion.process;
    const Process& n = *P;
    const ChannelCtx& G = d.conclusion.gamma;
    const ProcEnv& T = d.conclusion.theta;
    if (opts.cp_mode) {
      if (!T.empty()) bad(d, "process variables in the first-order fragment");
      for (auto& [x, a] : G)
        if (!is_cp_type(a)) bad(d, "higher-order type in the first-order fragment");
    }
    auto prem = [&](std::size_t i) -> const Derivation& { return d.premises.at(i); };
    auto pg = [&](std::size_t i) -> const ChannelCtx& { return prem(i).conclusion.gamma; };
    auto pt = [&](std::size_t i) -> const ProcEnv& { return prem(i).conclusion.theta; };
    switch (d.rule) {
    case Rule::Axiom: {
      arity(d, 0, ProcKind::Link);
      if (!n.type) bad(d, "link without a type");
      if (opts.atomic_axioms && !is_atomic(n.type)) bad(d, "non-atomic axiom");
      if (!T.empty()) bad(d, "axiom with process variables");
      if (n.x == n.y) bad(d, "link endpoints coincide");
      same_gamma(d, G, ChannelCtx{{n.x, dual(n.type)}, {n.y, n.type}});
      break;
    }
    case Rule::Cut: {
      arity(d, 2, ProcKind::Cut);
      same_proc(d, prem(0), n.kids[0]);
      same_proc(d, prem(1), n.kids[1]);
      ChannelCtx a = take(d, pg(0), n.x, n.type), b = take(d, pg(1), n.y, dual(n.type));
      same_gamma(d, G, merge(d, a, b));
      if (!theta_eq(T, merge(d, pt(0), pt(1)))) bad(d, "process contexts do not split");
      break;
    }
    case Rule::Tensor: {
      arity(d, 2, ProcKind::Send);
      same_proc(d, prem(0), n.kids[0]);
      same_proc(d, prem(1), n.kids[1]);
      TypePtr t = get(d, G, n.x, TypeKind::Tensor);
      ChannelCtx a = take(d, pg(0), n.y, t->left), b = take(d, pg(1), n.x, t->right);
      same_gamma(d, without(G, n.x), merge(d, a, b));
      if (!theta_eq(T, merge(d, pt(0), pt(1)))) bad(d, "process contexts do not split");
      break;
    }
    case Rule::Par: {
      arity(d, 1, ProcKind::Recv);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, TypeKind::Par);
      ChannelCtx a = take(d, take(d, pg(0), n.y, t->left), n.x, t->right);
      same_gamma(d, without(G, n.x), a);
      break;
    }
    case Rule::Plus1: case Rule::Plus2: {
      arity(d, 1, d.rule == Rule::Plus1 ? ProcKind::SelL : ProcKind::SelR);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, TypeKind::Plus);
      ChannelCtx a = take(d, pg(0), n.x, d.rule == Rule::Plus1 ? t->left : t->right);
      same_gamma(d, without(G, n.x), a);
      break;
    }
    case Rule::With: {
      arity(d, 2, ProcKind::Offer);
      TypePtr t = get(d, G, n.x, TypeKind::With);
      for (std::size_t i = 0; i < 2; ++i) {
        same_proc(d, prem(i), n.kids[i]);
        same_theta(d, prem(i));
        same_gamma(d, without(G, n.x), take(d, pg(i), n.x, i == 0 ? t->left : t->right));
      }
      break;
    }
    case Rule::Top:
      arity(d, 0, ProcKind::EmptyOffer);
      get(d, G, n.x, TypeKind::Top);
      break;
    case Rule::WhyNot: case Rule::OfCourse: {
      bool client = d.rule == Rule::WhyNot;
      arity(d, 1, client ? ProcKind::Client : ProcKind::Server);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, client ? TypeKind::WhyNot : TypeKind::OfCourse);
      same_gamma(d, without(G, n.x), take(d, pg(0), n.y, t->left));
      if (!client) {
        if (!T.empty()) bad(d, "server with process variables");
        for (auto& [z, b] : G)
          if (z != n.x && !is_why_not(b)) bad(d, "server context is not exponential");
      }
      break;
    }
    case Rule::Exists: {
      arity(d, 1, ProcKind::SendType);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, TypeKind::Exists);
      same_gamma(d, without(G, n.x), take(d, pg(0), n.x, subst_type_var(t->left, n.type, t->var)));
      break;
    }
    case Rule::Forall: {
      arity(d, 1, ProcKind::RecvType);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, TypeKind::Forall);
      for (auto& [z, b] : G)
        if (z != n.x && free_type_vars(b).count(n.var)) bad(d, "type variable escapes");
      for (auto& [q, c] : T)
        if (free_type_vars(c).count(n.var)) bad(d, "type variable escapes");
      same_gamma(d, without(G, n.x), take(d, pg(0), n.x, subst_type_var(t->left, ty::var(n.var), t->var)));
      break;
    }
    case Rule::Weaken: {
      if (d.premises.size() != 1) bad(d, "wrong number of premises");
      same_proc(d, prem(0), P);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, d.x, TypeKind::WhyNot);
      if (pg(0).count(d.x)) bad(d, "weakened channel already present");
      same_gamma(d, take(d, G, d.x, t), pg(0));
      break;
    }
    case Rule::Contract: {
      if (d.premises.size() != 1) bad(d, "wrong number of premises");
      same_theta(d, prem(0));
      TypePtr t = get(d, G, d.x, TypeKind::WhyNot);
      ChannelCtx rest = take(d, take(d, pg(0), d.y, t), d.z, t);
      if (rest.count(d.x) || d.y == d.z) bad(d, "contracted names clash");
      same_gamma(d, without(G, d.x), rest);
      if (!alpha_eq(P, rename_channels(prem(0).conclusion.process, {{d.y, d.x}, {d.z, d.x}})))
        bad(d, "conclusion is not the premise with names identified");
      break;
    }
    case Rule::One:
      arity(d, 0, ProcKind::Close);
      if (!T.empty()) bad(d, "close with process variables");
      same_gamma(d, G, ChannelCtx{{n.x, ty::one()}});
      break;
    case Rule::Bot: {
      arity(d, 1, ProcKind::Wait);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      get(d, G, n.x, TypeKind::Bot);
      same_gamma(d, without(G, n.x), pg(0));
      break;
    }
    case Rule::Id: {
      arity(d, 0, ProcKind::Invoke);
      if (T.size() != 1 || !T.count(n.var)) bad(d, "process context must hold exactly the invoked variable");
      same_gamma(d, G, instantiate(T.at(n.var), n.record));
      break;
    }
    case Rule::Chop: {
      arity(d, 2, ProcKind::ExplSubst);
      same_proc(d, prem(0), n.kids[0]);
      same_proc(d, prem(1), n.kids[1]);
      same_gamma(d, G, pg(0));
      same_gamma(d, pg(1), instantiate(n.params, n.record));
      ProcEnv t0 = pt(0);
      auto it = t0.find(n.var);
      if (it == t0.end() || !ctx_eq(it->second, n.params)) bad(d, "continuation does not assume the variable");
      t0.erase(it);
      if (!theta_eq(T, merge(d, t0, pt(1)))) bad(d, "process contexts do not split");
      break;
    }
    case Rule::Provide: {
      arity(d, 1, ProcKind::SendProc);
      same_proc(d, prem(0), n.kids[0]);
      same_theta(d, prem(0));
      TypePtr t = get(d, G, n.x, TypeKind::Provide);
      if (G.size() != 1) bad(d, "context must hold only the subject");
      same_gamma(d, pg(0), instantiate(t->ctx, n.record));
      break;
    }
    case Rule::Assume: {
      arity(d, 1, ProcKind::RecvProc);
      same_proc(d, prem(0), n.kids[0]);
      TypePtr t = get(d, G, n.x, TypeKind::Assume);
      ProcEnv want = T;
      if (!want.emplace(n.var, t->ctx).second) bad(d, "process variable clash");
      if (!theta_eq(pt(0), want)) bad(d, "premise does not assume the received variable");
      same_gamma(d, without(G, n.x), pg(0));
      break;
    }
    case Rule::CCut: {
      arity(d, n.kids.size(), ProcKind::MCut);
      ChannelCtx eps = check_coherence(n.global);
      if (eps.size() != n.endpoints.size()) bad(d, "arity mismatch with the global type");
      ChannelCtx all;
      ProcEnv thetas;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        same_proc(d, prem(i), n.kids[i]);
        const Name& e = n.endpoints[i].first;
        if (!eps.count(e)) bad(d, "endpoint not in the global type");
        all = merge(d, all, take(d, pg(i), e, eps.at(e)));
        thetas = merge(d, thetas, pt(i));
      }
      same_gamma(d, G, all);
      if (!theta_eq(T, thetas)) bad(d, "process contexts do not split");
      break;
    }
    }
  }
};

} // namespace

void validate(const Derivation& d, const CheckOptions& opts) { Validator{opts}.run(d); }

} // namespace chop
