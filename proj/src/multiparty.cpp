#include "chop/semantics.hpp"
#include "chop/typetheory.hpp"

#include <algorithm>

// Reduction of coherence compositions: one principal step per global type
// constructor, plus moving a branch's unrelated prefix outside the composition.

namespace chop {

namespace {

using Branches = std::vector<std::pair<Name, ProcPtr>>;

Branches branches_of(const Process& m) {
  Branches bs;
  for (std::size_t i = 0; i < m.kids.size(); ++i) bs.emplace_back(m.endpoints[i].first, m.kids[i]);
  return bs;
}

int index_of(const Process& m, const Name& x) {
  for (std::size_t i = 0; i < m.endpoints.size(); ++i)
    if (m.endpoints[i].first == x) return static_cast<int>(i);
  return -1;
}

const ProcPtr* branch(const Process& m, const Name& x) {
  int i = index_of(m, x);
  return i < 0 ? nullptr : &m.kids[i];
}

bool ready(const Process& m, const Name& x, ProcKind k) {
  const ProcPtr* b = branch(m, x);
  return b && (*b)->kind == k && (*b)->x == x;
}

bool all_ready(const Process& m, const std::vector<Name>& xs, ProcKind k) {
  return std::all_of(xs.begin(), xs.end(), [&](const Name& x) { return ready(m, x, k); });
}

Step principal(ProcPtr r, const std::string& rule) { return {std::move(r), {StepFamily::Principal, rule, {}}, priority::principal}; }

std::string prefix_name(ProcKind k) {
  switch (k) {
  case ProcKind::Send: return "⊗";
  case ProcKind::Recv: return "⅋";
  case ProcKind::SelL: case ProcKind::SelR: return "⊕";
  case ProcKind::Offer: return "&";
  case ProcKind::EmptyOffer: return "⊤";
  case ProcKind::Client: return "?";
  case ProcKind::SendType: return "∃";
  case ProcKind::RecvType: return "∀";
  case ProcKind::Wait: return "⊥";
  case ProcKind::RecvProc: return "⌊⌋";
  default: return "?";
  }
}

} // namespace

std::vector<Step> Engine::mcut_steps(const ProcPtr& p, const ChannelCtx&) {
  std::vector<Step> out;
  const Process& m = *p;
  const Global& g = *m.global;
  auto at = [&](const Name& x) -> const Process& { return **branch(m, x); };

  switch (g.kind) {
  case GlobalKind::CloseWait:
    if (all_ready(m, g.many, ProcKind::Close) && ready(m, g.one, ProcKind::Wait))
      out.push_back(principal(at(g.one).kids[0], "ccut-1⊥"));
    break;

  case GlobalKind::OutIn:
    if (all_ready(m, g.many, ProcKind::Send) && ready(m, g.one, ProcKind::Recv)) {
      std::map<Name, Name> ren;
      Branches outer, inner;
      for (auto& [x, q] : branches_of(m)) {
        if (x == g.one) {
          Name v = names_.fresh(q->y);
          ren[x] = v;
          outer.emplace_back(v, rename_channel(q->kids[0], v, q->y));
          inner.emplace_back(x, rename_channel(q->kids[0], v, q->y));
        } else if (std::find(g.many.begin(), g.many.end(), x) != g.many.end()) {
          Name u = names_.fresh(q->y);
          ren[x] = u;
          outer.emplace_back(u, rename_channel(q->kids[0], u, q->y));
          inner.emplace_back(x, q->kids[1]);
        } else {
          inner.emplace_back(x, q);
        }
      }
      // The receiver's continuation lives in the inner composition; its
      // received endpoint is the outer composition's endpoint for y.
      Branches top;
      for (auto& [x, q] : outer)
        if (x != ren[g.one]) top.emplace_back(x, q);
      ProcPtr rest = make_mcut(g.h, inner);
      top.emplace_back(ren[g.one], rest);
      out.push_back(principal(make_mcut(rename_global_names(g.g, ren, {}), top), "ccut-⊗⅋"));
    }
    break;

  case GlobalKind::SelOffer: {
    bool left = ready(m, g.one, ProcKind::SelL);
    if ((left || ready(m, g.one, ProcKind::SelR)) && all_ready(m, g.many, ProcKind::Offer)) {
      Branches bs;
      for (auto& [x, q] : branches_of(m)) {
        if (x == g.one) bs.emplace_back(x, q->kids[0]);
        else if (std::find(g.many.begin(), g.many.end(), x) != g.many.end()) bs.emplace_back(x, q->kids[left ? 0 : 1]);
        else bs.emplace_back(x, q);
      }
      out.push_back(principal(make_mcut(left ? g.g : g.h, bs), left ? "ccut-⊕&-left" : "ccut-⊕&-right"));
    }
    break;
  }

  case GlobalKind::EmptyChoice:
    break;

  case GlobalKind::Bang: {
    if (!all_ready(m, g.many, ProcKind::Server) || !branch(m, g.one)) break;
    const ProcPtr& px = *branch(m, g.one);
    std::size_t uses = count_uses(px, g.one);
    if (uses == 0) {
      out.push_back(principal(px, "ccut-?!-weaken"));
    } else if (px->kind == ProcKind::Client && px->x == g.one && !channel_free_in(g.one, px->kids[0])) {
      std::map<Name, Name> ren;
      Branches bs;
      for (auto& [x, q] : branches_of(m)) {
        if (x == g.one || std::find(g.many.begin(), g.many.end(), x) != g.many.end()) {
          Name u = names_.fresh(q->y);
          ren[x] = u;
          bs.emplace_back(u, rename_channel(q->kids[0], u, q->y));
        } else {
          bs.emplace_back(x, q);
        }
      }
      out.push_back(principal(make_mcut(rename_global_names(g.g, ren, {}), bs), "ccut-?!"));
    } else if (uses >= 2) {
      Name x1 = names_.fresh(g.one), x2 = names_.fresh(g.one);
      ProcPtr split = split_uses(px, g.one, x1, x2);
      auto copy = [&](const Name& xk, ProcPtr client_side) {
        std::map<Name, Name> ren{{g.one, xk}};
        Branches bs{{xk, client_side}};
        for (auto& y : g.many) {
          Name yk = names_.fresh(y);
          ren[y] = yk;
          bs.emplace_back(yk, rename_channel(*branch(m, y), yk, y));
        }
        return make_mcut(rename_global_names(m.global, ren, {}), bs);
      };
      ProcPtr inner = copy(x2, split);
      out.push_back(principal(copy(x1, inner), "ccut-?!-contract"));
    }
    break;
  }

  case GlobalKind::TypeComm:
    if (ready(m, g.one, ProcKind::SendType) && all_ready(m, g.many, ProcKind::RecvType)) {
      TypePtr b = at(g.one).type;
      Branches bs;
      for (auto& [x, q] : branches_of(m)) {
        if (x == g.one) {
          bs.emplace_back(x, q->kids[0]);
        } else if (std::find(g.many.begin(), g.many.end(), x) != g.many.end()) {
          Subst s;
          s.tvar[q->var] = b;
          bs.emplace_back(x, substitute(q->kids[0], s, names_));
        } else {
          bs.emplace_back(x, q);
        }
      }
      out.push_back(principal(make_mcut(rename_global_names(g.g, {}, {{g.tvar, b}}), bs), "ccut-∃∀"));
    }
    break;

  case GlobalKind::Axiom: {
    const Name& y = g.many.at(0);
    if (m.kids.size() == 2 && branch(m, g.one) && branch(m, y))
      out.push_back(principal(pr::cut(g.one, g.type, y, *branch(m, g.one), *branch(m, y)), "ccut-axiom"));
    break;
  }

  case GlobalKind::ProvideAssume: {
    const Name& y = g.many.at(0);
    if (ready(m, g.one, ProcKind::SendProc) && ready(m, y, ProcKind::RecvProc)) {
      const Process& s = at(g.one);
      const Process& r = at(y);
      out.push_back(principal(pr::expl_subst(r.kids[0], r.var, s.record, s.kids[0], g.params), "ccut-⌈⌉⌊⌋"));
    }
    break;
  }
  }

  for (std::size_t i = 0; i < m.kids.size(); ++i) {
    const Name& e = m.endpoints[i].first;
    const ProcPtr& k = m.kids[i];
    if (k->kind == ProcKind::Link && (k->x == e || k->y == e) && k->type && !is_atomic(k->type)) {
      out.push_back({pr::with_kid(p, i, eta_expand_link(k->x, k->y, k->type, names_)),
                     {StepFamily::Eta, "η-ccut", {}},
                     priority::eta});
      continue;
    }
    switch (k->kind) {
    case ProcKind::Send: case ProcKind::Recv: case ProcKind::SelL: case ProcKind::SelR: case ProcKind::Offer:
    case ProcKind::EmptyOffer: case ProcKind::Client: case ProcKind::SendType: case ProcKind::RecvType:
    case ProcKind::Wait: case ProcKind::RecvProc:
      break;
    default:
      continue;
    }
    bool own = false;
    for (auto& u : channel_uses(*k)) own = own || u == e;
    if (own) continue;

    NameSet bad_ch, bad_pv, bad_tv = free_type_vars(p);
    for (auto& [x, a] : m.endpoints) bad_ch.insert(x);
    for (std::size_t j = 0; j < m.kids.size(); ++j) {
      if (j == i) continue;
      auto fc = free_channels(m.kids[j]);
      bad_ch.insert(fc.begin(), fc.end());
      auto fp = free_proc_vars(m.kids[j]);
      bad_pv.insert(fp.begin(), fp.end());
    }
    ProcPtr kf = freshen(k, bad_ch, bad_pv, bad_tv);
    auto in = [&](const ProcPtr& cont) { return pr::with_kid(p, i, cont); };
    std::string rule = "ccut-commute-" + prefix_name(k->kind);
    ProcPtr result;
    if (kf->kind == ProcKind::EmptyOffer) {
      result = kf;
    } else if (kf->kind == ProcKind::Offer) {
      result = pr::offer(kf->x, in(kf->kids[0]), in(kf->kids[1]));
    } else if (kf->kind == ProcKind::Send) {
      auto bound_here = [&](std::size_t j) {
        auto sc = kid_scope(*kf, j).channels;
        return std::find(sc.begin(), sc.end(), e) != sc.end();
      };
      std::size_t j = (!bound_here(0) && channel_free_in(e, kf->kids[0])) ? 0
                      : channel_free_in(e, kf->kids[1])                   ? 1
                      : can_absorb(kf->kids[0], true)                     ? 0
                                                                          : 1;
      result = pr::with_kid(kf, j, in(kf->kids[j]));
    } else {
      result = pr::with_kid(kf, 0, in(kf->kids[0]));
    }
    out.push_back({result, {StepFamily::Commute, rule, {}}, priority::commute});
  }
  return out;
}

} // namespace chop
