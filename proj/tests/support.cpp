#include "support.hpp"

#include "chop/typetheory.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace chop::testing {

namespace fs = std::filesystem;

std::vector<CorpusFile> corpus_files(bool invalid) {
  fs::path dir = fs::path(CHOP_CORPUS_DIR) / (invalid ? "invalid" : "");
  std::vector<CorpusFile> out;
  for (auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".chop") continue;
    std::ifstream f(e.path());
    std::stringstream ss;
    ss << f.rdbuf();
    CorpusFile c{e.path().string(), e.path().stem().string(), ss.str(), {}};
    const std::string tag = "# expect: ";
    if (c.text.rfind(tag, 0) == 0) c.expect = c.text.substr(tag.size(), c.text.find('\n') - tag.size());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.name < b.name; });
  return out;
}

std::vector<CorpusDecl> corpus_decls() {
  std::vector<CorpusDecl> out;
  for (auto& f : corpus_files()) {
    Program p = desugar(parse_program(f.text));
    for (auto& d : p.decls) out.push_back({f.name, d});
  }
  return out;
}

bool is_closed(const Declaration& d) { return d.theta.empty() && free_proc_vars(d.body).empty(); }

namespace {

bool exponential_type(const TypePtr& a) {
  if (!a) return false;
  if (a->kind == TypeKind::WhyNot || a->kind == TypeKind::OfCourse) return true;
  for (auto& [l, t] : a->ctx)
    if (exponential_type(t)) return true;
  return exponential_type(a->left) || exponential_type(a->right);
}

} // namespace

bool has_exponentials(const ProcPtr& p) {
  if (p->kind == ProcKind::Client || p->kind == ProcKind::Server) return true;
  if (exponential_type(p->type)) return true;
  for (auto& [l, t] : p->params)
    if (exponential_type(t)) return true;
  for (auto& [e, t] : p->endpoints)
    if (exponential_type(t)) return true;
  for (auto& k : p->kids)
    if (has_exponentials(k)) return true;
  return false;
}

TypePtr TypeGen::operator()(int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  if (depth <= 1 || pick(4) == 0) {
    switch (pick(6)) {
    case 0: return ty::var("X");
    case 1: return ty::dual_var("X");
    case 2: return ty::zero();
    case 3: return ty::top();
    case 4: return ty::one();
    default: return ty::bot();
    }
  }
  int d = depth - 1;
  switch (pick(higher_order ? 10 : 8)) {
  case 0: return ty::tensor((*this)(d), (*this)(d));
  case 1: return ty::par((*this)(d), (*this)(d));
  case 2: return ty::plus((*this)(d), (*this)(d));
  case 3: return ty::with((*this)(d), (*this)(d));
  case 4: return ty::why_not((*this)(d));
  case 5: return ty::of_course((*this)(d));
  case 6: return ty::exists("X", (*this)(d));
  case 7: return ty::forall("X", (*this)(d));
  default: {
    std::vector<ParamCtx::Entry> es{{"l", (*this)(d)}};
    if (pick(2)) es.emplace_back("m", (*this)(d));
    ParamCtx c(std::move(es));
    return pick(2) ? ty::provide(c) : ty::assume(c);
  }
  }
}

std::vector<TypePtr> all_types(int depth) {
  std::vector<TypePtr> level{ty::var("X"), ty::dual_var("X"), ty::zero(), ty::top(), ty::one(), ty::bot()};
  for (int d = 2; d <= depth; ++d) {
    std::vector<TypePtr> next{ty::var("X"), ty::dual_var("X"), ty::zero(), ty::top(), ty::one(), ty::bot()};
    for (auto& a : level) {
      next.push_back(ty::why_not(a));
      next.push_back(ty::of_course(a));
      next.push_back(ty::exists("X", a));
      next.push_back(ty::forall("X", a));
    }
    for (auto& a : level)
      for (auto& b : level) {
        next.push_back(ty::tensor(a, b));
        next.push_back(ty::par(a, b));
        next.push_back(ty::plus(a, b));
        next.push_back(ty::with(a, b));
      }
    level = std::move(next);
  }
  return level;
}

namespace {

using Parts = std::vector<std::pair<ProcEnv, ChannelCtx>>;

bool is_kind(const TypePtr& a, TypeKind k) { return a && a->kind == k; }

TypePtr at(const ChannelCtx& g, const Name& x) {
  auto it = g.find(x);
  return it == g.end() ? nullptr : it->second;
}

ChannelCtx minus(ChannelCtx g, const Name& x) {
  g.erase(x);
  return g;
}

ChannelCtx with(ChannelCtx g, const Name& x, const TypePtr& a) {
  g[x] = a;
  return g;
}

bool only_why_not(const ChannelCtx& g) {
  return std::all_of(g.begin(), g.end(), [](auto& e) { return is_kind(e.second, TypeKind::WhyNot); });
}

// Calls f on every distribution of theta and gamma over n parts until it
// returns true. A ?-typed channel goes to any subset of parts.
bool each_split(const ProcEnv& theta, const ChannelCtx& gamma, std::size_t n, const std::function<bool(const Parts&)>& f) {
  std::vector<std::pair<Name, TypePtr>> chans(gamma.begin(), gamma.end());
  std::vector<std::pair<Name, ParamCtx>> vars(theta.begin(), theta.end());
  Parts parts(n);
  std::function<bool(std::size_t)> vars_from = [&](std::size_t i) -> bool {
    if (i == vars.size()) return f(parts);
    for (std::size_t k = 0; k < n; ++k) {
      parts[k].first.insert(vars[i]);
      bool ok = vars_from(i + 1);
      parts[k].first.erase(vars[i].first);
      if (ok) return true;
    }
    return false;
  };
  std::function<bool(std::size_t)> chans_from = [&](std::size_t i) -> bool {
    if (i == chans.size()) return vars_from(0);
    auto& [x, a] = chans[i];
    if (is_kind(a, TypeKind::WhyNot)) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        for (std::size_t k = 0; k < n; ++k)
          if (mask >> k & 1) parts[k].second[x] = a;
        bool ok = chans_from(i + 1);
        for (std::size_t k = 0; k < n; ++k) parts[k].second.erase(x);
        if (ok) return true;
      }
      return false;
    }
    for (std::size_t k = 0; k < n; ++k) {
      parts[k].second[x] = a;
      bool ok = chans_from(i + 1);
      parts[k].second.erase(x);
      if (ok) return true;
    }
    return false;
  };
  return chans_from(0);
}

bool same_ctx_up_to_weakening(const ChannelCtx& g, const ChannelCtx& want) {
  for (auto& [x, a] : want) {
    auto t = at(g, x);
    if (!t || !type_eq(t, a)) return false;
  }
  for (auto& [x, a] : g)
    if (!want.count(x) && !is_kind(a, TypeKind::WhyNot)) return false;
  return true;
}

bool labels_match(const ParamCtx& c, const ParamRecord& r) { return c.labels() == r.preimage(); }

bool check(const ProcEnv& th, const ProcPtr& p, const ChannelCtx& g) {
  const Process& n = *p;
  TypePtr tx = at(g, n.x);
  switch (n.kind) {
  case ProcKind::Link:
    return n.type && n.x != n.y && th.empty() &&
           same_ctx_up_to_weakening(g, {{n.x, dual(n.type)}, {n.y, n.type}});
  case ProcKind::Close:
    return th.empty() && same_ctx_up_to_weakening(g, {{n.x, ty::one()}});
  case ProcKind::Wait:
    return is_kind(tx, TypeKind::Bot) && check(th, n.kids[0], minus(g, n.x));
  case ProcKind::EmptyOffer:
    return is_kind(tx, TypeKind::Top);
  case ProcKind::Send:
    if (!is_kind(tx, TypeKind::Tensor) || g.count(n.y)) return false;
    return each_split(th, minus(g, n.x), 2, [&](const Parts& ps) {
      return check(ps[0].first, n.kids[0], with(ps[0].second, n.y, tx->left)) &&
             check(ps[1].first, n.kids[1], with(ps[1].second, n.x, tx->right));
    });
  case ProcKind::Recv:
    if (!is_kind(tx, TypeKind::Par) || g.count(n.y)) return false;
    return check(th, n.kids[0], with(with(minus(g, n.x), n.y, tx->left), n.x, tx->right));
  case ProcKind::SelL:
    return is_kind(tx, TypeKind::Plus) && check(th, n.kids[0], with(g, n.x, tx->left));
  case ProcKind::SelR:
    return is_kind(tx, TypeKind::Plus) && check(th, n.kids[0], with(g, n.x, tx->right));
  case ProcKind::Offer:
    return is_kind(tx, TypeKind::With) && check(th, n.kids[0], with(g, n.x, tx->left)) &&
           check(th, n.kids[1], with(g, n.x, tx->right));
  case ProcKind::Client:
    // x stays available: contraction followed by weakening if unused.
    return is_kind(tx, TypeKind::WhyNot) && !g.count(n.y) && check(th, n.kids[0], with(g, n.y, tx->left));
  case ProcKind::Server:
    return is_kind(tx, TypeKind::OfCourse) && th.empty() && !g.count(n.y) && only_why_not(minus(g, n.x)) &&
           check(th, n.kids[0], with(minus(g, n.x), n.y, tx->left));
  case ProcKind::SendType:
    return is_kind(tx, TypeKind::Exists) &&
           check(th, n.kids[0], with(g, n.x, subst_type_var(tx->left, n.type, tx->var)));
  case ProcKind::RecvType: {
    if (!is_kind(tx, TypeKind::Forall)) return false;
    for (auto& [y, a] : minus(g, n.x))
      if (free_type_vars(a).count(n.var)) return false;
    for (auto& [q, c] : th)
      if (free_type_vars(c).count(n.var)) return false;
    return check(th, n.kids[0], with(g, n.x, subst_type_var(tx->left, ty::var(n.var), tx->var)));
  }
  case ProcKind::SendProc: {
    if (!is_kind(tx, TypeKind::Provide) || !only_why_not(minus(g, n.x))) return false;
    if (!labels_match(tx->ctx, n.record)) return false;
    for (auto& f : free_channels(n.kids[0])) {
      auto im = n.record.image();
      if (std::find(im.begin(), im.end(), f) == im.end()) return false;
    }
    return check(th, n.kids[0], instantiate(tx->ctx, n.record));
  }
  case ProcKind::RecvProc: {
    if (!is_kind(tx, TypeKind::Assume) || th.count(n.var)) return false;
    ProcEnv t = th;
    t[n.var] = tx->ctx;
    return check(t, n.kids[0], minus(g, n.x));
  }
  case ProcKind::Invoke: {
    if (th.size() != 1 || !th.count(n.var)) return false;
    const ParamCtx& c = th.at(n.var);
    if (!labels_match(c, n.record)) return false;
    return same_ctx_up_to_weakening(g, instantiate(c, n.record));
  }
  case ProcKind::Cut:
    if (g.count(n.x) || g.count(n.y)) return false;
    return each_split(th, g, 2, [&](const Parts& ps) {
      return check(ps[0].first, n.kids[0], with(ps[0].second, n.x, n.type)) &&
             check(ps[1].first, n.kids[1], with(ps[1].second, n.y, dual(n.type)));
    });
  case ProcKind::ExplSubst: {
    if (th.count(n.var) || !labels_match(n.params, n.record)) return false;
    for (auto& f : free_channels(n.kids[1])) {
      auto im = n.record.image();
      if (std::find(im.begin(), im.end(), f) == im.end()) return false;
    }
    return each_split(th, {}, 2, [&](const Parts& ps) {
      ProcEnv t0 = ps[0].first;
      t0[n.var] = n.params;
      return check(ps[1].first, n.kids[1], instantiate(n.params, n.record)) && check(t0, n.kids[0], g);
    });
  }
  case ProcKind::MCut: {
    ChannelCtx eps;
    try {
      eps = check_coherence(n.global);
    } catch (const Error&) {
      return false;
    }
    if (eps.size() != n.endpoints.size()) return false;
    for (auto& [e, t] : n.endpoints)
      if (!eps.count(e) || !type_eq(eps.at(e), t) || g.count(e)) return false;
    return each_split(th, g, n.kids.size(), [&](const Parts& ps) {
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        if (!check(ps[i].first, n.kids[i], with(ps[i].second, n.endpoints[i].first, n.endpoints[i].second)))
          return false;
      return true;
    });
  }
  default:
    return false;
  }
}

} // namespace

bool exhaustive_check(const ProcEnv& theta, const ProcPtr& p, const ChannelCtx& gamma) {
  try {
    return check(theta, p, gamma);
  } catch (const Error&) {
    return false;
  }
}

} // namespace chop::testing
