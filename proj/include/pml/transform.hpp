#pragma once

// The configurable transport transformation: rewrites terms over the A side
// of a configuration into terms over the B side. Constructor, eliminator,
// eta and iota forms are unified against the configuration roles; the result
// is folded back into native constructors/eliminators where the B roles are
// plain aliases. Includes user annotations, a lift cache and a termination
// guard for configurations whose B side mentions A.

#include <mutex>
#include <optional>
#include <unordered_map>

#include "pml/config.hpp"

namespace pml {

struct TransformFailed : KernelError {
  explicit TransformFailed(const std::string& msg, TermPath p = {})
      : KernelError("TransformFailed", msg, std::move(p)) {}
};

struct TerminationGuardTriggered : KernelError {
  explicit TerminationGuardTriggered(const std::string& msg)
      : KernelError("TerminationGuardTriggered", msg) {}
};

struct DependencyError : KernelError {
  explicit DependencyError(const std::string& msg) : KernelError("DependencyError", msg) {}
};

struct ConfigMatch {
  enum class Role { DepConstr, DepElim, Eta, Iota, TypeA };
  Role role;
  int index = 0;              // constructor index for DepConstr/Iota
  std::vector<TermPtr> args;  // instantiated role arguments, source side
};

// User marker: the subterm at `path` (child-index path into a definition
// body) is an application of the given configuration role.
struct Annotation {
  TermPath path;
  std::string role;  // dep_constr | dep_elim | eta | iota | type
  int index = 0;
};

struct LiftCache {
  std::mutex mu;
  std::unordered_map<std::string, TermPtr> map;
  size_t hits = 0, misses = 0;

  TermPtr lookup(const std::string& key) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = map.find(key);
    if (it == map.end()) {
      ++misses;
      return nullptr;
    }
    ++hits;
    return it->second;
  }
  void store(const std::string& key, const TermPtr& t) {
    std::lock_guard<std::mutex> lock(mu);
    map.emplace(key, t);
  }
};

struct LiftOptions {
  std::vector<Annotation> annotations;
  std::shared_ptr<LiftCache> cache;
  bool use_cache = true;  // opt out without discarding the cache object
  bool check = true;      // type check the result against the lifted type
  std::map<std::string, std::string> renames;  // previously repaired constants
};

// Guard state threaded through one transformation run.
struct TransformState {
  std::string a_name;
  bool b_mentions_a = false;  // B refines A; naive porting would not terminate
  long steps = 0;
  long max_steps = 2000000;
  TermPtr pending;  // role replacement about to be emitted, null otherwise
};

// False when the run must stop: the step budget is exhausted, or the B side
// mentions A itself, in which case every ported occurrence of A immediately
// reintroduces one and the rewrite has no fixed point.
inline bool guard_termination(const TransformState& st) {
  if (st.steps > st.max_steps) return false;
  if (st.b_mentions_a && st.pending) return false;
  return true;
}

namespace detail {

inline std::string swap_side_label(const std::string& label) {
  std::string out = label;
  for (size_t i = 0; i + 1 < out.size(); ++i) {
    bool last = i + 2 == out.size();
    if (out[i] == '_' && (last || out[i + 2] == '_')) {
      if (out[i + 1] == 'a') out[i + 1] = 'b';
      else if (out[i + 1] == 'b') out[i + 1] = 'a';
    }
  }
  return out;
}

inline bool closed_above(const TermPtr& t, int depth) {
  switch (t->tag) {
    case Tag::Var: return t->n < depth;
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const: return true;
    case Tag::Pi:
    case Tag::Lam: return closed_above(t->a, depth) && closed_above(t->b, depth + 1);
    case Tag::App: return closed_above(t->a, depth) && closed_above(t->b, depth);
    case Tag::Constr: return closed_above(t->a, depth);
    case Tag::Elim: {
      if (!closed_above(t->a, depth) || !closed_above(t->b, depth)) return false;
      for (auto& c : t->ts)
        if (!closed_above(c, depth)) return false;
      return true;
    }
  }
  return true;
}

}  // namespace detail

inline Configuration reverse_configuration(const Configuration& c) {
  Configuration r = c;
  std::swap(r.type_a, r.type_b);
  std::swap(r.dep_constr_a, r.dep_constr_b);
  std::swap(r.dep_elim_a, r.dep_elim_b);
  std::swap(r.eta_a, r.eta_b);
  std::swap(r.eta_ok_a, r.eta_ok_b);
  std::swap(r.iota_a, r.iota_b);
  r.trusted.clear();
  for (auto& l : c.trusted) r.trusted.insert(detail::swap_side_label(l));
  const std::string suffix = "_rev";
  if (r.id.size() > suffix.size() && r.id.compare(r.id.size() - suffix.size(), suffix.size(), suffix) == 0)
    r.id.resize(r.id.size() - suffix.size());
  else
    r.id += suffix;
  return r;
}

namespace detail {

struct FoldInfo {
  std::string ind_name;        // native B family, when it is an inductive
  std::vector<int> dc_native;  // cfg ctor j -> native index, -1 when no alias
  bool de_ok = false;
  std::vector<int> de_case_cfg;  // native case position -> cfg case index
  bool eta_id = false;
};

struct Lifter {
  const GlobalEnv& env;
  Configuration cfg;  // validated copy, eta_ok witnesses published
  LiftOptions opts;
  Checker ck;
  ConfigAnalysis ana;
  std::string a_name, b_name;
  size_t np = 0;
  FoldInfo bfold;
  std::vector<int> a_native;  // cfg ctor j -> native A constructor index
  bool a_native_ok = false;
  TransformState st;

  struct Match {
    ConfigMatch cm;
    int consumed = 0;             // spine arguments used by the role
    bool params_in_head = false;  // Constr head: parameters live in the node
  };

  Lifter(const GlobalEnv& e, const Configuration& c, LiftOptions o)
      : env(e), cfg(c), opts(std::move(o)), ck(e) {
    ana = analyze_configuration(env, cfg);
    if (!ana.report.ok())
      throw TransformFailed("configuration '" + cfg.id + "' does not validate:\n" +
                            ana.report.summary());
    np = ana.a.params.size();
    a_name = head_name(cfg.type_a);
    b_name = head_name(cfg.type_b);
    compute_guard();
    compute_a_native();
    compute_fold();
  }

  static std::string head_name(const TermPtr& t) {
    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);
    return (h->tag == Tag::Ind || h->tag == Tag::Const) ? h->s : std::string();
  }

  bool cv(const TermPtr& x, const TermPtr& y) { return conv(env, x, y, &ck.cache); }

  // ----- setup -----

  void compute_guard() {
    st.a_name = a_name;
    if (b_name == a_name) return;  // A onto itself: porting is a fixed point
    std::vector<TermPtr> roles{cfg.type_b, cfg.dep_elim_b, cfg.eta_b};
    for (auto& t : cfg.dep_constr_b) roles.push_back(t);
    for (auto& t : roles) {
      if (!t) continue;
      if (name_occurs(t, a_name)) {
        st.b_mentions_a = true;
        return;
      }
      std::set<std::string> cs;
      collect_consts(t, cs);
      for (auto& n : cs) {
        const Definition* d = env.definition(n);
        if (d && (name_occurs(d->body, a_name) || name_occurs(d->type, a_name))) {
          st.b_mentions_a = true;
          return;
        }
      }
    }
  }

  // cfg constructor j -> native index, when the role is a plain alias:
  // applied to fresh variables it normalizes to a native constructor of
  // `ind` applied to exactly those variables.
  static int native_ctor_of(const GlobalEnv& env, const TermPtr& dc, const std::string& ind,
                            size_t np, size_t k) {
    int depth = (int)(np + k);
    std::vector<TermPtr> args;
    for (int i = 0; i < depth; ++i) args.push_back(mk_var(depth - 1 - i));
    TermPtr nf;
    try {
      nf = normalize(env, mk_app(dc, args));
    } catch (const std::exception&) {
      return -1;
    }
    std::vector<TermPtr> sp;
    TermPtr h = spine_head(nf, sp);
    if (h->tag != Tag::Constr) return -1;
    std::vector<TermPtr> ia;
    TermPtr ih = spine_head(h->a, ia);
    if (ih->tag != Tag::Ind || ih->s != ind) return -1;
    if (ia.size() != np || sp.size() != k) return -1;
    for (size_t i = 0; i < np; ++i)
      if (!(ia[i]->tag == Tag::Var && ia[i]->n == depth - 1 - (int)i)) return -1;
    for (size_t i = 0; i < k; ++i)
      if (!(sp[i]->tag == Tag::Var && sp[i]->n == (int)(k - 1 - i))) return -1;
    return h->n;
  }

  void compute_a_native() {
    const InductiveDecl* d = env.inductive(a_name);
    if (!d || (int)d->ctors.size() != ana.a.n) return;
    a_native.assign(ana.a.n, -1);
    std::vector<int> seen(ana.a.n, 0);
    for (int j = 0; j < ana.a.n; ++j) {
      a_native[j] =
          native_ctor_of(env, cfg.dep_constr_a[j], a_name, np, ana.a.ctor_tels[j].size());
      if (a_native[j] < 0) return;
      seen[a_native[j]]++;
    }
    for (int s : seen)
      if (s != 1) return;
    a_native_ok = true;
  }

  void compute_fold() {
    bfold.dc_native.assign(ana.b.n, -1);
    const InductiveDecl* d = env.inductive(b_name);
    if (d) {
      bfold.ind_name = b_name;
      for (int j = 0; j < ana.b.n; ++j)
        bfold.dc_native[j] =
            native_ctor_of(env, cfg.dep_constr_b[j], b_name, np, ana.b.ctor_tels[j].size());
      compute_de_fold(d);
    }
    TermPtr e = cfg.eta_b;
    if (e->tag == Tag::Const) {
      const Definition* def = env.definition(e->s);
      if (def) e = def->body;
    }
    std::vector<TermPtr> vars;
    int depth = (int)np + 1;
    for (int i = 0; i < depth; ++i) vars.push_back(mk_var(depth - 1 - i));
    TermPtr r = whnf(env, mk_app(e, vars), /*delta=*/false);
    bfold.eta_id = r->tag == Tag::Var && r->n == 0;
  }

  // dep_elim_b folds back to a native Elim when it is a pure case
  // rearrangement over the native constructors.
  void compute_de_fold(const InductiveDecl* d) {
    int n = ana.b.n;
    if ((int)d->ctors.size() != n) return;
    std::vector<int> cseen(n, 0);
    for (int v : bfold.dc_native) {
      if (v < 0) return;
      cseen[v]++;
    }
    for (int s : cseen)
      if (s != 1) return;
    TermPtr e = cfg.dep_elim_b;
    if (e->tag == Tag::Const) {
      const Definition* def = env.definition(e->s);
      if (!def) return;
      e = def->body;
    }
    int depth = (int)np + n + 2;
    std::vector<TermPtr> vars;
    for (int i = 0; i < depth; ++i) vars.push_back(mk_var(depth - 1 - i));
    TermPtr r = whnf(env, mk_app(e, vars), /*delta=*/false);
    if (r->tag != Tag::Elim) return;
    if (!(r->a->tag == Tag::Var && r->a->n == 0)) return;
    if (!(r->b->tag == Tag::Var && r->b->n == n + 1)) return;
    if ((int)r->ts.size() != n) return;
    bfold.de_case_cfg.assign(n, -1);
    std::vector<int> seen(n, 0);
    for (int i = 0; i < n; ++i) {
      const TermPtr& c = r->ts[i];
      if (c->tag != Tag::Var || c->n < 1 || c->n > n) return;
      int j = n - c->n;
      bfold.de_case_cfg[i] = j;
      seen[j]++;
    }
    for (int s : seen)
      if (s != 1) return;
    bfold.de_ok = true;
  }

  // ----- role arities (cross-checked equal on both sides) -----

  int dc_argc(int j) const { return (int)(np + ana.a.ctor_tels[j].size()); }
  int de_argc() const { return (int)np + 1 + ana.a.n + 1; }
  int eta_argc() const { return (int)np + 1; }
  int iota_argc(int j) const {
    return (int)np + 1 + ana.a.n + (int)ana.a.ctor_tels[j].size() + 2;
  }

  // ----- diagnostics -----

  std::string note(const TermPath& p) const {
    if (opts.annotations.empty()) return "; no annotation points are in scope";
    const Annotation* best = nullptr;
    size_t best_shared = 0;
    for (auto& a : opts.annotations) {
      size_t s = 0;
      while (s < a.path.size() && s < p.size() && a.path[s] == p[s]) ++s;
      if (!best || s > best_shared) {
        best = &a;
        best_shared = s;
      }
    }
    return "; nearest annotation point: " + best->role + " " + std::to_string(best->index) +
           " at " + path_to_string(best->path);
  }

  static TermPath clean(const TermPath& p) {
    TermPath out;
    for (int x : p)
      if (x >= 0) out.push_back(x);
    return out;
  }

  [[noreturn]] void fail(const TermPath& p, const std::string& msg) const {
    throw TransformFailed(msg + note(p), clean(p));
  }
  [[noreturn]] void fail_no_role(const TermPath& p, const std::string& what) const {
    fail(p, "subterm over " + a_name + " ('" + what +
                "') matches no configuration role and carries no annotation");
  }

  // ----- matching -----

  bool role_matches(const TermPtr& role, int argc, const TermPtr& head,
                    const std::vector<TermPtr>& args) {
    if ((int)args.size() < argc) return false;
    TermPtr pre = head, reb = role;
    for (int i = 0; i < argc; ++i) {
      pre = mk_app(pre, args[i]);
      reb = mk_app(reb, args[i]);
    }
    try {
      return cv(reb, pre);
    } catch (const std::exception&) {
      return false;
    }
  }

  std::optional<Match> match_spine(const TermPtr& t) {
    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);
    if (h->tag != Tag::Const && h->tag != Tag::Ind && h->tag != Tag::Constr &&
        h->tag != Tag::Lam)
      return std::nullopt;
    auto take = [&](ConfigMatch::Role r, int idx, int argc, bool in_head,
                    std::vector<TermPtr> full) {
      return Match{ConfigMatch{r, idx, std::move(full)}, argc, in_head};
    };
    auto prefix = [&](int argc) {
      return std::vector<TermPtr>(args.begin(), args.begin() + argc);
    };
    for (int j = 0; j < ana.a.n; ++j)
      if (role_matches(cfg.iota_a[j], iota_argc(j), h, args))
        return take(ConfigMatch::Role::Iota, j, iota_argc(j), false, prefix(iota_argc(j)));
    if (role_matches(cfg.dep_elim_a, de_argc(), h, args))
      return take(ConfigMatch::Role::DepElim, 0, de_argc(), false, prefix(de_argc()));
    if (h->tag == Tag::Constr) {
      std::vector<TermPtr> ia;
      TermPtr ih = spine_head(h->a, ia);
      if (ih->tag == Tag::Ind && ih->s == a_name && ia.size() == np) {
        for (int j = 0; j < ana.a.n; ++j) {
          int k = (int)ana.a.ctor_tels[j].size();
          if ((int)args.size() < k) continue;
          std::vector<TermPtr> full = ia;
          full.insert(full.end(), args.begin(), args.begin() + k);
          TermPtr pre = h, reb = mk_app(cfg.dep_constr_a[j], full);
          for (int i = 0; i < k; ++i) pre = mk_app(pre, args[i]);
          bool ok = false;
          try {
            ok = cv(reb, pre);
          } catch (const std::exception&) {
          }
          if (ok) return take(ConfigMatch::Role::DepConstr, j, k, true, std::move(full));
        }
      }
    } else {
      for (int j = 0; j < ana.a.n; ++j)
        if (role_matches(cfg.dep_constr_a[j], dc_argc(j), h, args))
          return take(ConfigMatch::Role::DepConstr, j, dc_argc(j), false, prefix(dc_argc(j)));
    }
    if (role_matches(cfg.eta_a, eta_argc(), h, args))
      return take(ConfigMatch::Role::Eta, 0, eta_argc(), false, prefix(eta_argc()));
    if (h->tag == Tag::Ind || h->tag == Tag::Const)
      if (role_matches(cfg.type_a, (int)np, h, args))
        return take(ConfigMatch::Role::TypeA, 0, (int)np, false, prefix((int)np));
    return std::nullopt;
  }

  TermPtr role_term_b(ConfigMatch::Role r, int idx) const {
    switch (r) {
      case ConfigMatch::Role::DepConstr: return cfg.dep_constr_b[idx];
      case ConfigMatch::Role::DepElim: return cfg.dep_elim_b;
      case ConfigMatch::Role::Eta: return cfg.eta_b;
      case ConfigMatch::Role::Iota: return cfg.iota_b[idx];
      case ConfigMatch::Role::TypeA: return cfg.type_b;
    }
    return nullptr;
  }

  // ----- lifting -----

  const Annotation* annotation_at(const TermPath& path) const {
    for (int x : path)
      if (x < 0) return nullptr;  // detached position (inferred type, expansion)
    for (auto& a : opts.annotations)
      if (a.path == path) return &a;
    return nullptr;
  }

  TermPath detached(const TermPath& p) const {
    TermPath d = p;
    d.push_back(-1);
    return d;
  }

  TermPtr replace(const TermPtr& role_b, const std::vector<TermPtr>& args,
                  const std::vector<TermPtr>& extras) {
    st.pending = role_b;
    if (!guard_termination(st))
      throw TerminationGuardTriggered("the B side of '" + cfg.id + "' mentions " + a_name +
                                      " itself; porting occurrences of " + a_name +
                                      " would not terminate");
    st.pending = nullptr;
    return mk_app(mk_app(role_b, args), extras);
  }

  TermPtr lift(const Context& ctx, const TermPtr& t, TermPath& path) {
    if (++st.steps > st.max_steps || !guard_termination(st))
      throw TerminationGuardTriggered("transformation step budget exhausted");
    if (const Annotation* an = annotation_at(path)) return lift_forced(ctx, t, path, *an);
    bool cacheable = opts.cache && opts.use_cache && detail::closed_above(t, 0);
    std::string key;
    if (cacheable) {
      key = cfg.id;
      key += '#';
      alpha_key_into(t, key);
      if (TermPtr hit = opts.cache->lookup(key)) return hit;
    }
    TermPtr out = lift_core(ctx, t, path);
    if (cacheable) opts.cache->store(key, out);
    return out;
  }

  TermPtr lift_core(const Context& ctx, const TermPtr& t, TermPath& path) {
    switch (t->tag) {
      case Tag::Var:
      case Tag::Sort:
        return t;
      case Tag::Pi:
      case Tag::Lam: {
        path.push_back(0);
        TermPtr a = lift(ctx, t->a, path);
        path.back() = 1;
        TermPtr b = lift(ctx.extended(t->s, t->a), t->b, path);
        path.pop_back();
        return t->tag == Tag::Pi ? mk_pi(t->s, a, b) : mk_lam(t->s, a, b);
      }
      case Tag::Elim:
        return lift_elim(ctx, t, path);
      default:
        return lift_spine(ctx, t, path);
    }
  }

  TermPtr lift_elim(const Context& ctx, const TermPtr& t, TermPath& path) {
    bool over_a = false;
    std::vector<TermPtr> sparams;
    try {
      TermPtr sty = whnf(env, ck.infer(ctx, t->a));
      std::vector<TermPtr> sa;
      TermPtr sh = spine_head(sty, sa);
      (void)sh;
      if (sa.size() == np && cv(mk_app(cfg.type_a, sa), sty)) {
        over_a = true;
        sparams = sa;
      }
    } catch (const std::exception&) {
    }
    if (over_a) {
      if (!a_native_ok || (int)t->ts.size() != ana.a.n)
        fail(path, "eliminator over " + a_name + " cannot be phrased through the configuration");
      try {
        TermPtr mty = whnf(env, ck.infer(ctx, t->b));
        while (mty->tag == Tag::Pi) mty = whnf(env, mty->b);
        if (mty->tag != Tag::Sort || mty->n != ana.a.motive_level)
          fail(path, "eliminator motive lives at the wrong sort for the configuration");
      } catch (const TransformFailed&) {
        throw;
      } catch (const std::exception& e) {
        fail(path, std::string("eliminator motive could not be analyzed: ") + e.what());
      }
      std::vector<TermPtr> bargs;
      {
        TermPath dp = detached(path);
        for (auto& p : sparams) bargs.push_back(lift(ctx, p, dp));
      }
      path.push_back(1);
      bargs.push_back(lift(ctx, t->b, path));
      for (int j = 0; j < ana.a.n; ++j) {
        path.back() = 2 + a_native[j];
        bargs.push_back(lift(ctx, t->ts[a_native[j]], path));
      }
      path.back() = 0;
      bargs.push_back(lift(ctx, t->a, path));
      path.pop_back();
      return replace(cfg.dep_elim_b, bargs, {});
    }
    path.push_back(0);
    TermPtr s = lift(ctx, t->a, path);
    path.back() = 1;
    TermPtr m = lift(ctx, t->b, path);
    std::vector<TermPtr> cs;
    for (size_t i = 0; i < t->ts.size(); ++i) {
      path.back() = 2 + (int)i;
      cs.push_back(lift(ctx, t->ts[i], path));
    }
    path.pop_back();
    return mk_elim(s, m, std::move(cs));
  }

  // arg i of an N-argument spine rooted at `path`
  std::vector<TermPtr> lift_args(const Context& ctx, const std::vector<TermPtr>& args, int from,
                                 int to, TermPath& path, int N) {
    std::vector<TermPtr> out;
    for (int i = from; i < to; ++i) {
      size_t base = path.size();
      for (int z = 0; z < N - 1 - i; ++z) path.push_back(0);
      path.push_back(1);
      out.push_back(lift(ctx, args[i], path));
      path.resize(base);
    }
    return out;
  }

  TermPtr apply_match(const Context& ctx, const TermPtr& t, TermPath& path, const Match& m) {
    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);
    int N = (int)args.size();
    std::vector<TermPtr> largs;
    if (m.params_in_head) {
      TermPath dp = detached(path);
      std::vector<TermPtr> ia;
      spine_head(h->a, ia);
      for (auto& p : ia) largs.push_back(lift(ctx, p, dp));
      auto rest = lift_args(ctx, args, 0, m.consumed, path, N);
      largs.insert(largs.end(), rest.begin(), rest.end());
    } else {
      largs = lift_args(ctx, args, 0, m.consumed, path, N);
    }
    auto extras = lift_args(ctx, args, m.consumed, N, path, N);
    return replace(role_term_b(m.cm.role, m.cm.index), largs, extras);
  }

  TermPtr lift_spine(const Context& ctx, const TermPtr& t, TermPath& path) {
    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);
    int N = (int)args.size();
    if (h->tag == Tag::Elim) {
      size_t base = path.size();
      for (int z = 0; z < N; ++z) path.push_back(0);
      TermPtr hh = lift(ctx, h, path);
      path.resize(base);
      return mk_app(hh, lift_args(ctx, args, 0, N, path, N));
    }
    if (auto m = match_spine(t)) return apply_match(ctx, t, path, *m);
    if (int miss = eta_expansion_gap(h, args); miss > 0) {
      TermPtr expanded = eta_expand(ctx, t, path, miss);
      TermPath dp = detached(path);
      return lift(ctx, expanded, dp);
    }
    size_t base = path.size();
    for (int z = 0; z < N; ++z) path.push_back(0);
    TermPtr hh = lift_head(ctx, h, path);
    path.resize(base);
    return mk_app(hh, lift_args(ctx, args, 0, N, path, N));
  }

  TermPtr lift_head(const Context& ctx, const TermPtr& h, TermPath& path) {
    switch (h->tag) {
      case Tag::Const: {
        auto it = opts.renames.find(h->s);
        if (it != opts.renames.end()) return mk_const(it->second);
        TermPtr ty = const_type(h->s);
        if (ty && name_occurs(ty, a_name)) fail_no_role(path, h->s);
        return h;
      }
      case Tag::Ind:
        if (h->s == a_name) fail_no_role(path, h->s);
        return h;
      case Tag::Constr: {
        std::vector<TermPtr> ia;
        TermPtr ih = spine_head(h->a, ia);
        if (ih->tag == Tag::Ind && ih->s == a_name) fail_no_role(path, a_name);
        path.push_back(0);
        TermPtr a2 = lift(ctx, h->a, path);
        path.pop_back();
        return mk_constr(h->n, a2);
      }
      default:
        return lift(ctx, h, path);
    }
  }

  TermPtr const_type(const std::string& n) const {
    if (const Definition* d = env.definition(n)) return d->type;
    if (env.has(n))
      if (auto* a = std::get_if<Assumption>(&env.entry(n))) return a->type;
    return nullptr;
  }

  // A role head applied to too few arguments: matching assumes eta-expanded
  // applications, so we expand on demand.
  int eta_expansion_gap(const TermPtr& h, const std::vector<TermPtr>& args) {
    if (h->tag != Tag::Const && h->tag != Tag::Ind) return 0;
    int have = (int)args.size();
    auto gap = [&](const TermPtr& role, int argc) -> int {
      if (have >= argc) return 0;
      try {
        return cv(role, h) ? argc - have : 0;
      } catch (const std::exception&) {
        return 0;
      }
    };
    for (int j = 0; j < ana.a.n; ++j)
      if (int g = gap(cfg.dep_constr_a[j], dc_argc(j))) return g;
    if (int g = gap(cfg.dep_elim_a, de_argc())) return g;
    if (int g = gap(cfg.eta_a, eta_argc())) return g;
    for (int j = 0; j < ana.a.n; ++j)
      if (int g = gap(cfg.iota_a[j], iota_argc(j))) return g;
    if (h->tag == Tag::Ind && h->s == a_name && have < (int)np) return (int)np - have;
    return 0;
  }

  TermPtr eta_expand(const Context& ctx, const TermPtr& t, const TermPath& path, int miss) {
    TermPtr ty;
    try {
      ty = whnf(env, ck.infer(ctx, t));
    } catch (const std::exception& e) {
      fail(path, std::string("cannot eta-expand under-applied role: ") + e.what());
    }
    Telescope doms;
    for (int i = 0; i < miss; ++i) {
      if (ty->tag != Tag::Pi) fail(path, "cannot eta-expand under-applied role");
      doms.emplace_back(ty->s, ty->a);
      ty = whnf(env, ty->b);
    }
    TermPtr body = shift(t, miss);
    for (int i = 0; i < miss; ++i) body = mk_app(body, mk_var(miss - 1 - i));
    return lam_telescope(doms, body);
  }

  // ----- annotations -----

  ConfigMatch::Role role_of_string(const std::string& r, const TermPath& path) const {
    if (r == "dep_constr") return ConfigMatch::Role::DepConstr;
    if (r == "dep_elim") return ConfigMatch::Role::DepElim;
    if (r == "eta") return ConfigMatch::Role::Eta;
    if (r == "iota") return ConfigMatch::Role::Iota;
    if (r == "type") return ConfigMatch::Role::TypeA;
    fail(path, "unknown annotation role '" + r + "'");
  }

  TermPtr lift_forced(const Context& ctx, const TermPtr& t, TermPath& path,
                      const Annotation& an) {
    ConfigMatch::Role want = role_of_string(an.role, path);
    if (auto m = match_spine(t))
      if (m->cm.role == want &&
          (want == ConfigMatch::Role::DepElim || want == ConfigMatch::Role::Eta ||
           want == ConfigMatch::Role::TypeA || m->cm.index == an.index))
        return apply_match(ctx, t, path, *m);
    if (want == ConfigMatch::Role::Iota)
      if (auto r = lift_iota_coercion(ctx, t, path, an.index)) return *r;
    fail(path, "annotated subterm is not an application of the " + an.role + " role");
  }

  // An invisible rewrite marked by the user: an identity coercion whose
  // binder type spells out the eliminator-of-constructor form,
  //   (fun (H : Q (DepElim .. (DepConstr_j y*))) => H) u.
  // It becomes an application of the B-side iota law, inverted through
  //   Q' := fun v => Q v -> Q unred.
  std::optional<TermPtr> lift_iota_coercion(const Context& ctx, const TermPtr& t,
                                            TermPath& path, int j) {
    if (j < 0 || j >= ana.a.n) return std::nullopt;
    if (t->tag != Tag::App) return std::nullopt;
    TermPtr c = t->a, u = t->b;
    if (c->tag != Tag::Lam || !(c->b->tag == Tag::Var && c->b->n == 0)) return std::nullopt;
    if (c->a->tag != Tag::App) return std::nullopt;
    TermPtr Qs = c->a->a, unred = c->a->b;
    std::vector<TermPtr> da;
    TermPtr dh = spine_head(unred, da);
    if ((int)da.size() != de_argc()) return std::nullopt;
    if (!role_matches(cfg.dep_elim_a, de_argc(), dh, da)) return std::nullopt;
    TermPtr scrut = da.back();
    int n = ana.a.n;
    int k = (int)ana.a.ctor_tels[j].size();
    std::vector<TermPtr> ys;
    {
      std::vector<TermPtr> ya;
      TermPtr yh = spine_head(scrut, ya);
      if (yh->tag == Tag::Constr) {
        std::vector<TermPtr> ia;
        TermPtr ih = spine_head(yh->a, ia);
        if (ih->tag != Tag::Ind || ih->s != a_name || (int)ya.size() != k) return std::nullopt;
        std::vector<TermPtr> full = ia;
        full.insert(full.end(), ya.begin(), ya.end());
        bool ok = false;
        try {
          ok = cv(mk_app(cfg.dep_constr_a[j], full), scrut);
        } catch (const std::exception&) {
        }
        if (!ok) return std::nullopt;
        ys = ya;
      } else {
        if ((int)ya.size() != dc_argc(j)) return std::nullopt;
        if (!role_matches(cfg.dep_constr_a[j], dc_argc(j), yh, ya)) return std::nullopt;
        ys.assign(ya.begin() + np, ya.end());
      }
    }
    TermPath dp = detached(path);
    auto L = [&](const TermPtr& x) { return lift(ctx, x, dp); };
    std::vector<TermPtr> p2, f2, y2;
    for (size_t i = 0; i < np; ++i) p2.push_back(L(da[i]));
    TermPtr P2 = L(da[np]);
    for (int i = 0; i < n; ++i) f2.push_back(L(da[np + 1 + i]));
    for (auto& y : ys) y2.push_back(L(y));
    TermPtr Q2 = L(Qs);
    path.push_back(1);
    TermPtr u2 = lift(ctx, u, path);
    path.pop_back();

    TermPtr c2 = mk_app(mk_app(cfg.dep_constr_b[j], p2), y2);
    std::vector<TermPtr> dargs = p2;
    dargs.push_back(P2);
    dargs.insert(dargs.end(), f2.begin(), f2.end());
    dargs.push_back(c2);
    TermPtr unred2 = mk_app(cfg.dep_elim_b, dargs);
    TermPtr etaC2 = mk_app(mk_app(cfg.eta_b, p2), c2);
    TermPtr qun = mk_app(Q2, unred2);
    TermPtr qtrick = mk_lam("v", mk_app(P2, etaC2),
                            mk_pi("_", mk_app(shift(Q2, 1), mk_var(0, "v")), shift(qun, 2)));
    TermPtr idf = mk_lam("h", qun, mk_var(0, "h"));
    std::vector<TermPtr> ia = p2;
    ia.push_back(P2);
    ia.insert(ia.end(), f2.begin(), f2.end());
    ia.insert(ia.end(), y2.begin(), y2.end());
    ia.push_back(qtrick);
    ia.push_back(idf);
    return replace(cfg.iota_b[j], ia, {u2});
  }

  // ----- folding B roles back into native syntax -----

  bool is_role_lam(const TermPtr& h) const {
    if (h->tag != Tag::Lam) return false;
    auto eq = [&](const TermPtr& r) { return r && r->tag == Tag::Lam && alpha_eq(h, r); };
    if (eq(cfg.type_b) || eq(cfg.eta_b) || eq(cfg.dep_elim_b)) return true;
    for (auto& d : cfg.dep_constr_b)
      if (eq(d)) return true;
    for (auto& d : cfg.iota_b)
      if (eq(d)) return true;
    return false;
  }

  static TermPtr app_rest(TermPtr base, const std::vector<TermPtr>& args, size_t from) {
    for (size_t i = from; i < args.size(); ++i) base = mk_app(base, args[i]);
    return base;
  }

  TermPtr fold(const TermPtr& t) {
    switch (t->tag) {
      case Tag::Var:
      case Tag::Sort:
      case Tag::Ind:
      case Tag::Const:
        return t;
      case Tag::Pi:
        return mk_pi(t->s, fold(t->a), fold(t->b));
      case Tag::Lam:
        return mk_lam(t->s, fold(t->a), fold(t->b));
      case Tag::Constr:
        return mk_constr(t->n, fold(t->a));
      case Tag::Elim: {
        std::vector<TermPtr> cs;
        for (auto& c : t->ts) cs.push_back(fold(c));
        return mk_elim(fold(t->a), fold(t->b), std::move(cs));
      }
      case Tag::App:
        break;
    }
    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);
    for (auto& a : args) a = fold(a);
    TermPtr hf = fold(h);
    int n = ana.b.n;
    if (bfold.de_ok && alpha_eq(hf, cfg.dep_elim_b) && (int)args.size() >= de_argc()) {
      TermPtr motive = args[np];
      TermPtr target = args[np + 1 + n];
      std::vector<TermPtr> cases(n);
      for (int i = 0; i < n; ++i) cases[i] = args[np + 1 + bfold.de_case_cfg[i]];
      return app_rest(mk_elim(target, motive, std::move(cases)), args, de_argc());
    }
    for (int j = 0; j < n; ++j) {
      int k = (int)ana.b.ctor_tels[j].size();
      if (bfold.dc_native[j] >= 0 && alpha_eq(hf, cfg.dep_constr_b[j]) &&
          (int)args.size() >= (int)np + k) {
        std::vector<TermPtr> ps(args.begin(), args.begin() + np);
        TermPtr out = mk_constr(bfold.dc_native[j], mk_app(mk_ind(bfold.ind_name), ps));
        for (int i = 0; i < k; ++i) out = mk_app(out, args[np + i]);
        return app_rest(out, args, np + k);
      }
    }
    if (bfold.eta_id && alpha_eq(hf, cfg.eta_b) && args.size() >= np + 1)
      return app_rest(args[np], args, np + 1);
    if (is_role_lam(hf) && !args.empty()) {
      TermPtr b = hf;
      size_t used = 0;
      while (b->tag == Tag::Lam && used < args.size()) {
        b = instantiate(b->b, args[used]);
        ++used;
      }
      return fold(app_rest(b, args, used));
    }
    return app_rest(hf, args, 0);
  }

  // ----- driver -----

  TermPtr run(const TermPtr& t) {
    TermPath p;
    TermPtr out = fold(lift(Context{}, t, p));
    if (a_name != b_name && name_occurs(out, a_name))
      fail({}, "transformed term still mentions " + a_name);
    if (opts.check) {
      TermPtr ty = ck.infer(Context{}, t);
      TermPtr ty2;
      {
        TermPath q = detached({});
        ty2 = fold(lift(Context{}, ty, q));
      }
      if (a_name != b_name && name_occurs(ty2, a_name))
        fail({}, "transformed type still mentions " + a_name);
      try {
        check_type(env, Context{}, out, ty2);
      } catch (const KernelError& e) {
        throw TransformFailed(
            std::string("transformed term does not type check: ") + e.what() + note(e.path),
            e.path);
      }
    }
    return out;
  }

  std::optional<ConfigMatch> match_public(const Context& ctx, const TermPtr& t) {
    if (!opts.annotations.empty())
      if (const Annotation* an = annotation_at({})) {
        ConfigMatch::Role want = role_of_string(an->role, {});
        if (auto m = match_spine(t))
          if (m->cm.role == want) return m->cm;
        return std::nullopt;
      }
    if (t->tag == Tag::Elim) {
      try {
        TermPtr sty = whnf(env, ck.infer(ctx, t->a));
        std::vector<TermPtr> sa;
        spine_head(sty, sa);
        if (sa.size() == np && cv(mk_app(cfg.type_a, sa), sty) && a_native_ok &&
            (int)t->ts.size() == ana.a.n) {
          ConfigMatch m{ConfigMatch::Role::DepElim, 0, sa};
          m.args.push_back(t->b);
          for (int j = 0; j < ana.a.n; ++j) m.args.push_back(t->ts[a_native[j]]);
          m.args.push_back(t->a);
          return m;
        }
      } catch (const std::exception&) {
      }
      return std::nullopt;
    }
    if (auto m = match_spine(t)) return m->cm;
    return std::nullopt;
  }
};

}  // namespace detail

// Unify a term against the configuration roles over A. Returns the matched
// role with its instantiated arguments; annotations at the root are honored
// first.
inline std::optional<ConfigMatch> unify_config(const GlobalEnv& env, const Configuration& cfg,
                                               const TermPtr& t,
                                               const std::vector<Annotation>& annotations = {}) {
  LiftOptions opts;
  opts.annotations = annotations;
  opts.check = false;
  detail::Lifter L(env, cfg, opts);
  return L.match_public(Context{}, t);
}

inline TermPtr transport(const GlobalEnv& env, const Configuration& cfg, const TermPtr& t,
                         const LiftOptions& opts = {}) {
  detail::Lifter L(env, cfg, opts);
  return L.run(t);
}

enum class Direction { AtoB, BtoA };

inline TermPtr transport(const GlobalEnv& env, const Configuration& cfg, const TermPtr& t,
                         Direction dir, const LiftOptions& opts = {}) {
  if (dir == Direction::AtoB) return transport(env, cfg, t, opts);
  return transport(env, reverse_configuration(cfg), t, opts);
}

struct RepairResult {
  std::string name;
  TermPtr type, body;
};

// Shared state for a sequence of repairs: earlier results substitute into
// later targets, the cache carries across, annotations are per target.
struct RepairSession {
  std::map<std::string, std::string> renames;
  std::map<std::string, std::vector<Annotation>> annotations;
  std::shared_ptr<LiftCache> cache;
  bool use_cache = true;
};

inline RepairResult repair_definition(GlobalEnv& env, const Configuration& cfg,
                                      const std::string& name, RepairSession* sess = nullptr) {
  const Definition* d = env.definition(name);
  if (!d) throw TransformFailed("'" + name + "' is not a defined constant");
  LiftOptions opts;
  opts.check = false;  // checked once below, body against the lifted type
  if (sess) {
    opts.renames = sess->renames;
    opts.cache = sess->cache;
    opts.use_cache = sess->use_cache;
    auto it = sess->annotations.find(name);
    if (it != sess->annotations.end()) opts.annotations = it->second;
  }
  detail::Lifter L(env, cfg, opts);
  TermPtr ty, body;
  {
    TermPath p = L.detached({});  // annotations address the body only
    ty = L.fold(L.lift(Context{}, d->type, p));
  }
  {
    TermPath p;
    body = L.fold(L.lift(Context{}, d->body, p));
  }
  if (L.a_name != L.b_name && (name_occurs(ty, L.a_name) || name_occurs(body, L.a_name)))
    throw TransformFailed("repaired '" + name + "' still mentions " + L.a_name);
  std::string nn = name + "_" + cfg.id;
  while (env.has(nn)) nn += "_r";
  try {
    env = define_constant(env, nn, ty, body);
  } catch (const KernelError& e) {
    throw TransformFailed("repaired '" + name + "' does not type check: " +
                              std::string(e.what()) + L.note(e.path),
                          e.path);
  }
  if (sess) sess->renames[name] = nn;
  return {nn, ty, body};
}

inline GlobalEnv repair_module(const GlobalEnv& env0, const Configuration& cfg,
                               const std::vector<std::string>& names,
                               RepairSession* sess = nullptr) {
  GlobalEnv env = env0;
  RepairSession local;
  RepairSession& s = sess ? *sess : local;
  if (!s.cache) s.cache = std::make_shared<LiftCache>();

  std::map<std::string, std::set<std::string>> deps;
  for (auto& n : names) {
    const Definition* d = env.definition(n);
    if (!d) throw DependencyError("'" + n + "' is not a defined constant");
    std::set<std::string> cs;
    detail::collect_consts(d->type, cs);
    detail::collect_consts(d->body, cs);
    std::set<std::string> within;
    for (auto& c : cs)
      if (c != n && std::find(names.begin(), names.end(), c) != names.end()) within.insert(c);
    deps[n] = std::move(within);
  }
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < names.size()) {
    bool progress = false;
    for (auto& n : names) {
      if (done.count(n)) continue;
      bool ready = true;
      for (auto& m : deps[n])
        if (!done.count(m)) ready = false;
      if (ready) {
        order.push_back(n);
        done.insert(n);
        progress = true;
      }
    }
    if (!progress) throw DependencyError("cyclic dependencies among the repair targets");
  }

  std::vector<std::string> repaired;
  for (auto& n : order) {
    try {
      repair_definition(env, cfg, n, &s);
      repaired.push_back(n);
    } catch (const TerminationGuardTriggered&) {
      throw;
    } catch (const KernelError& e) {
      std::string prog;
      for (auto& r : repaired) prog += (prog.empty() ? "" : ", ") + r;
      if (prog.empty()) prog = "none";
      throw TransformFailed(std::string(e.what()) + " [repaired so far: " + prog + "]", e.path);
    }
  }
  return env;
}

}  // namespace pml
