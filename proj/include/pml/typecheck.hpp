#pragma once

// Type checking and inductive declaration for the kernel calculus.
// Single predicative sort hierarchy Type0 : Type1 : ...; Pi-types live at
// the max of domain and codomain levels; no cumulativity.

#include "pml/reduce.hpp"

namespace pml {

inline TermPtr pi_telescope(const Telescope& tel, TermPtr tail) {
  for (auto it = tel.rbegin(); it != tel.rend(); ++it)
    tail = mk_pi(it->first, it->second, std::move(tail));
  return tail;
}
inline TermPtr lam_telescope(const Telescope& tel, TermPtr tail) {
  for (auto it = tel.rbegin(); it != tel.rend(); ++it)
    tail = mk_lam(it->first, it->second, std::move(tail));
  return tail;
}

// Substitute actual arguments for the binders of a telescope the term lives
// under: Var 0 is the last telescope entry.
inline TermPtr subst_telescope(TermPtr t, const std::vector<TermPtr>& args) {
  int k = (int)args.size();
  for (int i = 0; i < k; ++i) t = subst(t, k - 1 - i, args[i]);
  return t;
}

namespace detail {

// Relocation of a constructor-type subterm from the original binder prefix
// into the rebuilt case telescope (which has IH binders interleaved).
// reloc[0] is the new index of the most recently peeled original binder.
inline TermPtr reloc_term(const TermPtr& t, const std::vector<int>& reloc, int new_depth,
                          int local = 0) {
  switch (t->tag) {
    case Tag::Var: {
      if (t->n < local) return t;
      int orig = t->n - local;
      if (orig < (int)reloc.size()) return mk_var(reloc[orig] + local, t->s);
      // ambient variable: shift by the number of extra (IH) binders
      return mk_var(t->n + (new_depth - (int)reloc.size()), t->s);
    }
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const:
      return t;
    case Tag::Pi:
      return mk_pi(t->s, reloc_term(t->a, reloc, new_depth, local),
                   reloc_term(t->b, reloc, new_depth, local + 1));
    case Tag::Lam:
      return mk_lam(t->s, reloc_term(t->a, reloc, new_depth, local),
                    reloc_term(t->b, reloc, new_depth, local + 1));
    case Tag::App:
      return mk_app(reloc_term(t->a, reloc, new_depth, local),
                    reloc_term(t->b, reloc, new_depth, local));
    case Tag::Constr:
      return mk_constr(t->n, reloc_term(t->a, reloc, new_depth, local));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      for (auto& c : t->ts) cs.push_back(reloc_term(c, reloc, new_depth, local));
      return mk_elim(reloc_term(t->a, reloc, new_depth, local),
                     reloc_term(t->b, reloc, new_depth, local), std::move(cs));
    }
  }
  return t;
}

}  // namespace detail

// Expected type of eliminator case `ctor` for `decl`, with parameters and
// motive given as terms in the ambient context. Shape: one binder per
// constructor argument, an inductive hypothesis right after each recursive
// argument, ending in the motive applied to the built constructor value.
inline TermPtr case_type(const GlobalEnv& env, const InductiveDecl& decl, int ctor,
                         const std::vector<TermPtr>& params, const TermPtr& motive) {
  TermPtr c = subst_telescope(decl.ctors[ctor].second, params);
  struct Binder {
    std::string hint;
    TermPtr type;  // expressed at its own position in the new telescope
    bool is_ih;
  };
  std::vector<Binder> out;
  std::vector<int> reloc;  // orig index -> new index, both relative to "now"
  int new_depth = 0;

  while (c->tag == Tag::Pi) {
    TermPtr dom = detail::reloc_term(c->a, reloc, new_depth);
    out.push_back({c->s, dom, false});
    for (auto& r : reloc) ++r;
    reloc.insert(reloc.begin(), 0);
    ++new_depth;

    std::vector<TermPtr> sargs;
    TermPtr shead = spine_head(dom, sargs);
    if (shead->tag == Tag::Ind && shead->s == decl.name) {
      // inductive hypothesis: motive applied to the arg's indices and itself
      std::vector<TermPtr> idx(sargs.begin() + decl.num_params(), sargs.end());
      TermPtr ih = shift(motive, new_depth);
      for (auto& ix : idx) ih = mk_app(ih, shift(ix, 1));
      ih = mk_app(ih, mk_var(0, c->s));
      out.push_back({"IH" + c->s, ih, true});
      for (auto& r : reloc) ++r;
      ++new_depth;
    }
    c = c->b;
  }

  // tail: motive applied to result indices and the constructor value
  TermPtr tail = detail::reloc_term(c, reloc, new_depth);
  std::vector<TermPtr> targs;
  TermPtr thead = spine_head(tail, targs);
  if (thead->tag != Tag::Ind || thead->s != decl.name)
    throw KernelError("TypeError", "constructor tail is not the inductive: " + decl.name);
  std::vector<TermPtr> shifted_params;
  for (auto& p : params) shifted_params.push_back(shift(p, new_depth));
  TermPtr value = mk_constr(ctor, mk_app(mk_ind(decl.name), shifted_params));
  {
    // apply the constructor to the non-IH binders, innermost last
    std::vector<int> data_idx;
    int depth_from_top = (int)out.size();
    for (auto& b : out) {
      --depth_from_top;
      if (!b.is_ih) data_idx.push_back(depth_from_top);
    }
    for (size_t i = 0; i < data_idx.size(); ++i)
      value = mk_app(value, mk_var(data_idx[i], out[i].hint));
  }
  TermPtr res = shift(motive, new_depth);
  for (size_t i = decl.num_params(); i < targs.size(); ++i) res = mk_app(res, targs[i]);
  res = mk_app(res, value);

  for (auto it = out.rbegin(); it != out.rend(); ++it)
    res = mk_pi(it->hint, it->type, res);
  return res;
}

// The closed Pi-type of the standard dependent eliminator:
// parameters, motive over indices and target, one case per constructor,
// indices, target, ending in the motive applied.
inline TermPtr eliminator_type(const GlobalEnv& env, const std::string& ind,
                               int motive_level = 0) {
  const InductiveDecl& decl = env.inductive_or_throw(ind);
  int np = (int)decl.num_params();
  int ni = (int)decl.num_indices();
  int nc = (int)decl.ctors.size();

  // index telescope, as stored in the arity (expressed under params)
  Telescope idx_tel;
  {
    TermPtr a = decl.arity;
    while (a->tag == Tag::Pi) {
      idx_tel.emplace_back(a->s.empty() ? "i" : a->s, a->a);
      a = a->b;
    }
  }

  auto ind_applied_at = [&](int depth_past_params, int extra_idx_binders) {
    // I p0 ... p(np-1) i0 ... applied at a point `depth_past_params +
    // extra_idx_binders` binders below the last parameter.
    TermPtr t = mk_ind(ind);
    for (int i = 0; i < np; ++i)
      t = mk_app(t, mk_var(np - 1 - i + depth_past_params + extra_idx_binders,
                           decl.params[i].first));
    for (int i = 0; i < extra_idx_binders; ++i)
      t = mk_app(t, mk_var(extra_idx_binders - 1 - i));
    return t;
  };

  // motive type: forall indices, I params indices -> Sort l
  TermPtr motive_ty = mk_sort(motive_level);
  motive_ty = mk_pi("x", ind_applied_at(0, ni), motive_ty);
  for (int i = ni - 1; i >= 0; --i)
    motive_ty = mk_pi(idx_tel[i].first, shift(idx_tel[i].second, 0), motive_ty);

  // tail: forall indices (x : I params indices), P indices x
  // built in context [params, P, cases..., indices, x]
  TermPtr tail;
  {
    TermPtr p_ref = mk_var(nc + ni + 1, "P");
    TermPtr app = p_ref;
    for (int i = 0; i < ni; ++i) app = mk_app(app, mk_var(ni - i, idx_tel[i].first));
    app = mk_app(app, mk_var(0, "x"));
    tail = app;
    tail = mk_pi("x", ind_applied_at(1 + nc, ni), tail);
    for (int i = ni - 1; i >= 0; --i) {
      // index types are expressed under params; shift past P, cases and
      // earlier indices
      tail = mk_pi(idx_tel[i].first, shift(idx_tel[i].second, 1 + nc, i), tail);
    }
  }

  // cases, innermost first when folding
  for (int j = nc - 1; j >= 0; --j) {
    std::vector<TermPtr> param_refs;
    for (int i = 0; i < np; ++i) param_refs.push_back(mk_var(np - i + j, decl.params[i].first));
    TermPtr ct = case_type(env, decl, j, param_refs, mk_var(j, "P"));
    tail = mk_pi(decl.ctors[j].first.empty() ? "f" : "p" + decl.ctors[j].first, ct, tail);
  }

  tail = mk_pi("P", motive_ty, tail);
  return pi_telescope(decl.params, tail);
}

// Eta-expanded eliminator as a term: lambdas over the full eliminator type
// ending in a primitive Elim on the target.
inline TermPtr eliminator_term(const GlobalEnv& env, const std::string& ind,
                               int motive_level = 0) {
  const InductiveDecl& d = env.inductive_or_throw(ind);
  int nc = (int)d.ctors.size();
  int ni = (int)d.num_indices();
  TermPtr ty = eliminator_type(env, ind, motive_level);
  Telescope binders;
  TermPtr c = ty;
  while (c->tag == Tag::Pi) {
    binders.emplace_back(c->s, c->a);
    c = c->b;
  }
  std::vector<TermPtr> cases;
  for (int j = 0; j < nc; ++j) cases.push_back(mk_var(nc - 1 - j + ni + 1));
  TermPtr body = mk_elim(mk_var(0, "x"), mk_var(nc + ni + 1, "P"), std::move(cases));
  return lam_telescope(binders, body);
}

// --- the checker ---

struct Checker {
  const GlobalEnv& env;
  NormCache cache;

  explicit Checker(const GlobalEnv& e) : env(e) {}

  [[noreturn]] void fail(const TermPath& path, const std::string& msg) {
    throw KernelError("TypeError", msg, path);
  }

  TermPtr infer(const Context& ctx, const TermPtr& t) {
    TermPath path;
    return infer_at(ctx, t, path);
  }

  void check(const Context& ctx, const TermPtr& t, const TermPtr& ty) {
    TermPath path;
    check_at(ctx, t, ty, path);
  }

  // Sort level of a type.
  int infer_sort(const Context& ctx, const TermPtr& ty, TermPath& path) {
    TermPtr s = whnf(env, infer_at(ctx, ty, path));
    if (s->tag != Tag::Sort) fail(path, "expected a type");
    return s->n;
  }

  void check_at(const Context& ctx, const TermPtr& t, const TermPtr& ty, TermPath& path) {
    TermPtr got = infer_at(ctx, t, path);
    if (!conv(env, got, ty, &cache)) fail(path, "type mismatch");
  }

  TermPtr infer_at(const Context& ctx, const TermPtr& t, TermPath& path) {
    switch (t->tag) {
      case Tag::Var:
        if (t->n < 0 || t->n >= (int)ctx.size()) fail(path, "unbound variable");
        return ctx.type_of(t->n);
      case Tag::Sort:
        if (t->n < 0) fail(path, "negative sort level");
        return mk_sort(t->n + 1);
      case Tag::Pi: {
        path.push_back(0);
        int l1 = infer_sort(ctx, t->a, path);
        path.back() = 1;
        int l2 = infer_sort(ctx.extended(t->s, t->a), t->b, path);
        path.pop_back();
        return mk_sort(std::max(l1, l2));
      }
      case Tag::Lam: {
        path.push_back(0);
        infer_sort(ctx, t->a, path);
        path.back() = 1;
        TermPtr bty = infer_at(ctx.extended(t->s, t->a), t->b, path);
        path.pop_back();
        return mk_pi(t->s, t->a, bty);
      }
      case Tag::App: {
        path.push_back(0);
        TermPtr fty = whnf(env, infer_at(ctx, t->a, path));
        if (fty->tag != Tag::Pi) fail(path, "applied a non-function");
        path.back() = 1;
        check_at(ctx, t->b, fty->a, path);
        path.pop_back();
        return instantiate(fty->b, t->b);
      }
      case Tag::Ind: {
        const InductiveDecl& d = env.inductive_or_throw(t->s);
        return pi_telescope(d.params, d.arity);
      }
      case Tag::Const:
        return env.type_of_global(t->s);
      case Tag::Constr: {
        std::vector<TermPtr> params;
        TermPtr head = spine_head(whnf(env, t->a), params);
        if (head->tag != Tag::Ind) fail(path, "Constr over a non-inductive");
        const InductiveDecl& d = env.inductive_or_throw(head->s);
        if (params.size() != d.num_params()) fail(path, "wrong parameter count for " + head->s);
        if (t->n < 0 || t->n >= (int)d.ctors.size())
          fail(path, "constructor index out of range for " + head->s);
        path.push_back(0);
        for (size_t i = 0; i < params.size(); ++i) {
          std::vector<TermPtr> prefix(params.begin(), params.begin() + i);
          check_at(ctx, params[i], subst_telescope(d.params[i].second, prefix), path);
        }
        path.pop_back();
        return subst_telescope(d.ctors[t->n].second, params);
      }
      case Tag::Elim: {
        path.push_back(0);
        TermPtr sty = whnf(env, infer_at(ctx, t->a, path));
        std::string ind_name;
        std::vector<TermPtr> params, indices;
        if (!decompose_inductive_app(env, sty, ind_name, params, indices))
          fail(path, "eliminated a non-inductive value");
        const InductiveDecl& d = env.inductive_or_throw(ind_name);
        if (t->ts.size() != d.ctors.size())
          fail(path, "eliminator case count mismatch for " + ind_name + ": expected " +
                         std::to_string(d.ctors.size()) + ", got " + std::to_string(t->ts.size()));

        // motive: forall indices, I params indices -> Sort l (any l)
        path.back() = 1;
        TermPtr mty = infer_at(ctx, t->b, path);
        {
          TermPtr expect_tail = mty;
          size_t ni = d.num_indices();
          // peel indices + target, checking domains against the declared arity
          TermPtr arity = subst_telescope(d.arity, params);
          std::vector<TermPtr> idx_vars;
          for (size_t i = 0; i < ni; ++i) {
            expect_tail = whnf(env, expect_tail);
            if (expect_tail->tag != Tag::Pi) fail(path, "motive arity too short");
            if (!conv(env, expect_tail->a, shift(arity->a, 0, 0), &cache))
              fail(path, "motive index type mismatch");
            idx_vars.push_back(mk_var((int)(ni - i), expect_tail->s));
            arity = arity->b;  // stays under the index binders; compare shapes
            expect_tail = expect_tail->b;
            // re-express remaining arity under the peeled motive binders:
            // both sides use the same de Bruijn discipline, nothing to do.
          }
          expect_tail = whnf(env, expect_tail);
          if (expect_tail->tag != Tag::Pi) fail(path, "motive must abstract the target");
          // target type: I params indices (params shifted under ni binders)
          {
            TermPtr want = mk_ind(ind_name);
            for (auto& p : params) want = mk_app(want, shift(p, (int)ni));
            for (size_t i = 0; i < ni; ++i) want = mk_app(want, mk_var((int)(ni - 1 - i)));
            if (!conv(env, expect_tail->a, want, &cache))
              fail(path, "motive target type mismatch");
          }
          TermPtr end = whnf(env, expect_tail->b);
          if (end->tag != Tag::Sort) fail(path, "motive must end in a sort");
        }

        for (size_t j = 0; j < t->ts.size(); ++j) {
          path.back() = (int)(2 + j);
          check_at(ctx, t->ts[j], case_type(env, d, (int)j, params, t->b), path);
        }
        path.pop_back();

        TermPtr res = t->b;
        for (auto& ix : indices) res = mk_app(res, ix);
        res = mk_app(res, t->a);
        return res;
      }
    }
    fail(path, "unhandled term");
  }
};

inline TermPtr infer_type(const GlobalEnv& env, const Context& ctx, const TermPtr& t) {
  Checker ck(env);
  return ck.infer(ctx, t);
}

inline void check_type(const GlobalEnv& env, const Context& ctx, const TermPtr& t,
                       const TermPtr& ty) {
  Checker ck(env);
  ck.check(ctx, t, ty);
}

// --- declaring globals ---

namespace detail {

inline void check_param_prefix(const InductiveDecl& decl, const std::vector<TermPtr>& args,
                               int binders_below_params) {
  // the first num_params arguments must be the parameter variables in order
  int np = (int)decl.num_params();
  if ((int)args.size() < np)
    throw KernelError("PositivityViolation",
                      "non-uniform parameters in recursive occurrence of " + decl.name);
  for (int i = 0; i < np; ++i) {
    int want = binders_below_params + np - 1 - i;
    if (args[i]->tag != Tag::Var || args[i]->n != want)
      throw KernelError("PositivityViolation",
                        "non-uniform parameters in recursive occurrence of " + decl.name);
  }
}

}  // namespace detail

inline GlobalEnv declare_inductive(const GlobalEnv& env, const InductiveDecl& decl) {
  if (env.has(decl.name)) throw KernelError("DuplicateName", decl.name);
  GlobalEnv env2 = env.with(decl.name, decl);
  Checker ck(env2);

  // parameters well-formed
  Context pctx;
  for (auto& [h, ty] : decl.params) {
    TermPath path;
    ck.infer_sort(pctx, ty, path);
    pctx = pctx.extended(h, ty);
  }
  // arity: index telescope ending in a sort
  {
    TermPath path;
    TermPtr a = decl.arity;
    Context actx = pctx;
    while (a->tag == Tag::Pi) {
      ck.infer_sort(actx, a->a, path);
      actx = actx.extended(a->s, a->a);
      a = a->b;
    }
    if (a->tag != Tag::Sort || a->n < 0)
      throw KernelError("UniverseError", "inductive arity must end in a sort: " + decl.name);
  }
  int level = decl.sort_level();

  for (auto& [cname, ctype] : decl.ctors) {
    Context cctx = pctx;
    TermPtr c = ctype;
    int binders = 0;
    while (c->tag == Tag::Pi) {
      // argument type must be well-formed and fit in the declared sort
      TermPath path;
      int al = ck.infer_sort(cctx, c->a, path);
      if (al > level)
        throw KernelError("UniverseError",
                          "constructor argument of " + cname + " exceeds the inductive's sort");
      // positivity: the inductive may only occur as the direct head of an
      // argument, applied to the uniform parameters
      if (name_occurs(c->a, decl.name)) {
        std::vector<TermPtr> sargs;
        TermPtr shead = spine_head(c->a, sargs);
        if (shead->tag != Tag::Ind || shead->s != decl.name)
          throw KernelError("PositivityViolation",
                            decl.name + " occurs non-positively in constructor " + cname);
        detail::check_param_prefix(decl, sargs, binders);
        for (size_t i = decl.num_params(); i < sargs.size(); ++i)
          if (name_occurs(sargs[i], decl.name))
            throw KernelError("PositivityViolation",
                              decl.name + " occurs in an index of a recursive argument of " + cname);
      }
      cctx = cctx.extended(c->s, c->a);
      ++binders;
      c = c->b;
    }
    // tail: the inductive applied to the uniform parameters and indices
    std::vector<TermPtr> targs;
    TermPtr thead = spine_head(c, targs);
    if (thead->tag != Tag::Ind || thead->s != decl.name)
      throw KernelError("PositivityViolation",
                        "constructor " + cname + " does not end in " + decl.name);
    if (targs.size() != decl.num_params() + decl.num_indices())
      throw KernelError("TypeError", "constructor " + cname + " has wrong index count");
    detail::check_param_prefix(decl, targs, binders);
    for (size_t i = decl.num_params(); i < targs.size(); ++i) {
      if (name_occurs(targs[i], decl.name))
        throw KernelError("PositivityViolation",
                          decl.name + " occurs in a result index of " + cname);
      TermPath path;
      ck.infer_at(cctx, targs[i], path);
    }
  }
  return env2;
}

inline GlobalEnv define_constant(const GlobalEnv& env, const std::string& name,
                                 const TermPtr& type, const TermPtr& body) {
  Checker ck(env);
  TermPath path;
  ck.infer_sort(Context{}, type, path);
  ck.check(Context{}, body, type);
  return env.with(name, Definition{type, body});
}

inline GlobalEnv assume_constant(const GlobalEnv& env, const std::string& name,
                                 const TermPtr& type) {
  Checker ck(env);
  TermPath path;
  ck.infer_sort(Context{}, type, path);
  return env.with(name, Assumption{type});
}

}  // namespace pml
