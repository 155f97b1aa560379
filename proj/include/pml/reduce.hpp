#pragma once

// Reduction: weak head normalization (beta, iota, delta gated by the opacity
// set) and full normalization. Pure given an immutable environment.

#include <mutex>
#include <unordered_map>

#include "pml/env.hpp"

namespace pml {

// Per-run memo for full normalization. Keyed on node identity; terms are
// immutable so a node always normalizes the same way under a fixed env.
// The source node is retained alongside the result so its address cannot be
// recycled by a later allocation while the entry is live.
struct NormCache {
  std::unordered_map<const Term*, std::pair<TermPtr, TermPtr>> map;
  std::mutex mu;

  TermPtr lookup(const TermPtr& t) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = map.find(t.get());
    return it == map.end() ? nullptr : it->second.second;
  }
  void store(const TermPtr& t, const TermPtr& nf) {
    std::lock_guard<std::mutex> lock(mu);
    map.emplace(t.get(), std::make_pair(t, nf));
  }
};

namespace detail {

// Which constructor arguments are recursive occurrences of the inductive.
inline std::vector<bool> recursive_args(const InductiveDecl& decl, int ctor) {
  std::vector<bool> rec;
  TermPtr c = decl.ctors[ctor].second;
  while (c->tag == Tag::Pi) {
    std::vector<TermPtr> args;
    TermPtr head = spine_head(c->a, args);
    rec.push_back(head->tag == Tag::Ind && head->s == decl.name);
    c = c->b;
  }
  return rec;
}

}  // namespace detail

// One iota step: Elim over a fully applied constructor.
// `ctor_args` are the constructor's own arguments (parameters live in the
// Constr node itself). Recursive arguments get an inductive-hypothesis
// eliminator application right after them.
inline TermPtr iota_reduce(const InductiveDecl& decl, int ctor, const TermPtr& motive,
                           const std::vector<TermPtr>& cases,
                           const std::vector<TermPtr>& ctor_args) {
  auto rec = detail::recursive_args(decl, ctor);
  TermPtr out = cases[ctor];
  for (size_t i = 0; i < ctor_args.size(); ++i) {
    out = mk_app(out, ctor_args[i]);
    if (rec[i]) out = mk_app(out, mk_elim(ctor_args[i], motive, cases));
  }
  return out;
}

// Weak head normal form. delta=false disables all constant unfolding (used
// when folding transformed terms back into constructor/eliminator form).
inline TermPtr whnf(const GlobalEnv& env, const TermPtr& t0, bool delta = true) {
  TermPtr t = t0;
  for (;;) {
    switch (t->tag) {
      case Tag::App: {
        std::vector<TermPtr> args;
        TermPtr head = spine_head(t, args);
        TermPtr h = whnf(env, head, delta);
        size_t i = 0;
        bool stepped = (h.get() != head.get());
        while (i < args.size() && h->tag == Tag::Lam) {
          h = instantiate(h->b, args[i]);
          ++i;
          stepped = true;
        }
        if (!stepped) return t;
        t = mk_app(h, std::vector<TermPtr>(args.begin() + i, args.end()));
        continue;
      }
      case Tag::Const: {
        if (delta && !env.opaque.count(t->s)) {
          if (auto* d = env.definition(t->s)) {
            t = d->body;
            continue;
          }
        }
        return t;
      }
      case Tag::Elim: {
        TermPtr scrut = whnf(env, t->a, delta);
        std::vector<TermPtr> cargs;
        TermPtr chead = spine_head(scrut, cargs);
        if (chead->tag == Tag::Constr) {
          std::vector<TermPtr> iargs;
          TermPtr ihead = spine_head(chead->a, iargs);
          if (ihead->tag == Tag::Ind) {
            if (auto* decl = env.inductive(ihead->s)) {
              if (chead->n < (int)decl->ctors.size() &&
                  cargs.size() == detail::recursive_args(*decl, chead->n).size() &&
                  t->ts.size() == decl->ctors.size()) {
                t = iota_reduce(*decl, chead->n, t->b, t->ts, cargs);
                continue;
              }
            }
          }
        }
        if (scrut.get() != t->a.get()) return mk_elim(scrut, t->b, t->ts);
        return t;
      }
      default:
        return t;
    }
  }
}

namespace detail {

inline TermPtr normalize_rec(const GlobalEnv& env, const TermPtr& t0, bool delta,
                             NormCache* cache, long& budget) {
  if (--budget < 0) throw KernelError("NormalizationBudget", "reduction step budget exhausted");
  if (cache) {
    if (auto hit = cache->lookup(t0)) return hit;
  }
  TermPtr t = whnf(env, t0, delta);
  TermPtr out;
  switch (t->tag) {
    case Tag::Var:
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const:
      out = t;
      break;
    case Tag::Pi:
      out = mk_pi(t->s, normalize_rec(env, t->a, delta, cache, budget),
                  normalize_rec(env, t->b, delta, cache, budget));
      break;
    case Tag::Lam:
      out = mk_lam(t->s, normalize_rec(env, t->a, delta, cache, budget),
                   normalize_rec(env, t->b, delta, cache, budget));
      break;
    case Tag::App:
      out = mk_app(normalize_rec(env, t->a, delta, cache, budget),
                   normalize_rec(env, t->b, delta, cache, budget));
      break;
    case Tag::Constr:
      out = mk_constr(t->n, normalize_rec(env, t->a, delta, cache, budget));
      break;
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      cs.reserve(t->ts.size());
      for (auto& c : t->ts) cs.push_back(normalize_rec(env, c, delta, cache, budget));
      out = mk_elim(normalize_rec(env, t->a, delta, cache, budget),
                    normalize_rec(env, t->b, delta, cache, budget), std::move(cs));
      break;
    }
  }
  if (cache) cache->store(t0, out);
  return out;
}

}  // namespace detail

inline TermPtr normalize(const GlobalEnv& env, const TermPtr& t, NormCache* cache = nullptr) {
  long budget = 200'000'000L;
  return detail::normalize_rec(env, t, /*delta=*/true, cache, budget);
}

// Beta/iota-only normal form; constants stay folded.
inline TermPtr beta_iota_normalize(const GlobalEnv& env, const TermPtr& t,
                                   NormCache* cache = nullptr) {
  long budget = 200'000'000L;
  return detail::normalize_rec(env, t, /*delta=*/false, cache, budget);
}

// Definitional equality: reduce to normal form, compare up to hints.
inline bool conv(const GlobalEnv& env, const TermPtr& t1, const TermPtr& t2,
                 NormCache* cache = nullptr) {
  if (alpha_eq(t1, t2)) return true;
  return alpha_eq(normalize(env, t1, cache), normalize(env, t2, cache));
}

}  // namespace pml
