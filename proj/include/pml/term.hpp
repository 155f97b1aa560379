#pragma once

// Term syntax for a small dependent type theory with inductive families and
// primitive eliminators. Terms are immutable and freely shared.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pml {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class Tag {
  Var,     // de Bruijn index, name hint retained for printing
  Sort,    // Type_n, predicative
  Pi,      // forall (x : a), b
  Lam,     // fun (x : a) => b
  App,     // a b
  Ind,     // reference to a declared inductive
  Constr,  // Constr(n, a) where a = inductive applied to its parameters
  Elim,    // Elim(a, b) { ts... }  -- scrutinee, motive, one case per ctor
  Const,   // reference to a definition or assumption
};

struct Term {
  Tag tag;
  int n = 0;              // Var index | Sort level | Constr ctor index
  std::string s;          // Var/Pi/Lam name hint | Ind/Const global name
  TermPtr a, b;           // see Tag comments
  std::vector<TermPtr> ts;  // Elim cases

  Term(Tag t) : tag(t) {}
};

inline TermPtr mk_var(int idx, std::string hint = "") {
  auto t = std::make_shared<Term>(Tag::Var);
  t->n = idx;
  t->s = std::move(hint);
  return t;
}
inline TermPtr mk_sort(int level) {
  auto t = std::make_shared<Term>(Tag::Sort);
  t->n = level;
  return t;
}
inline TermPtr mk_pi(std::string hint, TermPtr dom, TermPtr cod) {
  auto t = std::make_shared<Term>(Tag::Pi);
  t->s = std::move(hint);
  t->a = std::move(dom);
  t->b = std::move(cod);
  return t;
}
inline TermPtr mk_lam(std::string hint, TermPtr dom, TermPtr body) {
  auto t = std::make_shared<Term>(Tag::Lam);
  t->s = std::move(hint);
  t->a = std::move(dom);
  t->b = std::move(body);
  return t;
}
inline TermPtr mk_app(TermPtr fn, TermPtr arg) {
  auto t = std::make_shared<Term>(Tag::App);
  t->a = std::move(fn);
  t->b = std::move(arg);
  return t;
}
inline TermPtr mk_ind(std::string name) {
  auto t = std::make_shared<Term>(Tag::Ind);
  t->s = std::move(name);
  return t;
}
inline TermPtr mk_constr(int ctor, TermPtr ind_applied) {
  auto t = std::make_shared<Term>(Tag::Constr);
  t->n = ctor;
  t->a = std::move(ind_applied);
  return t;
}
inline TermPtr mk_elim(TermPtr scrut, TermPtr motive, std::vector<TermPtr> cases) {
  auto t = std::make_shared<Term>(Tag::Elim);
  t->a = std::move(scrut);
  t->b = std::move(motive);
  t->ts = std::move(cases);
  return t;
}
inline TermPtr mk_const(std::string name) {
  auto t = std::make_shared<Term>(Tag::Const);
  t->s = std::move(name);
  return t;
}

inline TermPtr mk_app(TermPtr fn, const std::vector<TermPtr>& args) {
  for (auto& a : args) fn = mk_app(std::move(fn), a);
  return fn;
}

// --- application spines ---

inline TermPtr spine_head(const TermPtr& t, std::vector<TermPtr>& args) {
  args.clear();
  TermPtr cur = t;
  while (cur->tag == Tag::App) {
    args.push_back(cur->b);
    cur = cur->a;
  }
  std::reverse(args.begin(), args.end());
  return cur;
}

// --- de Bruijn operations ---

// Add d to every free Var with index >= cutoff.
inline TermPtr shift(const TermPtr& t, int d, int cutoff = 0) {
  if (d == 0) return t;
  switch (t->tag) {
    case Tag::Var:
      return t->n >= cutoff ? mk_var(t->n + d, t->s) : t;
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const:
      return t;
    case Tag::Pi:
      return mk_pi(t->s, shift(t->a, d, cutoff), shift(t->b, d, cutoff + 1));
    case Tag::Lam:
      return mk_lam(t->s, shift(t->a, d, cutoff), shift(t->b, d, cutoff + 1));
    case Tag::App:
      return mk_app(shift(t->a, d, cutoff), shift(t->b, d, cutoff));
    case Tag::Constr:
      return mk_constr(t->n, shift(t->a, d, cutoff));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      cs.reserve(t->ts.size());
      for (auto& c : t->ts) cs.push_back(shift(c, d, cutoff));
      return mk_elim(shift(t->a, d, cutoff), shift(t->b, d, cutoff), std::move(cs));
    }
  }
  return t;
}

// Substitute `sub` for Var j, decrementing free vars above j.
inline TermPtr subst(const TermPtr& t, int j, const TermPtr& sub) {
  switch (t->tag) {
    case Tag::Var:
      if (t->n == j) return shift(sub, j);
      return t->n > j ? mk_var(t->n - 1, t->s) : t;
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const:
      return t;
    case Tag::Pi:
      return mk_pi(t->s, subst(t->a, j, sub), subst(t->b, j + 1, sub));
    case Tag::Lam:
      return mk_lam(t->s, subst(t->a, j, sub), subst(t->b, j + 1, sub));
    case Tag::App:
      return mk_app(subst(t->a, j, sub), subst(t->b, j, sub));
    case Tag::Constr:
      return mk_constr(t->n, subst(t->a, j, sub));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      cs.reserve(t->ts.size());
      for (auto& c : t->ts) cs.push_back(subst(c, j, sub));
      return mk_elim(subst(t->a, j, sub), subst(t->b, j, sub), std::move(cs));
    }
  }
  return t;
}

// beta: instantiate the bound variable of a Lam/Pi body with `arg`.
inline TermPtr instantiate(const TermPtr& body, const TermPtr& arg) {
  return subst(body, 0, arg);
}

// Structural equality up to name hints.
inline bool alpha_eq(const TermPtr& x, const TermPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->tag != y->tag) return false;
  switch (x->tag) {
    case Tag::Var:
    case Tag::Sort:
      return x->n == y->n;
    case Tag::Ind:
    case Tag::Const:
      return x->s == y->s;
    case Tag::Pi:
    case Tag::Lam:
      return alpha_eq(x->a, y->a) && alpha_eq(x->b, y->b);
    case Tag::App:
      return alpha_eq(x->a, y->a) && alpha_eq(x->b, y->b);
    case Tag::Constr:
      return x->n == y->n && alpha_eq(x->a, y->a);
    case Tag::Elim: {
      if (x->ts.size() != y->ts.size()) return false;
      if (!alpha_eq(x->a, y->a) || !alpha_eq(x->b, y->b)) return false;
      for (size_t i = 0; i < x->ts.size(); ++i)
        if (!alpha_eq(x->ts[i], y->ts[i])) return false;
      return true;
    }
  }
  return false;
}

// True if Var `idx` occurs free in t.
inline bool var_occurs(const TermPtr& t, int idx) {
  switch (t->tag) {
    case Tag::Var: return t->n == idx;
    case Tag::Sort:
    case Tag::Ind:
    case Tag::Const: return false;
    case Tag::Pi:
    case Tag::Lam: return var_occurs(t->a, idx) || var_occurs(t->b, idx + 1);
    case Tag::App: return var_occurs(t->a, idx) || var_occurs(t->b, idx);
    case Tag::Constr: return var_occurs(t->a, idx);
    case Tag::Elim: {
      if (var_occurs(t->a, idx) || var_occurs(t->b, idx)) return true;
      for (auto& c : t->ts)
        if (var_occurs(c, idx)) return true;
      return false;
    }
  }
  return false;
}

// True if a global name (Ind or Const) occurs anywhere in t.
inline bool name_occurs(const TermPtr& t, const std::string& name) {
  switch (t->tag) {
    case Tag::Var:
    case Tag::Sort: return false;
    case Tag::Ind:
    case Tag::Const: return t->s == name;
    case Tag::Pi:
    case Tag::Lam:
    case Tag::App: return name_occurs(t->a, name) || name_occurs(t->b, name);
    case Tag::Constr: return name_occurs(t->a, name);
    case Tag::Elim: {
      if (name_occurs(t->a, name) || name_occurs(t->b, name)) return true;
      for (auto& c : t->ts)
        if (name_occurs(c, name)) return true;
      return false;
    }
  }
  return false;
}

// Hint-free canonical serialization, usable as a cache key.
inline void alpha_key_into(const TermPtr& t, std::string& out) {
  switch (t->tag) {
    case Tag::Var: out += 'v'; out += std::to_string(t->n); break;
    case Tag::Sort: out += 's'; out += std::to_string(t->n); break;
    case Tag::Pi: out += 'P'; alpha_key_into(t->a, out); out += '.'; alpha_key_into(t->b, out); break;
    case Tag::Lam: out += 'L'; alpha_key_into(t->a, out); out += '.'; alpha_key_into(t->b, out); break;
    case Tag::App: out += '('; alpha_key_into(t->a, out); out += ' '; alpha_key_into(t->b, out); out += ')'; break;
    case Tag::Ind: out += 'I'; out += t->s; out += ';'; break;
    case Tag::Const: out += 'C'; out += t->s; out += ';'; break;
    case Tag::Constr: out += 'K'; out += std::to_string(t->n); out += ','; alpha_key_into(t->a, out); break;
    case Tag::Elim:
      out += 'E';
      alpha_key_into(t->a, out);
      out += ',';
      alpha_key_into(t->b, out);
      out += '{';
      for (auto& c : t->ts) { alpha_key_into(c, out); out += '|'; }
      out += '}';
      break;
  }
}

inline std::string alpha_key(const TermPtr& t) {
  std::string out;
  out.reserve(64);
  alpha_key_into(t, out);
  return out;
}

// Child indexing used by term paths (diagnostics, annotations):
// Pi/Lam: 0 = domain, 1 = body. App: 0 = fn, 1 = arg. Constr: 0 = inductive.
// Elim: 0 = scrutinee, 1 = motive, 2+i = case i.
inline TermPtr child_at(const TermPtr& t, int i) {
  switch (t->tag) {
    case Tag::Pi:
    case Tag::Lam:
    case Tag::App:
      return i == 0 ? t->a : (i == 1 ? t->b : nullptr);
    case Tag::Constr:
      return i == 0 ? t->a : nullptr;
    case Tag::Elim:
      if (i == 0) return t->a;
      if (i == 1) return t->b;
      if (i - 2 < (int)t->ts.size()) return t->ts[i - 2];
      return nullptr;
    default:
      return nullptr;
  }
}

using TermPath = std::vector<int>;

inline std::string path_to_string(const TermPath& p) {
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s.empty() ? "<root>" : s;
}

}  // namespace pml
