#pragma once

// Automatic configuration discovery for constructor permutations between
// two inductive types of the same shape.

#include "pml/config.hpp"

namespace pml {

struct ConstructorMapping {
  std::vector<int> perm;  // perm[j]: index in B of A's constructor j
  int name_matches = 0;   // constructors mapped to an equally-named one
  int name_distance = 0;  // summed Levenshtein distance over the mapping
};

namespace detail {

inline int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = (int)j;
  for (size_t i = 1; i <= a.size(); ++i) {
    int prev = row[0];
    row[0] = (int)i;
    for (size_t j = 1; j <= b.size(); ++j) {
      int cur = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
      prev = cur;
    }
  }
  return row[b.size()];
}

inline TermPtr rename_ind(const TermPtr& t, const std::string& from, const std::string& to) {
  switch (t->tag) {
    case Tag::Ind:
      return t->s == from ? mk_ind(to) : t;
    case Tag::Pi:
      return mk_pi(t->s, rename_ind(t->a, from, to), rename_ind(t->b, from, to));
    case Tag::Lam:
      return mk_lam(t->s, rename_ind(t->a, from, to), rename_ind(t->b, from, to));
    case Tag::App:
      return mk_app(rename_ind(t->a, from, to), rename_ind(t->b, from, to));
    case Tag::Constr:
      return mk_constr(t->n, rename_ind(t->a, from, to));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      for (auto& c : t->ts) cs.push_back(rename_ind(c, from, to));
      return mk_elim(rename_ind(t->a, from, to), rename_ind(t->b, from, to), std::move(cs));
    }
    default:
      return t;
  }
}

}  // namespace detail

// All type-correct constructor bijections from A onto B, best first.
inline std::vector<ConstructorMapping> find_permutations(const GlobalEnv& env,
                                                         const std::string& A,
                                                         const std::string& B) {
  const InductiveDecl& da = env.inductive_or_throw(A);
  const InductiveDecl& db = env.inductive_or_throw(B);
  size_t n = da.ctors.size();
  if (n != db.ctors.size())
    throw KernelError("ArityMismatch", "constructor counts differ: " + A + " vs " + B);
  // only parameterized, index-free types are searchable
  if (da.num_indices() != 0 || db.num_indices() != 0) return {};
  if (da.params.size() != db.params.size()) return {};
  for (size_t i = 0; i < da.params.size(); ++i)
    if (!alpha_eq(da.params[i].second,
                  detail::rename_ind(db.params[i].second, B, A)))
      return {};
  if (!alpha_eq(da.arity, detail::rename_ind(db.arity, B, A))) return {};

  std::vector<TermPtr> tb;  // B's constructor types, renamed into A's name
  for (auto& [nm, ty] : db.ctors) tb.push_back(detail::rename_ind(ty, B, A));

  std::vector<int> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = (int)i;
  std::vector<ConstructorMapping> out;
  do {
    bool ok = true;
    for (size_t j = 0; j < n && ok; ++j)
      ok = alpha_eq(da.ctors[j].second, tb[perm[j]]);
    if (!ok) continue;
    ConstructorMapping m;
    m.perm = perm;
    for (size_t j = 0; j < n; ++j) {
      if (da.ctors[j].first == db.ctors[perm[j]].first) ++m.name_matches;
      m.name_distance += detail::levenshtein(da.ctors[j].first, db.ctors[perm[j]].first);
    }
    out.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::stable_sort(out.begin(), out.end(),
                   [](const ConstructorMapping& x, const ConstructorMapping& y) {
                     if (x.name_matches != y.name_matches)
                       return x.name_matches > y.name_matches;
                     if (x.name_distance != y.name_distance)
                       return x.name_distance < y.name_distance;
                     return x.perm < y.perm;
                   });
  return out;
}

namespace detail {

// Native components of one permutation side.
struct NativeSide {
  const GlobalEnv& env;
  const InductiveDecl& decl;
  std::vector<int> ctor_of_case;  // case j handles constructor ctor_of_case[j]

  size_t np() const { return decl.params.size(); }

  TermPtr type() const { return mk_ind(decl.name); }

  TermPtr applied(int extras) const {
    return mk_app(mk_ind(decl.name), param_vars(np(), extras));
  }

  // fun params args => Constr(c, I params) args
  TermPtr dep_constr(int j) const {
    int c = ctor_of_case[j];
    Telescope tel;
    TermPtr cur = decl.ctors[c].second;
    while (cur->tag == Tag::Pi) {
      tel.emplace_back(cur->s, cur->a);
      cur = cur->b;
    }
    int k = (int)tel.size();
    TermPtr head = mk_constr(c, applied(k));
    std::vector<TermPtr> args;
    for (int i = 0; i < k; ++i) args.push_back(mk_var(k - 1 - i));
    return lam_telescope(decl.params, lam_telescope(tel, mk_app(head, args)));
  }

  // fun params P f* (x : I params) => Elim(x, P) { f_{case of ctor i} ... }
  TermPtr dep_elim() const {
    size_t n = decl.ctors.size();
    Telescope binders;
    binders.emplace_back("P", mk_pi("x", applied(0), mk_sort(0)));
    for (size_t j = 0; j < n; ++j) {
      TermPtr cty = case_type(env, decl, ctor_of_case[j], param_vars(np(), 1 + (int)j),
                              mk_var((int)j, "P"));
      binders.emplace_back("f" + std::to_string(j), cty);
    }
    binders.emplace_back("x", applied(1 + (int)n));
    std::vector<int> case_of_ctor(n);
    for (size_t j = 0; j < n; ++j) case_of_ctor[ctor_of_case[j]] = (int)j;
    std::vector<TermPtr> cases;
    for (size_t i = 0; i < n; ++i)
      cases.push_back(mk_var((int)n - case_of_ctor[i], "f"));
    return lam_telescope(decl.params,
                         lam_telescope(binders, mk_elim(mk_var(0, "x"),
                                                        mk_var((int)n + 1, "P"), cases)));
  }

  TermPtr eta() const {
    return lam_telescope(decl.params, mk_lam("x", applied(0), mk_var(0)));
  }
};

// eta-expand a Pi telescope into the lambda returning its last argument
inline TermPtr last_arg_lambda(const TermPtr& stmt) {
  Telescope tel;
  TermPtr cur = stmt;
  while (cur->tag == Tag::Pi) {
    tel.emplace_back(cur->s, cur->a);
    cur = cur->b;
  }
  return lam_telescope(tel, mk_var(0));
}

}  // namespace detail

// The canonical configuration induced by a constructor mapping: native
// components on the A side, case-permuted ones on the B side, identity Eta
// and definitional (identity) Iota on both sides.
inline Configuration config_from_permutation(const GlobalEnv& env, const std::string& A,
                                             const std::string& B,
                                             const ConstructorMapping& m) {
  const InductiveDecl& da = env.inductive_or_throw(A);
  const InductiveDecl& db = env.inductive_or_throw(B);
  size_t n = da.ctors.size();
  std::vector<int> ida(n);
  for (size_t j = 0; j < n; ++j) ida[j] = (int)j;

  detail::NativeSide sideA{env, da, ida};
  detail::NativeSide sideB{env, db, m.perm};

  Configuration cfg;
  cfg.id = "perm_" + A + "_" + B;
  for (int p : m.perm) cfg.id += "_" + std::to_string(p);
  cfg.type_a = sideA.type();
  cfg.type_b = sideB.type();
  for (size_t j = 0; j < n; ++j) {
    cfg.dep_constr_a.push_back(sideA.dep_constr((int)j));
    cfg.dep_constr_b.push_back(sideB.dep_constr((int)j));
  }
  cfg.dep_elim_a = sideA.dep_elim();
  cfg.dep_elim_b = sideB.dep_elim();
  cfg.eta_a = sideA.eta();
  cfg.eta_b = sideB.eta();

  // derive the definitional iota witnesses from their own statements
  detail::ConfigAnalyzer an(env, cfg.trusted);
  detail::SideRoles ra{'a', cfg.type_a, cfg.dep_constr_a, cfg.dep_elim_a, cfg.eta_a,
                       nullptr,         {}};
  detail::SideRoles rb{'b', cfg.type_b, cfg.dep_constr_b, cfg.dep_elim_b, cfg.eta_b,
                       nullptr,         {}};
  detail::SideInfo ia, ib;
  an.analyze_side(ra, ia);
  an.analyze_side(rb, ib);
  cfg.eta_ok_a = ra.eta_ok;
  cfg.eta_ok_b = rb.eta_ok;
  for (size_t j = 0; j < n; ++j) {
    cfg.iota_a.push_back(detail::last_arg_lambda(an.iota_statement(ra, ia, (int)j)));
    cfg.iota_b.push_back(detail::last_arg_lambda(an.iota_statement(rb, ib, (int)j)));
  }
  return cfg;
}

}  // namespace pml
