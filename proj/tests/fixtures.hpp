#pragma once

// Hand-built declarations used by the kernel tests. Deliberately constructed
// term by term rather than parsed, so the kernel is exercised on its own.

#include "pml/typecheck.hpp"

namespace fix {

using namespace pml;

inline TermPtr nat() { return mk_ind("nat"); }
inline TermPtr nat_O() { return mk_constr(0, nat()); }
inline TermPtr nat_S(TermPtr t) { return mk_app(mk_constr(1, nat()), std::move(t)); }
inline TermPtr nat_lit(int n) {
  TermPtr t = nat_O();
  for (int i = 0; i < n; ++i) t = nat_S(t);
  return t;
}

inline InductiveDecl nat_decl() {
  InductiveDecl d;
  d.name = "nat";
  d.arity = mk_sort(0);
  d.ctors = {{"O", nat()}, {"S", mk_pi("n", nat(), nat())}};
  return d;
}

inline InductiveDecl bool_decl() {
  InductiveDecl d;
  d.name = "bool";
  d.arity = mk_sort(0);
  d.ctors = {{"true", mk_ind("bool")}, {"false", mk_ind("bool")}};
  return d;
}

inline InductiveDecl unit_decl() {
  InductiveDecl d;
  d.name = "unit";
  d.arity = mk_sort(0);
  d.ctors = {{"tt", mk_ind("unit")}};
  return d;
}

// list (T : Type0) with nil then cons.
inline InductiveDecl list_decl(const std::string& name = "list", bool swapped = false) {
  InductiveDecl d;
  d.name = name;
  d.params = {{"T", mk_sort(0)}};
  d.arity = mk_sort(0);
  TermPtr self0 = mk_app(mk_ind(name), mk_var(0, "T"));
  TermPtr nil = self0;
  TermPtr cons = mk_pi("t", mk_var(0, "T"),
                       mk_pi("l", mk_app(mk_ind(name), mk_var(1, "T")),
                             mk_app(mk_ind(name), mk_var(2, "T"))));
  if (swapped)
    d.ctors = {{"cons", cons}, {"nil", nil}};
  else
    d.ctors = {{"nil", nil}, {"cons", cons}};
  return d;
}

// eq (A : Type0) (a : A) : A -> Type0 with eq_refl.
inline InductiveDecl eq_decl() {
  InductiveDecl d;
  d.name = "eq";
  d.params = {{"A", mk_sort(0)}, {"a", mk_var(0, "A")}};
  d.arity = mk_pi("b", mk_var(1, "A"), mk_sort(0));
  d.ctors = {{"eq_refl", mk_app(mk_app(mk_app(mk_ind("eq"), mk_var(1, "A")), mk_var(0, "a")),
                                mk_var(0, "a"))}};
  return d;
}

// vector (T : Type0) : nat -> Type0.
inline InductiveDecl vector_decl() {
  InductiveDecl d;
  d.name = "vector";
  d.params = {{"T", mk_sort(0)}};
  d.arity = mk_pi("n", nat(), mk_sort(0));
  auto vec = [](TermPtr T, TermPtr n) {
    return mk_app(mk_app(mk_ind("vector"), std::move(T)), std::move(n));
  };
  TermPtr vnil = vec(mk_var(0, "T"), nat_O());
  TermPtr vcons =
      mk_pi("n", nat(),
            mk_pi("t", mk_var(1, "T"),
                  mk_pi("v", vec(mk_var(2, "T"), mk_var(1, "n")),
                        vec(mk_var(3, "T"), nat_S(mk_var(2, "n"))))));
  d.ctors = {{"vnil", vnil}, {"vcons", vcons}};
  return d;
}

inline GlobalEnv base_env() {
  GlobalEnv env;
  env = declare_inductive(env, nat_decl());
  env = declare_inductive(env, bool_decl());
  env = declare_inductive(env, unit_decl());
  env = declare_inductive(env, list_decl());
  env = declare_inductive(env, eq_decl());
  env = declare_inductive(env, vector_decl());
  return env;
}

// add n m = Elim(n, fun _ => nat) { m | fun k ih => S ih }
inline TermPtr add_body() {
  TermPtr motive = mk_lam("_", nat(), nat());
  TermPtr step = mk_lam("k", nat(), mk_lam("ih", nat(), nat_S(mk_var(0, "ih"))));
  TermPtr body = mk_elim(mk_var(1, "n"), motive, {mk_var(0, "m"), step});
  return mk_lam("n", nat(), mk_lam("m", nat(), body));
}

inline TermPtr list_lit(const std::string& name, TermPtr T, const std::vector<TermPtr>& elems) {
  TermPtr ind = mk_app(mk_ind(name), T);
  TermPtr t = mk_constr(0, ind);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    t = mk_app(mk_app(mk_constr(1, ind), *it), t);
  return t;
}

}  // namespace fix
