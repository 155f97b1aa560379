#pragma once

// The standard library: core inductives, projections, equality tools, the
// list variants, vectors, and binary naturals with their Peano recursors.

#include "pml/typecheck.hpp"
#include "pml/vernacular.hpp"

namespace pml {

inline GlobalEnv exec_decl(const GlobalEnv& env, const Vernacular& v) {
  if (auto* i = std::get_if<VInductive>(&v)) {
    InductiveDecl d = i->decl;
    for (auto& [n, ty] : d.params) ty = resolve(env, ty);
    d.arity = resolve(env, d.arity);
    for (auto& [n, ty] : d.ctors) ty = resolve(env, ty);
    return declare_inductive(env, d);
  }
  if (auto* d = std::get_if<VDefinition>(&v))
    return define_constant(env, d->name, resolve(env, d->type), resolve(env, d->body));
  if (auto* a = std::get_if<VAxiom>(&v))
    return assume_constant(env, a->name, resolve(env, a->type));
  throw KernelError("Unsupported", "command requires the full interpreter");
}

inline const char* prelude_text() {
  return R"PML(
(* ----- core data ----- *)

Inductive nat : Type0 := O : nat | S : nat -> nat.
Definition O : nat := Constr(0, nat).
Definition S : nat -> nat := fun (n : nat) => Constr(1, nat) n.

Inductive bool : Type0 := true : bool | false : bool.
Definition true : bool := Constr(0, bool).
Definition false : bool := Constr(1, bool).

Inductive unit : Type0 := tt : unit.
Definition tt : unit := Constr(0, unit).

Inductive eq (A : Type0) (a : A) : A -> Type0 := eq_refl : eq A a a.

Inductive sigma (A : Type0) (B : A -> Type0) : Type0 :=
  exist : forall (a : A) (b : B a), sigma A B.

Inductive sum (A : Type0) (B : Type0) : Type0 :=
  inl : A -> sum A B | inr : B -> sum A B.

Definition pi_l : forall (A : Type0) (B : A -> Type0), sigma A B -> A :=
  fun (A : Type0) (B : A -> Type0) (s : sigma A B) =>
    Elim(s, fun (s' : sigma A B) => A) { fun (a : A) (b : B a) => a }.

Definition pi_r : forall (A : Type0) (B : A -> Type0) (s : sigma A B), B (pi_l A B s) :=
  fun (A : Type0) (B : A -> Type0) (s : sigma A B) =>
    Elim(s, fun (s' : sigma A B) => B (pi_l A B s')) { fun (a : A) (b : B a) => b }.

Definition eq_sym : forall (A : Type0) (a : A) (b : A), eq A a b -> eq A b a :=
  fun (A : Type0) (a : A) (b : A) (H : eq A a b) =>
    Elim(H, fun (b' : A) (e : eq A a b') => eq A b' a) { Constr(0, eq A a) }.

Definition and : Type0 -> Type0 -> Type0 :=
  fun (A : Type0) (B : Type0) => sigma A (fun (a : A) => B).

Definition or : Type0 -> Type0 -> Type0 := fun (A : Type0) (B : Type0) => sum A B.

(* ----- list variants: the same type up to constructor order ----- *)

Inductive Old.list (T : Type0) : Type0 :=
  nil : Old.list T | cons : T -> Old.list T -> Old.list T.

Inductive New.list (T : Type0) : Type0 :=
  cons : T -> New.list T -> New.list T | nil : New.list T.

(* ----- length-indexed vectors and their packed form ----- *)

Inductive vector (T : Type0) : nat -> Type0 :=
  vnil : vector T O
| vcons : forall (n : nat), T -> vector T n -> vector T (S n).

Definition packed_vect : Type0 -> Type0 :=
  fun (T : Type0) => sigma nat (fun (n : nat) => vector T n).

(* ----- binary naturals ----- *)

Inductive positive : Type0 :=
  xH : positive | xO : positive -> positive | xI : positive -> positive.
Definition xH : positive := Constr(0, positive).
Definition xO : positive -> positive := fun (p : positive) => Constr(1, positive) p.
Definition xI : positive -> positive := fun (p : positive) => Constr(2, positive) p.

Definition succ_pos : positive -> positive :=
  fun (p : positive) =>
    Elim(p, fun (q : positive) => positive) {
      xO xH
    | fun (q : positive) (IH : positive) => xI q
    | fun (q : positive) (IH : positive) => xO IH
    }.

Inductive N : Type0 := N0 : N | Npos : positive -> N.
Definition N0 : N := Constr(0, N).
Definition Npos : positive -> N := fun (p : positive) => Constr(1, N) p.

Definition N_succ : N -> N :=
  fun (n : N) =>
    Elim(n, fun (m : N) => N) { Npos xH | fun (p : positive) => Npos (succ_pos p) }.

(* Peano-style recursion over the binary representation. The motive
   generalizes over the eliminated predicate so that the even case can
   recurse at the doubled predicate. *)
Definition peano_rect_pos :
  forall (p : positive) (P : positive -> Type0),
    P xH -> (forall (q : positive), P q -> P (succ_pos q)) -> P p :=
  fun (p : positive) =>
    Elim(p, fun (p' : positive) =>
          forall (P : positive -> Type0),
            P xH -> (forall (q : positive), P q -> P (succ_pos q)) -> P p') {
      fun (P : positive -> Type0) (a : P xH)
          (f : forall (q : positive), P q -> P (succ_pos q)) => a
    | fun (q : positive)
          (IH : forall (P : positive -> Type0),
                  P xH -> (forall (r : positive), P r -> P (succ_pos r)) -> P q)
          (P : positive -> Type0) (a : P xH)
          (f : forall (r : positive), P r -> P (succ_pos r)) =>
        IH (fun (r : positive) => P (xO r)) (f xH a)
           (fun (r : positive) (x : P (xO r)) => f (xI r) (f (xO r) x))
    | fun (q : positive)
          (IH : forall (P : positive -> Type0),
                  P xH -> (forall (r : positive), P r -> P (succ_pos r)) -> P q)
          (P : positive -> Type0) (a : P xH)
          (f : forall (r : positive), P r -> P (succ_pos r)) =>
        f (xO q)
          (IH (fun (r : positive) => P (xO r)) (f xH a)
              (fun (r : positive) (x : P (xO r)) => f (xI r) (f (xO r) x)))
    }.

Definition N_peano_rect :
  forall (n : N) (P : N -> Type0),
    P N0 -> (forall (m : N), P m -> P (N_succ m)) -> P n :=
  fun (n : N) =>
    Elim(n, fun (n' : N) =>
          forall (P : N -> Type0),
            P N0 -> (forall (m : N), P m -> P (N_succ m)) -> P n') {
      fun (P : N -> Type0) (a : P N0)
          (f : forall (m : N), P m -> P (N_succ m)) => a
    | fun (p : positive) (P : N -> Type0) (a : P N0)
          (f : forall (m : N), P m -> P (N_succ m)) =>
        peano_rect_pos p (fun (q : positive) => P (Npos q)) (f N0 a)
                       (fun (q : positive) (x : P (Npos q)) => f (Npos q) x)
    }.

(* The successor reduction law, propositional over the binary encoding. *)
Definition peano_rect_succ_pos :
  forall (p : positive) (P : positive -> Type0) (a : P xH)
         (f : forall (q : positive), P q -> P (succ_pos q)),
    eq (P (succ_pos p)) (peano_rect_pos (succ_pos p) P a f)
       (f p (peano_rect_pos p P a f)) :=
  fun (p : positive) =>
    Elim(p, fun (p' : positive) =>
          forall (P : positive -> Type0) (a : P xH)
                 (f : forall (q : positive), P q -> P (succ_pos q)),
            eq (P (succ_pos p')) (peano_rect_pos (succ_pos p') P a f)
               (f p' (peano_rect_pos p' P a f))) {
      fun (P : positive -> Type0) (a : P xH)
          (f : forall (q : positive), P q -> P (succ_pos q)) =>
        Constr(0, eq (P (succ_pos xH)) (peano_rect_pos (succ_pos xH) P a f))
    | fun (q : positive)
          (IH : forall (P : positive -> Type0) (a : P xH)
                       (f : forall (r : positive), P r -> P (succ_pos r)),
                  eq (P (succ_pos q)) (peano_rect_pos (succ_pos q) P a f)
                     (f q (peano_rect_pos q P a f)))
          (P : positive -> Type0) (a : P xH)
          (f : forall (r : positive), P r -> P (succ_pos r)) =>
        Constr(0, eq (P (succ_pos (xO q))) (peano_rect_pos (succ_pos (xO q)) P a f))
    | fun (q : positive)
          (IH : forall (P : positive -> Type0) (a : P xH)
                       (f : forall (r : positive), P r -> P (succ_pos r)),
                  eq (P (succ_pos q)) (peano_rect_pos (succ_pos q) P a f)
                     (f q (peano_rect_pos q P a f)))
          (P : positive -> Type0) (a : P xH)
          (f : forall (r : positive), P r -> P (succ_pos r)) =>
        IH (fun (r : positive) => P (xO r)) (f xH a)
           (fun (r : positive) (x : P (xO r)) => f (xI r) (f (xO r) x))
    }.

Definition N_peano_rect_succ :
  forall (P : N -> Type0) (a : P N0) (f : forall (m : N), P m -> P (N_succ m))
         (m : N),
    eq (P (N_succ m)) (N_peano_rect (N_succ m) P a f)
       (f m (N_peano_rect m P a f)) :=
  fun (P : N -> Type0) (a : P N0) (f : forall (m : N), P m -> P (N_succ m))
      (m : N) =>
    Elim(m, fun (m' : N) =>
          eq (P (N_succ m')) (N_peano_rect (N_succ m') P a f)
             (f m' (N_peano_rect m' P a f))) {
      Constr(0, eq (P (N_succ N0)) (N_peano_rect (N_succ N0) P a f))
    | fun (p : positive) =>
        peano_rect_succ_pos p (fun (q : positive) => P (Npos q)) (f N0 a)
                            (fun (q : positive) (x : P (Npos q)) => f (Npos q) x)
    }.
)PML";
}

inline GlobalEnv load_prelude(GlobalEnv env = GlobalEnv{}) {
  for (const auto& cmd : parse_file(prelude_text())) env = exec_decl(env, cmd);
  return env;
}

}  // namespace pml
