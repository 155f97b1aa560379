#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "pml/printer.hpp"
#include "pml/vernacular.hpp"

using namespace pml;

static void roundtrip(const TermPtr& t) {
  static const GlobalEnv env = fix::base_env();
  std::string s = print_term(t);
  CAPTURE(s);
  TermPtr back;
  REQUIRE_NOTHROW(back = resolve(env, parse_term(s)));
  CHECK(alpha_eq(back, t));
  // determinism and print-parse-print fixpoint
  CHECK(print_term(t) == s);
  CHECK(print_term(back) == s);
}

TEST_CASE("parse: core term forms") {
  TermPtr id = parse_term("fun (T : Type0) (x : T) => x");
  CHECK(alpha_eq(id, mk_lam("T", mk_sort(0), mk_lam("x", mk_var(0), mk_var(0)))));

  TermPtr pi = parse_term("forall (T : Type0), T -> T");
  CHECK(alpha_eq(pi, mk_pi("T", mk_sort(0), mk_pi("_", mk_var(0), mk_var(1)))));

  TermPtr c = parse_term("Constr(1, list T) x l");
  CHECK(c->tag == Tag::App);
  std::vector<TermPtr> args;
  TermPtr head = spine_head(c, args);
  CHECK(head->tag == Tag::Constr);
  CHECK(head->n == 1);
  CHECK(args.size() == 2);

  TermPtr e = parse_term("Elim(l, P) { pnil | fun (t : T) (l : LT) (IH : QQ) => t }");
  CHECK(e->tag == Tag::Elim);
  CHECK(e->ts.size() == 2);

  CHECK(parse_term("Type3")->tag == Tag::Sort);
  CHECK(parse_term("Type3")->n == 3);

  // qualified names keep their dots; trailing dot is not swallowed
  TermPtr q = parse_term("Old.list");
  CHECK(q->tag == Tag::Const);
  CHECK(q->s == "Old.list");
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_term("fun (x : T => x"), ParseError);
  CHECK_THROWS_AS(parse_term("(a b"), ParseError);
  CHECK_THROWS_AS(parse_term(""), ParseError);
  try {
    parse_term("forall (x : T)\n  t");  // missing comma
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("comments, including nested ones, are skipped") {
  TermPtr t = parse_term("fun (x : (* dom (* nested *) *) nat) => x (* tail *)");
  CHECK(t->tag == Tag::Lam);
  CHECK_THROWS_AS(parse_term("x (* open"), ParseError);
}

TEST_CASE("print/parse round-trips on structured terms") {
  GlobalEnv env = fix::base_env();
  roundtrip(fix::add_body());
  roundtrip(eliminator_type(env, "nat"));
  roundtrip(eliminator_type(env, "eq"));
  roundtrip(eliminator_type(env, "vector"));
  roundtrip(eliminator_term(env, "list"));
  roundtrip(fix::list_lit("list", fix::nat(), {fix::nat_lit(2), fix::nat_lit(0)}));
}

TEST_CASE("round-trips on random generated terms") {
  std::mt19937 rng(99);
  // reuse kernel fixtures' shapes: nested lambdas, elims, applications
  for (int i = 0; i < 30; ++i) {
    std::uniform_int_distribution<int> d(0, 2);
    TermPtr t;
    switch (d(rng)) {
      case 0: t = fix::add_body(); break;
      case 1:
        t = mk_lam("f", mk_pi("x", fix::nat(), fix::nat()),
                   mk_app(mk_var(0), fix::nat_lit(i % 4)));
        break;
      default:
        t = mk_elim(fix::nat_lit(i % 3), mk_lam("n", fix::nat(), mk_sort(0)),
                    {fix::nat(), mk_lam("k", fix::nat(), mk_lam("ih", mk_sort(0), mk_var(0)))});
    }
    roundtrip(t);
  }
}

TEST_CASE("binder collisions are renamed with primes") {
  // fun (x : Type0) (x : Type0) => <inner x> <outer x>
  TermPtr t = mk_lam("x", mk_sort(0), mk_lam("x", mk_sort(0),
                     mk_app(mk_var(0, "x"), mk_var(1, "x"))));
  std::string s = print_term(t);
  CHECK(s.find("x'") != std::string::npos);
  CHECK(alpha_eq(parse_term(s), t));

  // binder shadowing a global in use
  TermPtr g = mk_lam("nat", mk_sort(0), mk_app(mk_const("f"), mk_ind("nat")));
  std::string s2 = print_term(g);
  CHECK(s2.find("nat'") != std::string::npos);
  GlobalEnv env = fix::base_env();
  CHECK(alpha_eq(resolve(env, parse_term(s2)), g));
}

TEST_CASE("vernacular: inductive declaration parses to a 2-constructor decl") {
  auto cmds = parse_file(
      "Inductive list (T : Type0) : Type0 := nil : list T | cons : T -> list T -> list T.");
  REQUIRE(cmds.size() == 1);
  auto& vi = std::get<VInductive>(cmds[0]);
  CHECK(vi.decl.name == "list");
  CHECK(vi.decl.params.size() == 1);
  REQUIRE(vi.decl.ctors.size() == 2);
  CHECK(vi.decl.ctors[0].first == "nil");
  CHECK(alpha_eq(vi.decl.ctors[0].second, mk_app(mk_ind("list"), mk_var(0))));
  CHECK(alpha_eq(vi.decl.ctors[1].second,
                 mk_pi("_", mk_var(0),
                       mk_pi("_", mk_app(mk_ind("list"), mk_var(1)),
                             mk_app(mk_ind("list"), mk_var(2))))));
}

TEST_CASE("vernacular: full command mix parses") {
  std::string src = R"(
(* setup *)
Inductive nat : Type0 := O : nat | S : nat -> nat.
Definition one : nat := Constr(1, nat) Constr(0, nat).
Axiom admit : forall (T : Type0), T.
Configure swap Old.list New.list {
  dep_constr_a := a0 | a1 ;
  dep_elim_a := e ;
  eta_a := fun (T : Type0) (l : Old.list T) => l ;
  iota_a := i0 | i1 ;
  trusted := iota_b_1 ;
}.
Repair Old.list New.list in rev_app_distr mapping 0 suggest.
RepairModule Old.list New.list in app rev app_nil_r using swap.
Decompile rev_app_distr.
Annotate add_n_Sm as iota_a 1 at 0.1.2.
)";
  auto cmds = parse_file(src);
  REQUIRE(cmds.size() == 8);
  auto& cfg = std::get<VConfigure>(cmds[3]);
  CHECK(cfg.fields.at("dep_constr_a").size() == 2);
  CHECK(cfg.trusted == std::vector<std::string>{"iota_b_1"});
  auto& r1 = std::get<VRepair>(cmds[4]);
  CHECK(r1.targets == std::vector<std::string>{"rev_app_distr"});
  CHECK(r1.mapping == 0);
  CHECK(r1.suggest);
  CHECK_FALSE(r1.module);
  auto& r2 = std::get<VRepair>(cmds[5]);
  CHECK(r2.module);
  CHECK(r2.targets.size() == 3);
  CHECK(r2.config == "swap");
  auto& an = std::get<VAnnotate>(cmds[7]);
  CHECK(an.role == "iota_a");
  CHECK(an.index == 1);
  CHECK(an.path == TermPath{0, 1, 2});
}

TEST_CASE("empty file parses to no commands") { CHECK(parse_file("").empty()); }

TEST_CASE("resolve rewrites known inductives") {
  GlobalEnv env = fix::base_env();
  TermPtr t = parse_term("fun (l : list nat) => Constr(0, list nat)");
  TermPtr r = resolve(env, t);
  CHECK(r->a->a->tag == Tag::Ind);
  CHECK(alpha_eq(r, mk_lam("l", mk_app(mk_ind("list"), fix::nat()),
                           mk_constr(0, mk_app(mk_ind("list"), fix::nat())))));
}
