#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus_util.hpp"
#include "pml/decompile.hpp"
#include "pml/printer.hpp"
#include "pml/transform.hpp"

using namespace pml;

namespace {

cor::Loaded& corpus() {
  static cor::Loaded L = cor::load_corpus();
  return L;
}

TermPtr parse_in(const GlobalEnv& env, const std::string& s) {
  return resolve(env, parse_term(s));
}

Goal goal_of(const TermPtr& type) { return Goal{Context{}, type}; }

// env with the swapped list module repaired, shared across cases
GlobalEnv& swapped() {
  static GlobalEnv env = repair_module(
      corpus().env, corpus().configs.at("swap"),
      {"app", "rev", "app_nil_r", "app_assoc", "rev_app_distr", "rev_app_nil"});
  return env;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

size_t count_of(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

bool norm_alpha_eq(const GlobalEnv& env, const TermPtr& a, const TermPtr& b) {
  return alpha_key(normalize(env, a)) == alpha_key(normalize(env, b));
}

}  // namespace

TEST_CASE("lambdas introduce and pair constructors split") {
  auto& env = corpus().env;

  TermPtr id = parse_in(env, "fun (n : nat) => n");
  QtacPtr s = decompile(env, Context{}, id);
  CHECK(print_script(s) == "intro n. apply (n).\n");
  TermPtr idt = parse_in(env, "nat -> nat");
  TermPtr r = replay(env, goal_of(idt), s);
  CHECK(norm_alpha_eq(env, r, id));

  TermPtr pr = parse_in(env, "Constr(0, and nat bool) O true");
  check_type(env, Context{}, pr, parse_in(env, "and nat bool"));
  QtacPtr sp = decompile(env, Context{}, pr);
  REQUIRE(sp->kind == Qtac::Kind::Split);
  std::string txt = print_script(sp);
  CHECK(contains(txt, "split."));
  CHECK(contains(txt, "- apply (O)."));
  CHECK(contains(txt, "- apply (true)."));
  TermPtr rp = replay(env, goal_of(parse_in(env, "and nat bool")), sp);
  CHECK(norm_alpha_eq(env, rp, pr));

  CHECK_THROWS_AS(replay(env, goal_of(parse_in(env, "nat")), sp), ReplayFailed);
}

TEST_CASE("sum constructors choose a side") {
  auto& env = corpus().env;

  TermPtr l = parse_in(env, "Constr(0, or nat bool) O");
  QtacPtr sl = decompile(env, Context{}, l);
  REQUIRE(sl->kind == Qtac::Kind::Left);
  CHECK(print_script(sl) == "left. apply (O).\n");
  CHECK(norm_alpha_eq(env, replay(env, goal_of(parse_in(env, "or nat bool")), sl), l));

  TermPtr r = parse_in(env, "Constr(1, or nat bool) true");
  QtacPtr sr = decompile(env, Context{}, r);
  REQUIRE(sr->kind == Qtac::Kind::Right);
  CHECK(norm_alpha_eq(env, replay(env, goal_of(parse_in(env, "or nat bool")), sr), r));
}

TEST_CASE("equality steps: symmetry, reflexivity, both rewrite directions") {
  auto& env = corpus().env;

  TermPtr t = parse_in(env, "fun (m : nat) => eq_sym nat m m (Constr(0, eq nat m))");
  QtacPtr s = decompile(env, Context{}, t);
  CHECK(print_script(s) == "intro m. symmetry. reflexivity.\n");
  TermPtr ty = parse_in(env, "forall (m : nat), eq nat m m");
  CHECK(norm_alpha_eq(env, replay(env, goal_of(ty), s), t));

  // a forward rewrite: eliminate a hypothesis left to right
  TermPtr fw = parse_in(env,
      "fun (a : nat) (b : nat) (H : eq nat a b) => "
      "Elim(H, fun (c : nat) (e : eq nat a c) => eq nat a c) { Constr(0, eq nat a) }");
  QtacPtr sf = decompile(env, Context{}, fw);
  std::string ftxt = print_script(sf);
  CHECK(contains(ftxt, "rewrite (H)"));
  CHECK(!contains(ftxt, "rewrite <-"));
  TermPtr fwty = parse_in(env, "forall (a : nat) (b : nat), eq nat a b -> eq nat a b");
  CHECK(norm_alpha_eq(env, replay(env, goal_of(fwty), sf), fw));

  // rewriting with a flipped equation carries the opposite direction flag
  TermPtr bw = parse_in(env,
      "fun (a : nat) (b : nat) (H : eq nat a b) => "
      "Elim(eq_sym nat a b H, fun (c : nat) (e : eq nat b c) => eq nat c b) "
      "{ Constr(0, eq nat b) }");
  QtacPtr sb = decompile(env, Context{}, bw);
  std::string btxt = print_script(sb);
  CHECK(contains(btxt, "rewrite <- (eq_sym nat a b H)"));
  TermPtr bwty = parse_in(env, "forall (a : nat) (b : nat), eq nat a b -> eq nat a b");
  CHECK(norm_alpha_eq(env, replay(env, goal_of(bwty), sb), bw));
}

TEST_CASE("the repaired nil-case lemma decompiles to the expected script") {
  GlobalEnv& env = swapped();
  const Definition* d = env.definition("rev_app_nil_swap");
  REQUIRE(d);

  QtacPtr s = decompile(env, Context{}, d->body);
  TermPtr r = replay(env, goal_of(d->type), s);
  check_type(env, Context{}, r, d->type);
  CHECK(norm_alpha_eq(env, r, d->body));

  QtacPtr simp = simplify_script(env, goal_of(d->type), s);
  std::string txt = print_script(simp);
  CHECK(contains(txt, "intros T y0."));
  CHECK(contains(txt, "induction (y0)."));
  CHECK(count_of(txt, "\n- ") + (txt.rfind("- ", 0) == 0 ? 1 : 0) == 2);  // two branches
  CHECK(contains(txt, "intros a l H."));
  CHECK(contains(txt, "rewrite (app_nil_r_swap"));
  CHECK(count_of(txt, "reflexivity.") == 2);  // each branch closes reflexively

  TermPtr rs = replay(env, goal_of(d->type), simp);
  check_type(env, Context{}, rs, d->type);

  // the simplified script is the golden one, byte for byte
  std::string golden = cor::read_file(cor::corpus_path("golden/rev_app_nil_swap.qtac"));
  CHECK(txt == golden);

  // and the golden text parses back into a script that closes the goal
  QtacPtr back = parse_script(env, golden);
  CHECK(print_script(back) == golden);
  TermPtr rb = replay(env, goal_of(d->type), back);
  check_type(env, Context{}, rb, d->type);
}

TEST_CASE("every corpus definition replays to its own type") {
  GlobalEnv& env = swapped();
  Checker ck(env);
  int replayed = 0;
  for (auto& name : env.order) {
    const Definition* d = env.definition(name);
    if (!d) continue;
    QtacPtr s = decompile(env, Context{}, d->body);
    TermPtr r = replay(env, goal_of(d->type), s);
    ck.check(Context{}, r, d->type);
    ++replayed;
  }
  CHECK(replayed > 60);
}

TEST_CASE("replayed list-module proofs are the original terms up to normalization") {
  GlobalEnv& env = swapped();
  for (const char* name : {"app", "rev", "app_nil_r", "app_assoc", "rev_app_distr",
                           "rev_app_nil", "app_swap", "rev_swap", "app_nil_r_swap",
                           "app_assoc_swap", "rev_app_distr_swap", "rev_app_nil_swap"}) {
    const Definition* d = env.definition(name);
    REQUIRE(d);
    QtacPtr s = decompile(env, Context{}, d->body);
    TermPtr r = replay(env, goal_of(d->type), s);
    CHECK(norm_alpha_eq(env, r, d->body));
  }
}

TEST_CASE("simplification merges intros and drops inferable motives") {
  auto& env = corpus().env;

  const Definition* add = env.definition("add");
  REQUIRE(add);
  QtacPtr s = decompile(env, Context{}, add->body);
  std::string before = print_script(s);
  CHECK(contains(before, "intro n. intro m."));
  CHECK(contains(before, "induction (n) motive"));

  QtacPtr simp = simplify_script(env, goal_of(add->type), s);
  std::string after = print_script(simp);
  CHECK(contains(after, "intros n m."));
  CHECK(contains(after, "induction (n).\n"));
  CHECK(!contains(after, "motive"));
  TermPtr r = replay(env, goal_of(add->type), simp);
  check_type(env, Context{}, r, add->type);

  // the inner rewrite of app_nil_r has a motive replay cannot re-infer:
  // dropping it is tried, fails, and the original argument is kept
  const Definition* anr = env.definition("app_nil_r");
  REQUIRE(anr);
  QtacPtr s2 = decompile(env, Context{}, anr->body);
  QtacPtr simp2 = simplify_script(env, goal_of(anr->type), s2);
  std::string after2 = print_script(simp2);
  CHECK(contains(after2, "induction (l).\n"));          // outer motive re-inferred
  CHECK(contains(after2, "rewrite (IH) motive ("));      // inner motive kept
  TermPtr r2 = replay(env, goal_of(anr->type), simp2);
  check_type(env, Context{}, r2, anr->type);
}

TEST_CASE("hints replace subtrees only when replay still succeeds") {
  auto& env = corpus().env;
  TermPtr t = parse_in(env, "fun (m : nat) => eq_sym nat m m (Constr(0, eq nat m))");
  TermPtr ty = parse_in(env, "forall (m : nat), eq nat m m");
  QtacPtr s = decompile(env, Context{}, t);
  REQUIRE(print_script(s) == "intro m. symmetry. reflexivity.\n");

  // a hint that closes the post-intro goal directly shortens the script
  QtacPtr simp = simplify_script(env, goal_of(ty), s, {{"direct", q_reflexivity()}});
  CHECK(print_script(simp) == "intro m. reflexivity.\n");
  check_type(env, Context{}, replay(env, goal_of(ty), simp), ty);

  // a hint that never replays leaves the script untouched
  QtacPtr bad = q_split(q_reflexivity(), q_reflexivity());
  QtacPtr same = simplify_script(env, goal_of(ty), s, {{"bad", bad}});
  CHECK(print_script(same) == print_script(s));
}

TEST_CASE("printed scripts parse back to the same text") {
  GlobalEnv& env = swapped();
  for (const char* name : {"add", "add_n_Sm", "rev_app_distr_swap", "rev_app_nil_swap",
                           "length", "N_peano_rect"}) {
    const Definition* d = env.definition(name);
    REQUIRE(d);
    QtacPtr s = decompile(env, Context{}, d->body);
    std::string p1 = print_script(s);
    QtacPtr back = parse_script(env, p1);
    CHECK(print_script(back) == p1);
    TermPtr r = replay(env, goal_of(d->type), back);
    check_type(env, Context{}, r, d->type);
  }
}
