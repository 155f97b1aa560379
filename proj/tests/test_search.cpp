#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pml/prelude.hpp"
#include "pml/printer.hpp"
#include "pml/search.hpp"

using namespace pml;

namespace {

const GlobalEnv& penv() {
  static GlobalEnv env = load_prelude();
  return env;
}

GlobalEnv with_enums() {
  GlobalEnv env = penv();
  for (const auto& cmd : parse_file(R"(
Inductive color : Type0 := red : color | green : color | blue : color.
Inductive hue : Type0 := blue : hue | red : hue | green : hue.
Inductive ab : Type0 := x : ab | y : ab.
Inductive cd : Type0 := y : cd | x : cd.
)"))
    env = exec_decl(env, cmd);
  return env;
}

TermPtr nat_lit(unsigned k) {
  TermPtr t = mk_constr(0, mk_ind("nat"));
  while (k--) t = mk_app(mk_constr(1, mk_ind("nat")), t);
  return t;
}

TermPtr list_lit(const std::string& name, int cons_idx, int nil_idx,
                 const std::vector<TermPtr>& elems) {
  TermPtr ind = mk_app(mk_ind(name), mk_ind("nat"));
  TermPtr t = mk_constr(nil_idx, ind);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    t = mk_app(mk_app(mk_constr(cons_idx, ind), *it), t);
  return t;
}

}  // namespace

TEST_CASE("nat onto itself admits only the identity mapping") {
  auto ms = find_permutations(penv(), "nat", "nat");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].perm == std::vector<int>{0, 1});
  CHECK(ms[0].name_matches == 2);
  CHECK(ms[0].name_distance == 0);
}

TEST_CASE("the list variants admit exactly the swap") {
  // the identity mapping is type-incorrect: it would send nil to cons
  auto ms = find_permutations(penv(), "Old.list", "New.list");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].perm == std::vector<int>{1, 0});
  CHECK(ms[0].name_matches == 2);
}

TEST_CASE("nullary enums admit every permutation, names rank them") {
  GlobalEnv env = with_enums();
  auto ms = find_permutations(env, "color", "hue");
  REQUIRE(ms.size() == 6);
  // red/green/blue in color map onto the same names in hue
  CHECK(ms[0].perm == std::vector<int>{1, 2, 0});
  CHECK(ms[0].name_matches == 3);
  for (size_t i = 1; i < ms.size(); ++i) CHECK(ms[i].name_matches < 3);
  // every result is a permutation of 0..2
  for (auto& m : ms) {
    std::vector<int> s = m.perm;
    std::sort(s.begin(), s.end());
    CHECK(s == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("name matches dominate, then distance, then lexicographic order") {
  GlobalEnv env = with_enums();
  auto ms = find_permutations(env, "ab", "cd");
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].perm == std::vector<int>{1, 0});  // x -> x, y -> y
  CHECK(ms[0].name_matches == 2);
  CHECK(ms[1].perm == std::vector<int>{0, 1});

  // all-different names tie on matches and distance; order is lexicographic
  auto tie = find_permutations(env, "ab", "bool");
  REQUIRE(tie.size() == 2);
  CHECK(tie[0].name_matches == 0);
  CHECK(tie[0].name_matches == tie[1].name_matches);
  CHECK(tie[0].perm == std::vector<int>{0, 1});
}

TEST_CASE("constructor count mismatch is an error, shape mismatch is empty") {
  CHECK_THROWS_WITH_AS(find_permutations(penv(), "unit", "bool"),
                       doctest::Contains("constructor counts differ"), KernelError);
  // indexed families are not searchable
  CHECK(find_permutations(penv(), "vector", "vector").empty());
  // parameter telescopes must agree
  CHECK(find_permutations(penv(), "Old.list", "N").empty());
}

TEST_CASE("the swap mapping yields a valid configuration") {
  GlobalEnv env = penv();
  auto ms = find_permutations(env, "Old.list", "New.list");
  REQUIRE(ms.size() == 1);
  Configuration cfg = config_from_permutation(env, "Old.list", "New.list", ms[0]);
  CHECK(cfg.id == "perm_Old.list_New.list_1_0");
  ValidationReport rep = validate_configuration(env, cfg);
  INFO(rep.summary());
  CHECK(rep.ok());
  for (auto& c : rep.items) CHECK_FALSE(c.trusted);  // nothing taken on faith
}

TEST_CASE("the swap equivalence round-trips every small list") {
  GlobalEnv env = penv();
  auto ms = find_permutations(env, "Old.list", "New.list");
  Configuration cfg = config_from_permutation(env, "Old.list", "New.list", ms[0]);
  Equivalence eqv = synthesize_equivalence(env, cfg);

  std::string why;
  CHECK(check_equivalence(env, cfg, eqv, &why));
  CHECK(why.empty());

  // every list over {0, 1} of length <= 3
  std::vector<std::vector<TermPtr>> pools{{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::vector<TermPtr>> next;
    for (auto& p : pools)
      if ((int)p.size() == len - 1)
        for (unsigned b = 0; b <= 1; ++b) {
          auto q = p;
          q.push_back(nat_lit(b));
          next.push_back(q);
        }
    pools.insert(pools.end(), next.begin(), next.end());
  }
  CHECK(pools.size() == 15);
  for (auto& elems : pools) {
    TermPtr a = list_lit("Old.list", 1, 0, elems);
    TermPtr b = list_lit("New.list", 0, 1, elems);
    TermPtr fa = mk_app(eqv.f, {mk_ind("nat"), a});
    CHECK(alpha_eq(normalize(env, fa), b));
    TermPtr gfa = mk_app(eqv.g, {mk_ind("nat"), fa});
    CHECK(alpha_eq(normalize(env, gfa), a));
  }
}

TEST_CASE("the identity mapping on nat synthesizes the identity equivalence") {
  GlobalEnv env = penv();
  auto ms = find_permutations(env, "nat", "nat");
  Configuration cfg = config_from_permutation(env, "nat", "nat", ms[0]);
  REQUIRE(validate_configuration(env, cfg).ok());
  Equivalence eqv = synthesize_equivalence(env, cfg);
  for (unsigned k = 0; k <= 8; ++k) {
    CHECK(alpha_eq(normalize(env, mk_app(eqv.f, nat_lit(k))), nat_lit(k)));
    CHECK(alpha_eq(normalize(env, mk_app(eqv.g, mk_app(eqv.f, nat_lit(k)))), nat_lit(k)));
  }
}

TEST_CASE("mappings and generated configurations are deterministic") {
  GlobalEnv env = with_enums();
  auto m1 = find_permutations(env, "color", "hue");
  auto m2 = find_permutations(env, "color", "hue");
  REQUIRE(m1.size() == m2.size());
  for (size_t i = 0; i < m1.size(); ++i) CHECK(m1[i].perm == m2[i].perm);
  Configuration c1 = config_from_permutation(env, "color", "hue", m1[0]);
  Configuration c2 = config_from_permutation(env, "color", "hue", m2[0]);
  CHECK(print_term(c1.dep_elim_b) == print_term(c2.dep_elim_b));
  CHECK(print_term(c1.iota_b[2]) == print_term(c2.iota_b[2]));
  CHECK(validate_configuration(env, c1).ok());
  Equivalence eqv = synthesize_equivalence(env, c1);
  // constructors travel along the permutation
  for (int j = 0; j < 3; ++j) {
    TermPtr img = normalize(env, mk_app(eqv.f, mk_constr(j, mk_ind("color"))));
    CHECK(alpha_eq(img, mk_constr(m1[0].perm[j], mk_ind("hue"))));
  }
}
