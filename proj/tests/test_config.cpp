#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus_util.hpp"
#include "pml/printer.hpp"

using namespace pml;

namespace {

cor::Loaded& corpus() {
  static cor::Loaded L = cor::load_corpus();
  return L;
}

}  // namespace

TEST_CASE("every corpus configuration validates with nothing on trust") {
  auto& L = corpus();
  REQUIRE(L.configs.size() == 4);
  for (const char* name : {"swap", "ij", "natbin", "packed"}) {
    CAPTURE(name);
    REQUIRE(L.configs.count(name));
    Configuration cfg = L.configs.at(name);
    ValidationReport rep = validate_configuration(L.env, cfg);
    INFO(rep.summary());
    CHECK(rep.ok());
    for (auto& c : rep.items) CHECK_FALSE(c.trusted);
    // definitional eta: the reflexivity witnesses get synthesized in place
    CHECK(cfg.eta_ok_a != nullptr);
    CHECK(cfg.eta_ok_b != nullptr);
  }
}

TEST_CASE("a corrupted iota fails and names the criterion") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("swap");
  cfg.iota_a[1] = cfg.iota_a[0];  // wrong constructor index
  ValidationReport rep = validate_configuration(L.env, cfg);
  CHECK_FALSE(rep.ok());
  const Criterion* c = rep.find("iota_ok_a_1");
  REQUIRE(c != nullptr);
  CHECK_FALSE(c->passed);
  CHECK_FALSE(c->detail.empty());
  // the rest of that side is intact
  CHECK(rep.find("iota_ok_a_0")->passed);
  CHECK(rep.find("elim_eta_a")->passed);
}

TEST_CASE("assumption-backed iota is rejected unless marked trusted") {
  auto& L = corpus();
  GlobalEnv env = L.env;
  Configuration cfg = L.configs.at("natbin");
  // restate the successor law as an axiom and use it in place of the proof
  const Definition* d = env.definition("iota_N_1");
  REQUIRE(d != nullptr);
  env = assume_constant(env, "iota_N_1_admitted", d->type);
  cfg.iota_b[1] = mk_const("iota_N_1_admitted");

  ValidationReport rep = validate_configuration(env, cfg);
  CHECK_FALSE(rep.ok());
  const Criterion* c = rep.find("iota_ok_b_1");
  REQUIRE(c != nullptr);
  CHECK(c->detail.find("assumption") != std::string::npos);

  cfg.trusted.insert("iota_ok_b_1");
  ValidationReport rep2 = validate_configuration(env, cfg);
  INFO(rep2.summary());
  CHECK(rep2.ok());
  CHECK(rep2.find("iota_ok_b_1")->trusted);
  // the type is still checked even on trust
  Configuration bad = cfg;
  bad.iota_b[1] = bad.iota_b[0];
  CHECK_FALSE(validate_configuration(env, bad).ok());
}

TEST_CASE("swap synthesis matches the hand-written list maps") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("swap");
  Equivalence eqv = synthesize_equivalence(L.env, cfg);
  std::string why;
  CHECK(check_equivalence(L.env, cfg, eqv, &why));
  CHECK(why == "");
  auto lists = cor::bit_lists(3);
  CHECK(lists.size() == 15);
  for (auto& elems : lists) {
    TermPtr a = cor::list_lit("Old.list", 1, 0, mk_ind("nat"), elems);
    TermPtr b = cor::list_lit("New.list", 0, 1, mk_ind("nat"), elems);
    TermPtr fa = mk_app(eqv.f, {mk_ind("nat"), a});
    CHECK(alpha_eq(normalize(L.env, fa), b));
    CHECK(alpha_eq(normalize(L.env, mk_app(eqv.g, {mk_ind("nat"), fa})), a));
    // and from the B side
    TermPtr gb = mk_app(eqv.g, {mk_ind("nat"), b});
    CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, {mk_ind("nat"), gb})), b));
  }
}

TEST_CASE("I/J synthesis factors through bool") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("ij");
  Equivalence eqv = synthesize_equivalence(L.env, cfg);
  TermPtr A = mk_constr(0, mk_ind("I")), B = mk_constr(1, mk_ind("I"));
  TermPtr jt = mk_app(mk_constr(0, mk_ind("J")), mk_constr(0, mk_ind("bool")));
  TermPtr jf = mk_app(mk_constr(0, mk_ind("J")), mk_constr(1, mk_ind("bool")));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, A)), jt));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, B)), jf));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.g, mk_app(eqv.f, A))), A));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.g, mk_app(eqv.f, B))), B));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, mk_app(eqv.g, jt))), jt));
  CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, mk_app(eqv.g, jf))), jf));
}

TEST_CASE("nat/N synthesis round-trips 0..8 despite the propositional iota") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("natbin");
  Equivalence eqv = synthesize_equivalence(L.env, cfg);
  for (unsigned k = 0; k <= 8; ++k) {
    TermPtr n = cor::nat_lit(k);
    TermPtr b = normalize(L.env, mk_app(eqv.f, n));
    CHECK(alpha_eq(b, cor::N_lit(k)));
    CHECK(alpha_eq(normalize(L.env, mk_app(eqv.g, b)), n));
    CHECK(alpha_eq(normalize(L.env, mk_app(eqv.f, mk_app(eqv.g, cor::N_lit(k)))),
                   cor::N_lit(k)));
  }
}

TEST_CASE("packed_vect synthesis carries lists into measured pairs") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("packed");
  Equivalence eqv = synthesize_equivalence(L.env, cfg);
  for (auto& elems : cor::bit_lists(2)) {
    TermPtr a = cor::list_lit("Old.list", 1, 0, mk_ind("nat"), elems);
    TermPtr fa = normalize(L.env, mk_app(eqv.f, {mk_ind("nat"), a}));
    // the left component of the pair is the length
    TermPtr fam = mk_lam("n", mk_ind("nat"), mk_app(mk_app(mk_ind("vector"), mk_ind("nat")),
                                                    mk_var(0)));
    TermPtr len = mk_app(mk_const("pi_l"), {mk_ind("nat"), fam, fa});
    CHECK(alpha_eq(normalize(L.env, len), cor::nat_lit((unsigned)elems.size())));
    CHECK(alpha_eq(normalize(L.env, mk_app(eqv.g, {mk_ind("nat"), fa})), a));
  }
}

TEST_CASE("check_equivalence rejects swapped components and assumptions") {
  auto& L = corpus();
  Configuration cfg = L.configs.at("swap");
  Equivalence eqv = synthesize_equivalence(L.env, cfg);

  Equivalence crossed = eqv;
  std::swap(crossed.f, crossed.g);
  std::string why;
  CHECK_FALSE(check_equivalence(L.env, cfg, crossed, &why));
  CHECK(why.find("f") == 0);

  GlobalEnv env = L.env;
  TermPtr fty = infer_type(env, Context{}, eqv.sect);
  env = assume_constant(env, "section_admitted", fty);
  Equivalence lazy = eqv;
  lazy.sect = mk_const("section_admitted");
  CHECK_FALSE(check_equivalence(env, cfg, lazy, &why));
  CHECK(why.find("assumption") != std::string::npos);
  CHECK(check_equivalence(env, cfg, lazy, &why, /*allow_assumptions=*/true));
}

TEST_CASE("every equivalence induces a configuration that validates") {
  auto& L = corpus();
  for (const char* name : {"swap", "ij", "natbin"}) {
    CAPTURE(name);
    GlobalEnv env = L.env;
    Configuration base = L.configs.at(name);
    Equivalence eqv = synthesize_equivalence(env, base);
    Configuration gen = config_from_equivalence(env, base, eqv);
    ValidationReport rep = validate_configuration(env, gen);
    INFO(rep.summary());
    CHECK(rep.ok());
    // only the admitted iota laws lean on trust
    for (auto& c : rep.items)
      if (c.trusted) CHECK(c.label.find("iota_ok_b_") == 0);
  }
}

TEST_CASE("missing configuration fields are reported by name") {
  auto& L = corpus();
  auto cmds = parse_file("Configure c nat nat { dep_constr_a := O ; }.");
  auto& vc = std::get<VConfigure>(cmds[0]);
  CHECK_THROWS_WITH_AS(config_from_vernacular(L.env, vc),
                       doctest::Contains("dep_constr_b"), KernelError);
}
