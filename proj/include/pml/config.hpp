#pragma once

// Configurations: the constructor/eliminator/eta/iota quadruple that
// describes how two types simulate each other, plus validation of the
// accompanying equality laws and synthesis of the underlying equivalence.

#include "pml/printer.hpp"
#include "pml/typecheck.hpp"
#include "pml/vernacular.hpp"

namespace pml {

struct Configuration {
  std::string id;
  TermPtr type_a, type_b;  // type families; applied to their parameters
  std::vector<TermPtr> dep_constr_a, dep_constr_b;
  TermPtr dep_elim_a, dep_elim_b;
  TermPtr eta_a, eta_b;
  TermPtr eta_ok_a, eta_ok_b;  // may be null; validation fills in a
                               // reflexivity proof when eta is definitional
  std::vector<TermPtr> iota_a, iota_b;
  std::set<std::string> trusted;  // criterion labels exempt from checking
};

struct Criterion {
  std::string label;
  bool passed = false;
  bool trusted = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Criterion> items;

  bool ok() const {
    for (auto& c : items)
      if (!c.passed) return false;
    return true;
  }
  const Criterion* find(const std::string& label) const {
    for (auto& c : items)
      if (c.label == label) return &c;
    return nullptr;
  }
  std::string summary() const {
    std::string out;
    for (auto& c : items) {
      out += c.label;
      out += c.trusted ? ": trusted" : (c.passed ? ": ok" : ": FAILED");
      if (!c.passed && !c.trusted && !c.detail.empty()) out += " [" + c.detail + "]";
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline void collect_consts(const TermPtr& t, std::set<std::string>& out) {
  switch (t->tag) {
    case Tag::Const: out.insert(t->s); return;
    case Tag::Pi:
    case Tag::Lam:
    case Tag::App: collect_consts(t->a, out); collect_consts(t->b, out); return;
    case Tag::Constr: collect_consts(t->a, out); return;
    case Tag::Elim:
      collect_consts(t->a, out);
      collect_consts(t->b, out);
      for (auto& c : t->ts) collect_consts(c, out);
      return;
    default: return;
  }
}
inline bool mentions_assumption(const GlobalEnv& env, const TermPtr& t) {
  std::set<std::string> names;
  collect_consts(t, names);
  for (auto& n : names)
    if (env.has(n) && std::holds_alternative<Assumption>(env.entry(n))) return true;
  return false;
}

inline std::vector<TermPtr> param_vars(size_t np, int extras) {
  std::vector<TermPtr> out;
  for (size_t i = 0; i < np; ++i) out.push_back(mk_var(extras + (int)np - 1 - (int)i));
  return out;
}

// Shape data extracted from one side of a configuration.
struct SideInfo {
  Telescope params;                  // parameters of the type family
  TermPtr X;                         // the type, under [params]
  int n = 0;                         // constructor/case count
  int motive_level = 0;
  std::vector<TermPtr> case_tys;     // case j's type, under [params, P, f_0..f_{j-1}]
  std::vector<Telescope> ctor_tels;  // constructor args, under [params, y_0..y_{i-1}]
  std::vector<std::vector<bool>> rec;
};

struct SideRoles {
  char tag = 'a';
  TermPtr family;
  std::vector<TermPtr> dcs;
  TermPtr de, eta, eta_ok;
  std::vector<TermPtr> iotas;
};

struct ConfigAnalyzer {
  const GlobalEnv& env;
  Checker ck;
  const std::set<std::string>& trusted;
  ValidationReport rep;

  ConfigAnalyzer(const GlobalEnv& e, const std::set<std::string>& tr)
      : env(e), ck(e), trusted(tr) {}

  // A trusted criterion is exempt only from the no-assumptions policy; its
  // type is still checked.
  template <class F>
  bool crit(const std::string& label, bool trustable, F&& f) {
    Criterion c{label};
    c.trusted = trustable && trusted.count(label);
    try {
      f(c.trusted);
      c.passed = true;
      if (c.trusted) c.detail = "proof body accepted on trust";
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    rep.items.push_back(std::move(c));
    return rep.items.back().passed;
  }

  void reject_assumptions(const TermPtr& t, bool trusted_here) const {
    if (!trusted_here && mentions_assumption(env, t))
      bad("proof term mentions an assumption; mark the criterion trusted to accept it");
  }

  TermPtr w(const TermPtr& t) { return whnf(env, t); }

  [[noreturn]] static void bad(const std::string& msg) { throw KernelError("ConfigError", msg); }

  // Expected statement of the j-th iota law for one side, in the empty
  // context:
  //   forall params P f* y*, forall Q, Q (DepElim (DepConstr_j y*) P f*)
  //     -> Q (transport along eta_ok of (f_j y* [DepElim y_rec P f*]))
  TermPtr iota_statement(const SideRoles& r, const SideInfo& si, int j) const {
    size_t np = si.params.size();
    int n = si.n;
    const Telescope& tel = si.ctor_tels[j];
    int k = (int)tel.size();
    int E = 1 + n + k;  // extras beyond params at the point before Q
    auto pv = [&](int e) { return param_vars(np, e); };
    TermPtr Pv = mk_var(n + k, "P");
    auto fv = [&](int jj) { return mk_var(k + n - 1 - jj); };
    auto yv = [&](int i) { return mk_var(k - 1 - i); };

    std::vector<TermPtr> cargs = pv(E);
    for (int i = 0; i < k; ++i) cargs.push_back(yv(i));
    TermPtr c = mk_app(r.dcs[j], cargs);
    TermPtr Xh = shift(si.X, E);
    TermPtr etaC = mk_app(mk_app(r.eta, pv(E)), c);

    auto dep_elim_of = [&](const TermPtr& scrut) {
      std::vector<TermPtr> as = pv(E);
      as.push_back(Pv);
      for (int jj = 0; jj < n; ++jj) as.push_back(fv(jj));
      as.push_back(scrut);
      return mk_app(r.de, as);
    };
    TermPtr unred = dep_elim_of(c);

    std::vector<TermPtr> redargs;
    for (int i = 0; i < k; ++i) {
      redargs.push_back(yv(i));
      if (si.rec[j][i]) redargs.push_back(dep_elim_of(yv(i)));
    }
    TermPtr reduced = mk_app(fv(j), redargs);

    // transport reduced : P (DepConstr_j y*) backwards along
    // eta_ok (DepConstr_j y*) : eq X (Eta (DepConstr_j y*)) (DepConstr_j y*)
    TermPtr e = mk_app(mk_app(r.eta_ok, pv(E)), c);
    TermPtr motive = mk_lam(
        "r", Xh,
        mk_lam("e", mk_app(mk_ind("eq"), {shift(Xh, 1), shift(etaC, 1), mk_var(0)}),
               mk_pi("_", mk_app(shift(Pv, 2), mk_var(1)),
                     mk_app(shift(Pv, 3), shift(etaC, 3)))));
    TermPtr idcase = mk_lam("h", mk_app(Pv, etaC), mk_var(0));
    TermPtr rew = mk_app(mk_elim(e, motive, {idcase}), reduced);

    TermPtr Qty = mk_pi("_", mk_app(Pv, etaC), mk_sort(0));
    TermPtr stmt =
        mk_pi("Q", Qty,
              mk_pi("_", mk_app(mk_var(0), shift(unred, 1)), mk_app(mk_var(1), shift(rew, 2))));
    for (int i = k - 1; i >= 0; --i)
      stmt = mk_pi(tel[i].first, shift(tel[i].second, 1 + n, i), stmt);
    for (int jj = n - 1; jj >= 0; --jj)
      stmt = mk_pi("f" + std::to_string(jj), si.case_tys[jj], stmt);
    stmt = mk_pi("P", mk_pi("x", si.X, mk_sort(si.motive_level)), stmt);
    return pi_telescope(si.params, stmt);
  }

  bool analyze_side(SideRoles& r, SideInfo& si) {
    std::string t(1, r.tag);
    si.n = (int)r.dcs.size();

    bool ok = crit("type_" + t, false, [&](bool) {
      if (!r.family) bad("missing type family");
      TermPtr cur = w(ck.infer(Context{}, r.family));
      while (cur->tag == Tag::Pi) {
        si.params.emplace_back(cur->s, cur->a);
        cur = w(cur->b);
      }
      if (cur->tag != Tag::Sort) bad("type family does not end in a sort");
      si.X = mk_app(r.family, param_vars(si.params.size(), 0));
    });
    if (!ok) return false;
    size_t np = si.params.size();

    ok = crit("elim_eta_" + t, false, [&](bool) {
      if (!r.de || !r.eta) bad("missing dep_elim or eta");
      TermPtr cur = w(ck.infer(Context{}, r.de));
      for (size_t i = 0; i < np; ++i) {
        if (cur->tag != Tag::Pi || !conv(env, cur->a, si.params[i].second))
          bad("eliminator does not abstract the family parameters");
        cur = w(cur->b);
      }
      if (cur->tag != Tag::Pi) bad("missing motive binder");
      TermPtr mty = w(cur->a);
      if (mty->tag != Tag::Pi || !conv(env, mty->a, si.X))
        bad("motive must abstract over the type");
      TermPtr ms = w(mty->b);
      if (ms->tag != Tag::Sort) bad("motive must end in a sort");
      si.motive_level = ms->n;
      cur = w(cur->b);
      for (int j = 0; j < si.n; ++j) {
        if (cur->tag != Tag::Pi) bad("eliminator is missing case binders");
        si.case_tys.push_back(cur->a);
        cur = w(cur->b);
      }
      if (cur->tag != Tag::Pi || !conv(env, cur->a, shift(si.X, 1 + si.n)))
        bad("eliminator is missing the target binder");
      // return type must be P (Eta params x)
      int E = 2 + si.n;
      TermPtr etaapp = mk_app(mk_app(r.eta, param_vars(np, E)), mk_var(0));
      if (!conv(env, cur->b, mk_app(mk_var(si.n + 1), etaapp)))
        bad("eliminator result is not the motive at Eta of the target");
    });
    if (!ok) return false;

    for (int j = 0; j < si.n; ++j) {
      ok = crit("dep_constr_" + t + "_" + std::to_string(j), false, [&](bool) {
        TermPtr cur = w(ck.infer(Context{}, r.dcs[j]));
        for (size_t i = 0; i < np; ++i) {
          if (cur->tag != Tag::Pi || !conv(env, cur->a, si.params[i].second))
            bad("constructor does not abstract the family parameters");
          cur = w(cur->b);
        }
        Telescope tel;
        std::vector<bool> rec;
        int k = 0;
        while (cur->tag == Tag::Pi) {
          tel.emplace_back(cur->s, cur->a);
          rec.push_back(conv(env, cur->a, shift(si.X, k)));
          cur = w(cur->b);
          ++k;
        }
        if (!conv(env, cur, shift(si.X, k))) bad("constructor does not land in the type");
        si.ctor_tels.push_back(std::move(tel));
        si.rec.push_back(std::move(rec));
      });
      if (!ok) return false;
    }

    crit("eta_" + t, false, [&](bool) {
      ck.check(Context{}, r.eta, pi_telescope(si.params, mk_pi("x", si.X, shift(si.X, 1))));
    });

    TermPtr eta_ok_ty = pi_telescope(
        si.params,
        mk_pi("x", si.X,
              mk_app(mk_ind("eq"),
                     {shift(si.X, 1),
                      mk_app(mk_app(r.eta, param_vars(np, 1)), mk_var(0)), mk_var(0)})));
    ok = crit("eta_ok_" + t, true, [&](bool tr) {
      if (!env.inductive("eq")) bad("environment does not declare eq");
      if (!r.eta_ok) {
        // eta is supposed to be definitionally the identity: try reflexivity
        TermPtr refl = lam_telescope(
            si.params,
            mk_lam("x", si.X, mk_constr(0, mk_app(mk_ind("eq"), {shift(si.X, 1), mk_var(0)}))));
        ck.check(Context{}, refl, eta_ok_ty);
        r.eta_ok = refl;
        return;
      }
      ck.check(Context{}, r.eta_ok, eta_ok_ty);
      reject_assumptions(r.eta_ok, tr);
    });
    if (!r.eta_ok) return ok;  // iota statements need an eta_ok witness

    if ((int)r.iotas.size() != si.n) {
      crit("arity_" + t, false, [&](bool) { bad("iota count differs from constructor count"); });
      return false;
    }
    for (int j = 0; j < si.n; ++j) {
      crit("iota_ok_" + t + "_" + std::to_string(j), true, [&](bool tr) {
        TermPtr stmt = iota_statement(r, si, j);
        ck.infer(Context{}, stmt);
        ck.check(Context{}, r.iotas[j], stmt);
        reject_assumptions(r.iotas[j], tr);
      });
    }
    return true;
  }

  void cross_checks(const SideInfo& a, const SideInfo& b) {
    crit("arity", false, [&](bool) {
      if (a.params.size() != b.params.size())
        bad("parameter telescopes differ between sides");
      for (size_t i = 0; i < a.params.size(); ++i)
        if (!conv(env, a.params[i].second, b.params[i].second))
          bad("parameter telescopes differ between sides");
      if (a.n != b.n) bad("constructor counts differ between sides");
      for (int j = 0; j < a.n; ++j) {
        if ((int)a.ctor_tels.size() <= j || (int)b.ctor_tels.size() <= j) return;
        size_t ra = 0, rb = 0;
        for (bool x : a.rec[j]) ra += x;
        for (bool x : b.rec[j]) rb += x;
        if (a.ctor_tels[j].size() != b.ctor_tels[j].size() || ra != rb)
          bad("constructor " + std::to_string(j) + " arity differs between sides");
      }
    });
  }
};

}  // namespace detail

struct ConfigAnalysis {
  ValidationReport report;
  detail::SideInfo a, b;
};

inline ConfigAnalysis analyze_configuration(const GlobalEnv& env, Configuration& cfg) {
  detail::ConfigAnalyzer an(env, cfg.trusted);
  detail::SideRoles ra{'a', cfg.type_a, cfg.dep_constr_a, cfg.dep_elim_a, cfg.eta_a,
                       cfg.eta_ok_a,    cfg.iota_a};
  detail::SideRoles rb{'b', cfg.type_b, cfg.dep_constr_b, cfg.dep_elim_b, cfg.eta_b,
                       cfg.eta_ok_b,    cfg.iota_b};
  ConfigAnalysis out;
  bool oka = an.analyze_side(ra, out.a);
  bool okb = an.analyze_side(rb, out.b);
  if (oka && okb) an.cross_checks(out.a, out.b);
  cfg.eta_ok_a = ra.eta_ok;  // publish a synthesized reflexivity witness
  cfg.eta_ok_b = rb.eta_ok;
  out.report = std::move(an.rep);
  return out;
}

inline ValidationReport validate_configuration(const GlobalEnv& env, Configuration& cfg) {
  return analyze_configuration(env, cfg).report;
}

// ----- equivalence synthesis -----

struct Equivalence {
  TermPtr f, g;        // the transport functions
  TermPtr sect, retr;  // g (f a) = a and f (g b) = b
};

namespace detail {

struct Synth {
  const GlobalEnv& env;
  const SideRoles& A;
  const SideRoles& B;
  const SideInfo& sa;
  const SideInfo& sb;
  size_t np;

  Synth(const GlobalEnv& e, const SideRoles& ra, const SideRoles& rb, const SideInfo& ia,
        const SideInfo& ib)
      : env(e), A(ra), B(rb), sa(ia), sb(ib), np(ia.params.size()) {}

  // Case j of the map from `from` into `to`'s constructors, at `extras`
  // binders beyond the parameters. Layout: one binder per constructor
  // argument with an inductive hypothesis after each recursive one.
  TermPtr map_case(const SideRoles& from, const SideInfo& sf, const SideRoles& to,
                   const SideInfo& st, int j, int extras) const {
    const Telescope& tel = sf.ctor_tels[j];
    const std::vector<bool>& rec = sf.rec[j];
    int k = (int)tel.size();
    Telescope binders;
    std::vector<int> reloc;
    std::vector<int> ypos(k), ihpos(k, -1);
    int nd = 0;
    for (int i = 0; i < k; ++i) {
      binders.emplace_back(tel[i].first, reloc_term(tel[i].second, reloc, nd + extras));
      for (auto& x : reloc) ++x;
      reloc.insert(reloc.begin(), 0);
      ypos[i] = nd++;
      if (rec[i]) {
        binders.emplace_back("ih", shift(st.X, ++nd + extras - 1));
        for (auto& x : reloc) ++x;
        ihpos[i] = nd - 1;
      }
    }
    std::vector<TermPtr> args = param_vars(np, nd + extras);
    for (int i = 0; i < k; ++i)
      args.push_back(mk_var(nd - 1 - (rec[i] ? ihpos[i] : ypos[i])));
    return lam_telescope(binders, mk_app(to.dcs[j], args));
  }

  // fun params (x : From) => DepElim_from params (fun _ => To) cases x
  TermPtr map(const SideRoles& from, const SideInfo& sf, const SideRoles& to,
              const SideInfo& st) const {
    TermPtr Pc = mk_lam("_", shift(sf.X, 1), shift(st.X, 2));
    std::vector<TermPtr> as = param_vars(np, 1);
    as.push_back(Pc);
    for (int j = 0; j < sf.n; ++j) as.push_back(map_case(from, sf, to, st, j, 1));
    as.push_back(mk_var(0));
    return lam_telescope(sf.params, mk_lam("x", sf.X, mk_app(from.de, as)));
  }

  // Proof of: forall params (x : From), eq From (gg (ff x)) x,
  // where ff : From -> To and gg : To -> From are the two maps.
  TermPtr homotopy(const SideRoles& from, const SideInfo& sf, const SideRoles& to,
                   const SideInfo& st, const TermPtr& ff, const TermPtr& gg) const {
    auto pv = [&](int e) { return param_vars(np, e); };
    auto Xf = [&](int e) { return shift(sf.X, e); };
    auto Xt = [&](int e) { return shift(st.X, e); };
    auto gf = [&](const TermPtr& r, int e) {
      return mk_app(mk_app(gg, pv(e)), mk_app(mk_app(ff, pv(e)), r));
    };
    auto goal = [&](const TermPtr& r, int e) {
      return mk_app(mk_ind("eq"), {Xf(e), gf(r, e), r});
    };
    auto Pc_f = [&](int e) { return mk_lam("_", Xf(e), Xt(e + 1)); };
    auto Pc_g = [&](int e) { return mk_lam("_", Xt(e), Xf(e + 1)); };
    auto fcases = [&](int e) {
      std::vector<TermPtr> out;
      for (int j = 0; j < sf.n; ++j) out.push_back(map_case(from, sf, to, st, j, e));
      return out;
    };
    auto gcases = [&](int e) {
      std::vector<TermPtr> out;
      for (int j = 0; j < st.n; ++j) out.push_back(map_case(to, st, from, sf, j, e));
      return out;
    };
    auto de_f = [&](const TermPtr& scrut, int e) {
      std::vector<TermPtr> as = pv(e);
      as.push_back(Pc_f(e));
      for (auto& c : fcases(e)) as.push_back(c);
      as.push_back(scrut);
      return mk_app(from.de, as);
    };
    auto de_g = [&](const TermPtr& scrut, int e) {
      std::vector<TermPtr> as = pv(e);
      as.push_back(Pc_g(e));
      for (auto& c : gcases(e)) as.push_back(c);
      as.push_back(scrut);
      return mk_app(to.de, as);
    };

    // per-constructor cases of the outer dependent elimination
    std::vector<TermPtr> scases;
    for (int j = 0; j < sf.n; ++j) {
      const Telescope& tel = sf.ctor_tels[j];
      const std::vector<bool>& rec = sf.rec[j];
      int k = (int)tel.size();
      Telescope binders;
      std::vector<int> reloc;
      std::vector<int> ypos(k), ihpos(k, -1);
      int nd = 0;
      for (int i = 0; i < k; ++i) {
        binders.emplace_back(tel[i].first, reloc_term(tel[i].second, reloc, nd + 1));
        for (auto& x : reloc) ++x;
        reloc.insert(reloc.begin(), 0);
        ypos[i] = nd++;
        if (rec[i]) {
          // inductive hypothesis: eq From (gg (ff y_i)) y_i
          binders.emplace_back("IH", goal(mk_var(0), nd + 1));
          for (auto& x : reloc) ++x;
          ihpos[i] = nd++;
        }
      }
      int E = 1 + nd;  // extras beyond params at the case body
      auto yvar = [&](int i, int d) { return mk_var(nd - 1 - ypos[i] + d); };
      auto ihvar = [&](int i, int d) { return mk_var(nd - 1 - ihpos[i] + d); };
      auto wj = [&](int d) {  // DepConstr_j y*
        std::vector<TermPtr> as = pv(E + d);
        for (int i = 0; i < k; ++i) as.push_back(yvar(i, d));
        return mk_app(from.dcs[j], as);
      };
      auto zj = [&](int d) {  // iota's reduced-side arguments on the To side
        std::vector<TermPtr> zs;
        for (int i = 0; i < k; ++i)
          zs.push_back(rec[i] ? de_f(yvar(i, d), E + d) : yvar(i, d));
        return zs;
      };
      auto cB = [&](int d) {
        std::vector<TermPtr> as = pv(E + d);
        for (auto& z : zj(d)) as.push_back(z);
        return mk_app(to.dcs[j], as);
      };
      auto eqf = [&](const TermPtr& l, const TermPtr& r, int d) {
        return mk_app(mk_ind("eq"), {Xf(E + d), l, r});
      };

      // innermost: rewrite each recursive position from gg (ff y) to y by
      // the inductive hypotheses, then close with reflexivity
      std::vector<int> recs;
      for (int i = 0; i < k; ++i)
        if (rec[i]) recs.push_back(i);
      // skeleton: eq From (DepConstr_j [pos assignment]) (DepConstr_j y*)
      auto skel = [&](int upto, const TermPtr& at, int d) {
        // positions recs[<upto] already y, recs[upto] := at, later gg(ff y)
        std::vector<TermPtr> as = pv(E + d);
        for (int i = 0; i < k; ++i) {
          if (!rec[i]) { as.push_back(yvar(i, d)); continue; }
          int t = (int)(std::find(recs.begin(), recs.end(), i) - recs.begin());
          if (t < upto) as.push_back(yvar(i, d));
          else if (t == upto) as.push_back(at);
          else as.push_back(gf(yvar(i, d), E + d));
        }
        return eqf(mk_app(from.dcs[j], as), wj(d), d);
      };
      TermPtr chain = mk_constr(0, mk_app(mk_ind("eq"), {Xf(E), wj(0)}));
      for (int t = (int)recs.size() - 1; t >= 0; --t) {
        int i = recs[t];
        TermPtr sym = mk_app(mk_const("eq_sym"),
                             {Xf(E), gf(yvar(i, 0), E), yvar(i, 0), ihvar(i, 0)});
        TermPtr motive =
            mk_lam("r", Xf(E),
                   mk_lam("e", mk_app(mk_ind("eq"), {Xf(E + 1), yvar(i, 1), mk_var(0)}),
                          skel(t, mk_var(1), 2)));
        chain = mk_elim(sym, motive, {chain});
      }

      // step 2: invert the To-side iota law
      TermPtr unredB = de_g(cB(0), E);
      TermPtr Q1trick =
          mk_lam("u", Xf(E), mk_pi("_", eqf(mk_var(0), wj(1), 1),
                                   eqf(shift(unredB, 2), wj(2), 2)));
      TermPtr idB = mk_lam("h", eqf(unredB, wj(0), 0), mk_var(0));
      std::vector<TermPtr> i2 = pv(E);
      i2.push_back(Pc_g(E));
      for (auto& c : gcases(E)) i2.push_back(c);
      for (auto& z : zj(0)) i2.push_back(z);
      i2.push_back(Q1trick);
      i2.push_back(idB);
      i2.push_back(chain);
      TermPtr step2 = mk_app(to.iotas[j], i2);

      // step 1: invert the From-side iota law
      TermPtr unredA = de_f(wj(0), E);
      auto q0 = [&](const TermPtr& v, int d) {
        return eqf(mk_app(mk_app(gg, pv(E + d)), v), wj(d), d);
      };
      TermPtr Q0trick = mk_lam("v", Xt(E), mk_pi("_", q0(mk_var(0), 1),
                                                 q0(shift(unredA, 2), 2)));
      TermPtr idA = mk_lam("h", q0(unredA, 0), mk_var(0));
      std::vector<TermPtr> i1 = pv(E);
      i1.push_back(Pc_f(E));
      for (auto& c : fcases(E)) i1.push_back(c);
      for (int i = 0; i < k; ++i) i1.push_back(yvar(i, 0));
      i1.push_back(Q0trick);
      i1.push_back(idA);
      i1.push_back(step2);
      scases.push_back(lam_telescope(binders, mk_app(from.iotas[j], i1)));
    }

    // outer frame: rewrite the target along eta_ok, then eliminate
    TermPtr Ps = mk_lam("z", Xf(1), goal(mk_var(0), 2));
    std::vector<TermPtr> das = pv(1);
    das.push_back(Ps);
    for (auto& c : scases) das.push_back(c);
    das.push_back(mk_var(0));
    TermPtr diag = mk_app(from.de, das);
    TermPtr etaX = mk_app(mk_app(from.eta, pv(1)), mk_var(0));
    TermPtr e = mk_app(mk_app(from.eta_ok, pv(1)), mk_var(0));
    TermPtr M = mk_lam("r", Xf(1),
                       mk_lam("e", mk_app(mk_ind("eq"), {Xf(2), shift(etaX, 1), mk_var(0)}),
                              goal(mk_var(1), 3)));
    return lam_telescope(sf.params, mk_lam("x", sf.X, mk_elim(e, M, {diag})));
  }
};

}  // namespace detail

inline bool check_equivalence(const GlobalEnv& env, Configuration& cfg, const Equivalence& eqv,
                              std::string* why = nullptr, bool allow_assumptions = false);

// Build the equivalence a configuration describes: transport functions in
// both directions plus section and retraction proofs, all kernel-checked.
inline Equivalence synthesize_equivalence(const GlobalEnv& env, Configuration& cfg) {
  ConfigAnalysis an = analyze_configuration(env, cfg);
  if (!an.report.ok())
    throw KernelError("SynthesisFailed", "configuration invalid:\n" + an.report.summary());
  if (!env.has("eq_sym"))
    throw KernelError("SynthesisFailed", "synthesis requires eq_sym in the environment");
  detail::SideRoles ra{'a', cfg.type_a, cfg.dep_constr_a, cfg.dep_elim_a, cfg.eta_a,
                       cfg.eta_ok_a,    cfg.iota_a};
  detail::SideRoles rb{'b', cfg.type_b, cfg.dep_constr_b, cfg.dep_elim_b, cfg.eta_b,
                       cfg.eta_ok_b,    cfg.iota_b};
  detail::Synth sy(env, ra, rb, an.a, an.b);

  Equivalence eqv;
  eqv.f = sy.map(ra, an.a, rb, an.b);
  eqv.g = sy.map(rb, an.b, ra, an.a);
  eqv.sect = sy.homotopy(ra, an.a, rb, an.b, eqv.f, eqv.g);
  eqv.retr = sy.homotopy(rb, an.b, ra, an.a, eqv.g, eqv.f);

  std::string why;
  if (!check_equivalence(env, cfg, eqv, &why))
    throw KernelError("SynthesisFailed", why);
  return eqv;
}

// Kernel-check an equivalence against the types a configuration names.
inline bool check_equivalence(const GlobalEnv& env, Configuration& cfg, const Equivalence& eqv,
                              std::string* why, bool allow_assumptions) {
  ConfigAnalysis an = analyze_configuration(env, cfg);
  if (!an.report.ok()) {
    if (why) *why = "configuration invalid:\n" + an.report.summary();
    return false;
  }
  size_t np = an.a.params.size();
  auto pv = [&](int e) { return detail::param_vars(np, e); };
  TermPtr fty = pi_telescope(an.a.params, mk_pi("x", an.a.X, shift(an.b.X, 1)));
  TermPtr gty = pi_telescope(an.a.params, mk_pi("x", an.b.X, shift(an.a.X, 1)));
  auto homty = [&](const TermPtr& X, const TermPtr& ff, const TermPtr& gg) {
    TermPtr r = mk_app(mk_app(gg, pv(1)), mk_app(mk_app(ff, pv(1)), mk_var(0)));
    return pi_telescope(an.a.params,
                        mk_pi("x", X, mk_app(mk_ind("eq"), {shift(X, 1), r, mk_var(0)})));
  };
  struct Item {
    const char* what;
    TermPtr term, ty;
  } items[] = {{"f", eqv.f, fty},
               {"g", eqv.g, gty},
               {"section", eqv.sect, homty(an.a.X, eqv.f, eqv.g)},
               {"retraction", eqv.retr, homty(an.b.X, eqv.g, eqv.f)}};
  for (auto& it : items) {
    if (!it.term) {
      if (why) *why = std::string(it.what) + ": missing";
      return false;
    }
    if (!allow_assumptions && detail::mentions_assumption(env, it.term)) {
      if (why) *why = std::string(it.what) + ": proved from an assumption";
      return false;
    }
    try {
      check_type(env, Context{}, it.term, it.ty);
    } catch (const std::exception& e) {
      if (why) *why = std::string(it.what) + ": " + e.what();
      return false;
    }
  }
  return true;
}

// The generic configuration an equivalence induces: the A side is kept, the
// B side is rebuilt from f and g alone. Constructors transport through f
// (recursive arguments pulled back through g); the eliminator works on g of
// the target and repairs the motive with the retraction and section proofs.
// Its iota laws hold only propositionally and are admitted as named
// assumptions, so the matching criteria are marked trusted.
inline Configuration config_from_equivalence(GlobalEnv& env, const Configuration& base,
                                             const Equivalence& eqv) {
  Configuration b = base;  // local copy; analysis fills eta_ok witnesses
  ConfigAnalysis an = analyze_configuration(env, b);
  if (!an.report.ok())
    throw KernelError("ConfigError", "base configuration invalid:\n" + an.report.summary());
  const detail::SideInfo& sa = an.a;
  const detail::SideInfo& sb = an.b;
  size_t np = sa.params.size();
  int n = sa.n;
  auto pv = [&](int e) { return detail::param_vars(np, e); };
  auto app1 = [&](const TermPtr& fn, int e, const TermPtr& x) {
    return mk_app(mk_app(fn, pv(e)), x);
  };

  Configuration out;
  out.id = base.id + "_generic";
  out.type_a = base.type_a;
  out.type_b = base.type_b;
  out.dep_constr_a = base.dep_constr_a;
  out.dep_elim_a = base.dep_elim_a;
  out.eta_a = base.eta_a;
  out.eta_ok_a = b.eta_ok_a;
  out.iota_a = base.iota_a;
  out.eta_b = lam_telescope(sb.params, mk_lam("b", sb.X, mk_var(0)));
  out.trusted = base.trusted;

  // dep_constr_b[j] = fun params z* => f (DepConstr_a(j) [g z at recursive z])
  for (int j = 0; j < n; ++j) {
    const Telescope& tel = sa.ctor_tels[j];
    const std::vector<bool>& rec = sa.rec[j];
    int k = (int)tel.size();
    Telescope binders;
    for (int i = 0; i < k; ++i)
      binders.emplace_back(tel[i].first, rec[i] ? shift(sb.X, i) : tel[i].second);
    std::vector<TermPtr> zs;
    for (int i = 0; i < k; ++i) {
      TermPtr y = mk_var(k - 1 - i);
      zs.push_back(rec[i] ? app1(eqv.g, k, y) : y);
    }
    TermPtr ca = mk_app(base.dep_constr_a[j], pv(k));
    for (auto& z : zs) ca = mk_app(ca, z);
    out.dep_constr_b.push_back(
        lam_telescope(sa.params, lam_telescope(binders, app1(eqv.f, k, ca))));
  }

  // dep_elim_b = fun params P f* (b : B) =>
  //   Elim(retraction b, fun r e => P r) { DepElim_a (g b) (fun a => P (f a)) cases }
  {
    Telescope binders;
    binders.emplace_back("P", mk_pi("x", sb.X, mk_sort(0)));
    for (int j = 0; j < n; ++j) {
      // case type: the B-flavored telescope with P-hypotheses after each
      // recursive argument, ending in P (dep_constr_b j z*)
      const Telescope& tel = sa.ctor_tels[j];
      const std::vector<bool>& rec = sa.rec[j];
      int k = (int)tel.size();
      int extras = 1 + j;
      Telescope cb;
      std::vector<int> reloc, zpos(k);
      int nd = 0;
      for (int i = 0; i < k; ++i) {
        cb.emplace_back(tel[i].first,
                        rec[i] ? shift(sb.X, nd + extras)
                               : detail::reloc_term(tel[i].second, reloc, nd + extras));
        for (auto& x : reloc) ++x;
        reloc.insert(reloc.begin(), 0);
        zpos[i] = nd++;
        if (rec[i]) {
          cb.emplace_back("IH", mk_app(mk_var(j + nd), mk_var(0)));
          for (auto& x : reloc) ++x;
          ++nd;
        }
      }
      TermPtr cb_val = mk_app(out.dep_constr_b[j], pv(nd + extras));
      for (int i = 0; i < k; ++i) cb_val = mk_app(cb_val, mk_var(nd - 1 - zpos[i]));
      binders.emplace_back("f" + std::to_string(j),
                           pi_telescope(cb, mk_app(mk_var(j + nd), cb_val)));
    }
    binders.emplace_back("b", shift(sb.X, 1 + n));
    int E0 = 2 + n;
    TermPtr Pv = mk_var(n + 1, "P");
    TermPtr bvar = mk_var(0, "b");
    TermPtr gb = app1(eqv.g, E0, bvar);
    TermPtr fgb = app1(eqv.f, E0, gb);
    TermPtr XbE = shift(sb.X, E0);
    TermPtr XaE = shift(sa.X, E0);

    TermPtr motive_a =
        mk_lam("a", XaE, mk_app(shift(Pv, 1), app1(eqv.f, E0 + 1, mk_var(0))));

    std::vector<TermPtr> cases;
    for (int j = 0; j < n; ++j) {
      const Telescope& tel = sa.ctor_tels[j];
      const std::vector<bool>& rec = sa.rec[j];
      int k = (int)tel.size();
      Telescope cb;
      std::vector<int> reloc, ypos(k);
      int nd = 0;
      for (int i = 0; i < k; ++i) {
        cb.emplace_back(tel[i].first, detail::reloc_term(tel[i].second, reloc, nd + E0));
        for (auto& x : reloc) ++x;
        reloc.insert(reloc.begin(), 0);
        ypos[i] = nd++;
        if (rec[i]) {
          cb.emplace_back("IH", mk_app(mk_var(n + 1 + nd),
                                       app1(eqv.f, nd + E0, mk_var(0))));
          for (auto& x : reloc) ++x;
          ++nd;
        }
      }
      int D = nd + E0;
      auto yvar = [&](int i, int d) { return mk_var(nd - 1 - ypos[i] + d); };
      auto ihvar = [&](int i, int d) { return mk_var(nd - 2 - ypos[i] + d); };

      // f_j applied to transported arguments and the hypotheses
      TermPtr raw = mk_var(n - j + nd, "f");
      for (int i = 0; i < k; ++i) {
        raw = mk_app(raw, rec[i] ? app1(eqv.f, D, yvar(i, 0)) : yvar(i, 0));
        if (rec[i]) raw = mk_app(raw, ihvar(i, 0));
      }

      // rewrite each g (f y) back to y along the section proof
      std::vector<int> recs;
      for (int i = 0; i < k; ++i)
        if (rec[i]) recs.push_back(i);
      auto skel = [&](int upto, const TermPtr& at, int d) {
        // P (f (DepConstr_a [y | at | g (f y)])), at depth D + d
        TermPtr ca = mk_app(base.dep_constr_a[j], pv(D + d));
        for (int i = 0; i < k; ++i) {
          if (!rec[i]) { ca = mk_app(ca, yvar(i, d)); continue; }
          int t = (int)(std::find(recs.begin(), recs.end(), i) - recs.begin());
          if (t < upto) ca = mk_app(ca, yvar(i, d));
          else if (t == upto) ca = mk_app(ca, at);
          else ca = mk_app(ca, app1(eqv.g, D + d, app1(eqv.f, D + d, yvar(i, d))));
        }
        return mk_app(mk_var(n + 1 + nd + d, "P"), app1(eqv.f, D + d, ca));
      };
      TermPtr chain = raw;
      for (int t = 0; t < (int)recs.size(); ++t) {
        int i = recs[t];
        TermPtr fy = app1(eqv.f, D, yvar(i, 0));
        TermPtr sect_app = mk_app(mk_app(eqv.sect, pv(D)), yvar(i, 0));
        TermPtr Mt = mk_lam(
            "r", shift(sa.X, D),
            mk_lam("e",
                   mk_app(mk_ind("eq"),
                          {shift(sa.X, D + 1),
                           shift(app1(eqv.g, D, fy), 1), mk_var(0)}),
                   skel(t, mk_var(1), 2)));
        chain = mk_elim(sect_app, Mt, {chain});
      }
      cases.push_back(lam_telescope(cb, chain));
    }

    std::vector<TermPtr> das = pv(E0);
    das.push_back(motive_a);
    for (auto& c : cases) das.push_back(c);
    das.push_back(gb);
    TermPtr core = mk_app(base.dep_elim_a, das);

    TermPtr retr_app = mk_app(mk_app(eqv.retr, pv(E0)), bvar);
    TermPtr M = mk_lam(
        "r", XbE,
        mk_lam("e", mk_app(mk_ind("eq"), {shift(XbE, 1), shift(fgb, 1), mk_var(0)}),
               mk_app(shift(Pv, 2), mk_var(1))));
    out.dep_elim_b = lam_telescope(
        sa.params, lam_telescope(binders, mk_elim(retr_app, M, {core})));
  }

  // The B-side iota laws are admitted: declare one assumption per statement
  // and accept those criteria on trust.
  detail::ConfigAnalyzer gan(env, out.trusted);
  detail::SideRoles rb{'b', out.type_b, out.dep_constr_b, out.dep_elim_b, out.eta_b,
                       nullptr,         {}};
  detail::SideInfo ib;
  gan.analyze_side(rb, ib);
  for (auto& c : gan.rep.items)
    if (!c.passed && c.label != "arity_b")  // iotas are declared below
      throw KernelError("ConfigError",
                        "generic configuration construction failed: " + c.label +
                            (c.detail.empty() ? "" : " [" + c.detail + "]"));
  out.eta_ok_b = rb.eta_ok;
  for (int j = 0; j < n; ++j) {
    std::string ax = out.id + "_iota_b_" + std::to_string(j);
    env = assume_constant(env, ax, gan.iota_statement(rb, ib, j));
    out.iota_b.push_back(mk_const(ax));
    out.trusted.insert("iota_ok_b_" + std::to_string(j));
  }
  return out;
}

// Assemble a Configuration from its vernacular form.
inline Configuration config_from_vernacular(const GlobalEnv& env, const VConfigure& v) {
  Configuration cfg;
  cfg.id = v.name;
  cfg.type_a = resolve(env, v.A);
  cfg.type_b = resolve(env, v.B);
  auto many = [&](const char* key) {
    auto it = v.fields.find(key);
    if (it == v.fields.end())
      throw KernelError("ConfigError", "configuration is missing field " + std::string(key));
    std::vector<TermPtr> out;
    for (auto& t : it->second) out.push_back(resolve(env, t));
    return out;
  };
  auto one = [&](const char* key, bool required) -> TermPtr {
    auto it = v.fields.find(key);
    if (it == v.fields.end()) {
      if (required)
        throw KernelError("ConfigError", "configuration is missing field " + std::string(key));
      return nullptr;
    }
    if (it->second.size() != 1)
      throw KernelError("ConfigError", std::string(key) + " expects a single term");
    return resolve(env, it->second[0]);
  };
  cfg.dep_constr_a = many("dep_constr_a");
  cfg.dep_constr_b = many("dep_constr_b");
  cfg.dep_elim_a = one("dep_elim_a", true);
  cfg.dep_elim_b = one("dep_elim_b", true);
  cfg.eta_a = one("eta_a", true);
  cfg.eta_b = one("eta_b", true);
  cfg.eta_ok_a = one("eta_ok_a", false);
  cfg.eta_ok_b = one("eta_ok_b", false);
  cfg.iota_a = many("iota_a");
  cfg.iota_b = many("iota_b");
  cfg.trusted = std::set<std::string>(v.trusted.begin(), v.trusted.end());
  return cfg;
}

}  // namespace pml
