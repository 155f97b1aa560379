#pragma once

// Tactic-script suggestion: translate proof terms into small scripts,
// simplify them, print them, and replay them against a goal for checking.

#include <memory>

#include "pml/parser.hpp"
#include "pml/printer.hpp"
#include "pml/typecheck.hpp"

namespace pml {

struct ReplayFailed : KernelError {
  ReplayFailed(const std::string& step, const std::string& goal)
      : KernelError("ReplayFailed", step + "; goal: " + goal) {}
};

struct Goal {
  Context ctx;
  TermPtr target;
};

// One step of a script. `next` chains sequential composition; branching
// steps (induction, split) end their sequence and continue per branch.
struct Qtac;
using QtacPtr = std::shared_ptr<const Qtac>;

struct Qtac {
  enum class Kind {
    Intro,        // names (one per binder; several after merging)
    Symmetry,     // flip an equality goal
    Reflexivity,  // close a convertible equality; terminal
    Apply,        // arg = the term; with `next`, arg is a function and the
                  // script proves its (last) argument
    Rewrite,      // arg = equality proof, motive optional, ltr = direction
    Induction,    // arg = target, motive optional, one branch per constructor
    Split,        // two branches proving the components of a pair goal
    Left,         // first injection of a sum goal
    Right,        // second injection
  };
  Kind kind;
  std::vector<std::string> names;
  TermPtr motive;  // Rewrite/Induction; null once elided by simplification
  TermPtr arg;     // Rewrite equation / Apply term / Induction target
  bool ltr = true;
  std::vector<QtacPtr> branches;
  QtacPtr next;
};

inline QtacPtr q_step(Qtac q) { return std::make_shared<const Qtac>(std::move(q)); }

inline QtacPtr q_intro(std::vector<std::string> names, QtacPtr next) {
  return q_step({Qtac::Kind::Intro, std::move(names), nullptr, nullptr, true, {}, std::move(next)});
}
inline QtacPtr q_symmetry(QtacPtr next) {
  return q_step({Qtac::Kind::Symmetry, {}, nullptr, nullptr, true, {}, std::move(next)});
}
inline QtacPtr q_reflexivity() {
  return q_step({Qtac::Kind::Reflexivity, {}, nullptr, nullptr, true, {}, nullptr});
}
inline QtacPtr q_apply(TermPtr t, QtacPtr next = nullptr) {
  return q_step({Qtac::Kind::Apply, {}, nullptr, std::move(t), true, {}, std::move(next)});
}
inline QtacPtr q_rewrite(TermPtr motive, TermPtr eq, bool ltr, QtacPtr next) {
  return q_step({Qtac::Kind::Rewrite, {}, std::move(motive), std::move(eq), ltr, {}, std::move(next)});
}
inline QtacPtr q_induction(TermPtr motive, TermPtr target, std::vector<QtacPtr> branches) {
  return q_step({Qtac::Kind::Induction, {}, std::move(motive), std::move(target), true,
                 std::move(branches), nullptr});
}
inline QtacPtr q_split(QtacPtr l, QtacPtr r) {
  return q_step({Qtac::Kind::Split, {}, nullptr, nullptr, true, {std::move(l), std::move(r)}, nullptr});
}
inline QtacPtr q_left(QtacPtr next) {
  return q_step({Qtac::Kind::Left, {}, nullptr, nullptr, true, {}, std::move(next)});
}
inline QtacPtr q_right(QtacPtr next) {
  return q_step({Qtac::Kind::Right, {}, nullptr, nullptr, true, {}, std::move(next)});
}

namespace detail {

inline bool same_term(const TermPtr& a, const TermPtr& b) {
  return alpha_key(a) == alpha_key(b);
}

// Syntactic replacement of a closed-over subterm, de Bruijn aware.
inline TermPtr replace_term(const TermPtr& t, const TermPtr& from, const TermPtr& to) {
  if (same_term(t, from)) return to;
  auto under = [&](const TermPtr& s) {
    return replace_term(s, shift(from, 1), shift(to, 1));
  };
  switch (t->tag) {
    case Tag::Pi:
      return mk_pi(t->s, replace_term(t->a, from, to), under(t->b));
    case Tag::Lam:
      return mk_lam(t->s, replace_term(t->a, from, to), under(t->b));
    case Tag::App:
      return mk_app(replace_term(t->a, from, to), replace_term(t->b, from, to));
    case Tag::Constr:
      return mk_constr(t->n, replace_term(t->a, from, to));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      for (auto& c : t->ts) cs.push_back(replace_term(c, from, to));
      return mk_elim(replace_term(t->a, from, to), replace_term(t->b, from, to), std::move(cs));
    }
    default:
      return t;
  }
}

// Recognize `eq A x y` after head reduction.
inline bool eq_spine(const GlobalEnv& env, const TermPtr& ty, TermPtr& A, TermPtr& x, TermPtr& y) {
  std::vector<TermPtr> args;
  TermPtr h = spine_head(whnf(env, ty), args);
  if (h->tag != Tag::Ind || h->s != "eq" || args.size() != 3) return false;
  A = args[0];
  x = args[1];
  y = args[2];
  return true;
}

inline TermPtr mk_refl(const TermPtr& A, const TermPtr& x) {
  return mk_constr(0, mk_app(mk_app(mk_ind("eq"), A), x));
}

struct Decompiler {
  Checker ck;

  explicit Decompiler(const GlobalEnv& e) : ck(e) {}

  bool is_base(const QtacPtr& s) const {
    return s->kind == Qtac::Kind::Apply && !s->next;
  }

  QtacPtr run(const Context& ctx, const TermPtr& t) {
    if (t->tag == Tag::Lam)
      return q_intro({t->s.empty() ? "x" : t->s}, run(ctx.extended(t->s, t->a), t->b));

    if (t->tag == Tag::Elim) {
      TermPtr sty, A, x, y;
      try {
        sty = ck.infer(ctx, t->a);
      } catch (const KernelError&) {
        return q_apply(t);
      }
      if (eq_spine(ck.env, sty, A, x, y) && t->ts.size() == 1) {
        std::vector<TermPtr> sargs;
        TermPtr shead = spine_head(t->a, sargs);
        bool ltr = !(shead->tag == Tag::Const && shead->s == "eq_sym");
        return q_rewrite(t->b, t->a, ltr, run(ctx, t->ts[0]));
      }
      std::vector<QtacPtr> branches;
      for (auto& c : t->ts) branches.push_back(run(ctx, c));
      return q_induction(t->b, t->a, std::move(branches));
    }

    std::vector<TermPtr> args;
    TermPtr h = spine_head(t, args);

    if (h->tag == Tag::Const && h->s == "eq_sym" && args.size() == 4)
      return q_symmetry(run(ctx, args[3]));

    if (h->tag == Tag::Constr) {
      std::vector<TermPtr> iargs;
      TermPtr ih = spine_head(whnf(ck.env, h->a), iargs);
      if (ih->tag == Tag::Ind) {
        if (ih->s == "eq" && args.empty()) return q_reflexivity();
        if (ih->s == "sigma" && h->n == 0 && args.size() == 2)
          return q_split(run(ctx, args[0]), run(ctx, args[1]));
        if (ih->s == "sum" && args.size() == 1) {
          if (h->n == 0) return q_left(run(ctx, args[0]));
          if (h->n == 1) return q_right(run(ctx, args[0]));
        }
      }
    }

    if (t->tag == Tag::App) {
      QtacPtr sub = run(ctx, t->b);
      if (!is_base(sub)) return q_apply(t->a, sub);
    }

    return q_apply(t);  // total fallback
  }
};

struct Replayer {
  Checker ck;

  explicit Replayer(const GlobalEnv& e) : ck(e) {}

  [[noreturn]] void fail(const std::string& step, const Context& ctx, const TermPtr& target) {
    throw ReplayFailed(step, print_term(target, ctx));
  }

  void check(const char* step, const Context& ctx, const TermPtr& t, const TermPtr& target) {
    try {
      ck.check(ctx, t, target);
    } catch (const KernelError& e) {
      fail(std::string(step) + " built an ill-typed term (" + e.what() + ")", ctx, target);
    }
  }

  // Second-order motive guesses for an elided motive argument: abstract the
  // syntactic occurrences of the eliminated value in the goal, once as-is and
  // once after normalization. Failure is reported by the caller's replay.
  std::vector<TermPtr> guess_induction_motives(const TermPtr& target, const TermPtr& u,
                                               const TermPtr& uty) {
    std::vector<TermPtr> out;
    for (const TermPtr& g : {target, normalize(ck.env, target, &ck.cache)})
      out.push_back(mk_lam("x", uty, replace_term(shift(g, 1), shift(u, 1), mk_var(0, "x"))));
    return out;
  }

  std::vector<TermPtr> guess_rewrite_motives(const TermPtr& target, const TermPtr& H,
                                             const TermPtr& A, const TermPtr& x,
                                             const TermPtr& y) {
    std::vector<TermPtr> out;
    for (const TermPtr& g : {target, normalize(ck.env, target, &ck.cache)}) {
      TermPtr body = replace_term(shift(g, 2), shift(y, 2), mk_var(1, "b"));
      body = replace_term(body, shift(H, 2), mk_var(0, "e"));
      TermPtr edom = mk_app(mk_app(mk_app(mk_ind("eq"), shift(A, 1)), shift(x, 1)), mk_var(0, "b"));
      out.push_back(mk_lam("b", A, mk_lam("e", edom, body)));
    }
    return out;
  }

  TermPtr run(const Context& ctx, const TermPtr& target, const QtacPtr& s) {
    if (!s) fail("script ended before the goal was closed", ctx, target);
    switch (s->kind) {
      case Qtac::Kind::Intro: {
        Context c = ctx;
        TermPtr goal = target;
        std::vector<std::pair<std::string, TermPtr>> doms;
        for (auto& name : s->names) {
          TermPtr w = whnf(ck.env, goal);
          if (w->tag != Tag::Pi) fail("intro " + name + " on a non-product goal", c, goal);
          doms.emplace_back(name, w->a);
          c = c.extended(name, w->a);
          goal = w->b;
        }
        TermPtr body = run(c, goal, s->next);
        for (auto it = doms.rbegin(); it != doms.rend(); ++it)
          body = mk_lam(it->first, it->second, std::move(body));
        return body;
      }
      case Qtac::Kind::Symmetry: {
        TermPtr A, x, y;
        if (!eq_spine(ck.env, target, A, x, y))
          fail("symmetry on a non-equality goal", ctx, target);
        TermPtr flipped = mk_app(mk_app(mk_app(mk_ind("eq"), A), y), x);
        TermPtr sub = run(ctx, flipped, s->next);
        TermPtr out = mk_app(mk_const("eq_sym"), {A, y, x, sub});
        check("symmetry", ctx, out, target);
        return out;
      }
      case Qtac::Kind::Reflexivity: {
        TermPtr A, x, y;
        if (!eq_spine(ck.env, target, A, x, y))
          fail("reflexivity on a non-equality goal", ctx, target);
        if (!conv(ck.env, x, y, &ck.cache))
          fail("reflexivity: sides are not convertible", ctx, target);
        TermPtr out = mk_refl(A, x);
        check("reflexivity", ctx, out, target);
        return out;
      }
      case Qtac::Kind::Apply: {
        if (!s->next) {
          check("apply", ctx, s->arg, target);
          return s->arg;
        }
        TermPtr fty;
        try {
          fty = whnf(ck.env, ck.infer(ctx, s->arg));
        } catch (const KernelError& e) {
          fail(std::string("apply: function does not type check (") + e.what() + ")", ctx, target);
        }
        if (fty->tag != Tag::Pi) fail("apply with a subgoal needs a function", ctx, target);
        TermPtr sub = run(ctx, fty->a, s->next);
        TermPtr out = mk_app(s->arg, sub);
        check("apply", ctx, out, target);
        return out;
      }
      case Qtac::Kind::Rewrite: {
        TermPtr H = s->arg;
        TermPtr hty, A, x, y;
        try {
          hty = ck.infer(ctx, H);
        } catch (const KernelError& e) {
          fail(std::string("rewrite: equation does not type check (") + e.what() + ")", ctx, target);
        }
        if (!eq_spine(ck.env, hty, A, x, y))
          fail("rewrite with a non-equality", ctx, target);
        std::vector<TermPtr> motives =
            s->motive ? std::vector<TermPtr>{s->motive}
                      : guess_rewrite_motives(target, H, A, x, y);
        const InductiveDecl* eq_decl = ck.env.inductive("eq");
        std::string last;
        for (auto& P : motives) {
          TermPtr cg = case_type(ck.env, *eq_decl, 0, {A, x}, P);
          try {
            TermPtr sub = run(ctx, cg, s->next);
            TermPtr out = mk_elim(H, P, {sub});
            ck.check(ctx, out, target);
            return out;
          } catch (const KernelError& e) {
            last = e.what();
          }
        }
        fail("rewrite failed (" + last + ")", ctx, target);
      }
      case Qtac::Kind::Induction: {
        TermPtr u = s->arg;
        TermPtr uty;
        try {
          uty = whnf(ck.env, ck.infer(ctx, u));
        } catch (const KernelError& e) {
          fail(std::string("induction: target does not type check (") + e.what() + ")", ctx, target);
        }
        std::vector<TermPtr> iargs;
        TermPtr ih = spine_head(uty, iargs);
        if (ih->tag != Tag::Ind) fail("induction on a non-inductive value", ctx, target);
        const InductiveDecl& decl = ck.env.inductive_or_throw(ih->s);
        if (s->branches.size() != decl.ctors.size())
          fail("induction needs one branch per constructor of " + ih->s, ctx, target);
        if ((size_t)decl.num_params() != iargs.size() && s->motive == nullptr)
          fail("induction over an indexed family needs an explicit motive", ctx, target);
        std::vector<TermPtr> params(iargs.begin(), iargs.begin() + decl.num_params());
        std::vector<TermPtr> motives =
            s->motive ? std::vector<TermPtr>{s->motive}
                      : guess_induction_motives(target, u, uty);
        std::string last;
        for (auto& P : motives) {
          try {
            std::vector<TermPtr> cases;
            for (size_t j = 0; j < decl.ctors.size(); ++j)
              cases.push_back(run(ctx, case_type(ck.env, decl, (int)j, params, P), s->branches[j]));
            TermPtr out = mk_elim(u, P, std::move(cases));
            ck.check(ctx, out, target);
            return out;
          } catch (const KernelError& e) {
            last = e.what();
          }
        }
        fail("induction failed (" + last + ")", ctx, target);
      }
      case Qtac::Kind::Split: {
        std::vector<TermPtr> args;
        TermPtr h = spine_head(whnf(ck.env, target), args);
        if (h->tag != Tag::Ind || h->s != "sigma" || args.size() != 2)
          fail("split on a goal that is not a conjunction or pair", ctx, target);
        if (s->branches.size() != 2) fail("split needs exactly two branches", ctx, target);
        TermPtr l = run(ctx, args[0], s->branches[0]);
        TermPtr r = run(ctx, whnf(ck.env, mk_app(args[1], l)), s->branches[1]);
        TermPtr out = mk_app(mk_constr(0, mk_app(mk_app(mk_ind("sigma"), args[0]), args[1])),
                             {l, r});
        check("split", ctx, out, target);
        return out;
      }
      case Qtac::Kind::Left:
      case Qtac::Kind::Right: {
        bool left = s->kind == Qtac::Kind::Left;
        std::vector<TermPtr> args;
        TermPtr h = spine_head(whnf(ck.env, target), args);
        if (h->tag != Tag::Ind || h->s != "sum" || args.size() != 2)
          fail(std::string(left ? "left" : "right") + " on a goal that is not a disjunction",
               ctx, target);
        TermPtr sub = run(ctx, left ? args[0] : args[1], s->next);
        TermPtr out = mk_app(mk_constr(left ? 0 : 1,
                                       mk_app(mk_app(mk_ind("sum"), args[0]), args[1])),
                             sub);
        check(left ? "left" : "right", ctx, out, target);
        return out;
      }
    }
    fail("unknown step", ctx, target);
  }
};

}  // namespace detail

inline QtacPtr decompile(const GlobalEnv& env, const Context& ctx, const TermPtr& t) {
  detail::Decompiler d(env);
  return d.run(ctx, t);
}

inline TermPtr replay(const GlobalEnv& env, const Goal& goal, const QtacPtr& s) {
  detail::Replayer r(env);
  return r.run(goal.ctx, goal.target, s);
}

// ----- printing -----

namespace detail {

inline void collect_script_globals(const QtacPtr& s, std::set<std::string>& out) {
  for (QtacPtr cur = s; cur; cur = cur->next) {
    if (cur->motive) collect_globals(cur->motive, out);
    if (cur->arg) collect_globals(cur->arg, out);
    for (auto& b : cur->branches) collect_script_globals(b, out);
    if (cur->kind == Qtac::Kind::Induction || cur->kind == Qtac::Kind::Split) break;
  }
}

struct ScriptPrinter {
  std::set<std::string> reserved;
  std::vector<std::string> names;

  std::string fresh(const std::string& hint) {
    std::string name = hint.empty() ? "x" : hint;
    auto taken = [&](const std::string& n) {
      if (reserved.count(n)) return true;
      for (auto& b : names)
        if (b == n) return true;
      return false;
    };
    while (taken(name)) name += '\'';
    return name;
  }

  std::string term(const TermPtr& t) {
    Printer p;
    p.reserved = reserved;
    p.binders = names;
    std::string out;
    p.print(t, 0, out);
    return "(" + out + ")";
  }

  static char bullet(int depth) { return "-+*"[(depth - 1) % 3]; }

  // Lines for one sequence; the first line is unindented (the caller adds
  // the bullet), nested branch lines carry their own absolute indent.
  std::vector<std::string> render(const QtacPtr& s0, int depth) {
    std::vector<std::string> lines;
    std::string line;
    auto emit = [&](const std::string& step) {
      if (!line.empty()) line += ' ';
      line += step;
    };
    for (QtacPtr s = s0; s; s = s->next) {
      switch (s->kind) {
        case Qtac::Kind::Intro: {
          std::string step = s->names.size() == 1 ? "intro" : "intros";
          for (auto& n : s->names) {
            std::string f = fresh(n);
            names.push_back(f);
            step += " " + f;
          }
          emit(step + ".");
          continue;
        }
        case Qtac::Kind::Symmetry:
          emit("symmetry.");
          continue;
        case Qtac::Kind::Reflexivity:
          emit("reflexivity.");
          continue;
        case Qtac::Kind::Apply:
          emit("apply " + term(s->arg) + ".");
          continue;
        case Qtac::Kind::Rewrite: {
          std::string step = s->ltr ? "rewrite " : "rewrite <- ";
          step += term(s->arg);
          if (s->motive) step += " motive " + term(s->motive);
          emit(step + ".");
          continue;
        }
        case Qtac::Kind::Left:
          emit("left.");
          continue;
        case Qtac::Kind::Right:
          emit("right.");
          continue;
        case Qtac::Kind::Induction:
        case Qtac::Kind::Split: {
          if (s->kind == Qtac::Kind::Induction) {
            std::string step = "induction " + term(s->arg);
            if (s->motive) step += " motive " + term(s->motive);
            emit(step + ".");
          } else {
            emit("split.");
          }
          lines.push_back(line);
          for (auto& b : s->branches) {
            size_t mark = names.size();
            std::vector<std::string> sub = render(b, depth + 1);
            names.resize(mark);
            sub[0] = std::string(2 * depth, ' ') + bullet(depth + 1) + " " + sub[0];
            for (auto& l : sub) lines.push_back(std::move(l));
          }
          return lines;
        }
      }
    }
    lines.push_back(line);
    return lines;
  }
};

}  // namespace detail

inline std::string print_script(const QtacPtr& s, const std::vector<std::string>& binders = {}) {
  detail::ScriptPrinter p;
  detail::collect_script_globals(s, p.reserved);
  p.names = binders;
  std::string out;
  for (auto& line : p.render(s, 0)) out += line + "\n";
  return out;
}

// ----- parsing the printed form back -----

namespace detail {

struct QTok {
  enum Kind { Word, Term, Dot, Bullet, End } kind;
  std::string text;
  int line, col;
};

inline std::vector<QTok> lex_script(const std::string& src) {
  std::vector<QTok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (src[i + j] == '\n') { ++line; col = 1; } else ++col;
    }
    i += k;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { bump(1); continue; }
    int tl = line, tc = col;
    if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      int depth = 0;
      while (i < src.size()) {
        if (src[i] == '(' && i + 1 < src.size() && src[i + 1] == '*') { ++depth; bump(2); }
        else if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == ')') {
          --depth; bump(2);
          if (depth == 0) break;
        } else bump(1);
      }
      if (depth != 0) throw ParseError("unterminated comment", tl, tc);
      continue;
    }
    if (c == '(') {
      size_t j = i;
      int depth = 0;
      while (j < src.size()) {
        if (src[j] == '(') ++depth;
        if (src[j] == ')') {
          --depth;
          if (depth == 0) break;
        }
        ++j;
      }
      if (depth != 0) throw ParseError("unbalanced '(' in script", tl, tc);
      out.push_back({QTok::Term, src.substr(i + 1, j - i - 1), tl, tc});
      bump(j - i + 1);
      continue;
    }
    if (c == '.') {
      out.push_back({QTok::Dot, ".", tl, tc});
      bump(1);
      continue;
    }
    if ((c == '-' || c == '+' || c == '*') &&
        (i + 1 >= src.size() || std::isspace((unsigned char)src[i + 1]))) {
      out.push_back({QTok::Bullet, std::string(1, c), tl, tc});
      bump(1);
      continue;
    }
    size_t j = i;
    while (j < src.size() && !std::isspace((unsigned char)src[j]) && src[j] != '(' &&
           src[j] != ')' && src[j] != '.')
      ++j;
    if (j == i) throw ParseError(std::string("unexpected character '") + c + "' in script", tl, tc);
    out.push_back({QTok::Word, src.substr(i, j - i), tl, tc});
    bump(j - i);
  }
  out.push_back({QTok::End, "", line, col});
  return out;
}

struct ScriptParser {
  const GlobalEnv& env;
  std::vector<QTok> toks;
  size_t pos = 0;
  std::vector<std::string> names;

  const QTok& peek() const { return toks[std::min(pos, toks.size() - 1)]; }
  const QTok& next() { return toks[std::min(pos++, toks.size() - 1)]; }
  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  void dot() {
    if (peek().kind != QTok::Dot) err("expected '.'");
    next();
  }

  TermPtr term() {
    if (peek().kind != QTok::Term) err("expected a parenthesized term");
    std::string src = next().text;
    auto tk = lex(src);
    TermParser p(tk);
    p.binders = names;
    TermPtr t = p.parse_term();
    if (!p.at(Tok::End)) p.err("trailing input after term");
    return resolve(env, t);
  }

  // Sibling bullets share a glyph and an indent column; the column keeps
  // deep nesting unambiguous once the three glyphs start repeating.
  std::vector<QtacPtr> branches(int depth, size_t expect = 0) {
    std::string b(1, ScriptPrinter::bullet(depth + 1));
    int col = 2 * depth + 1;
    std::vector<QtacPtr> out;
    while (peek().kind == QTok::Bullet && peek().text == b && peek().col == col) {
      next();
      size_t mark = names.size();
      out.push_back(seq(depth + 1));
      names.resize(mark);
    }
    if (out.empty()) err("expected a '" + b + "' branch");
    if (expect && out.size() != expect) err("wrong number of branches");
    return out;
  }

  QtacPtr seq(int depth) {
    std::vector<Qtac> steps;
    while (peek().kind == QTok::Word) {
      std::string w = next().text;
      if (w == "intro" || w == "intros") {
        std::vector<std::string> ns;
        while (peek().kind == QTok::Word) ns.push_back(next().text);
        if (ns.empty()) err("expected a name after " + w);
        dot();
        for (auto& n : ns) names.push_back(n);
        steps.push_back({Qtac::Kind::Intro, std::move(ns), nullptr, nullptr, true, {}, nullptr});
      } else if (w == "symmetry") {
        dot();
        steps.push_back({Qtac::Kind::Symmetry, {}, nullptr, nullptr, true, {}, nullptr});
      } else if (w == "reflexivity") {
        dot();
        steps.push_back({Qtac::Kind::Reflexivity, {}, nullptr, nullptr, true, {}, nullptr});
      } else if (w == "left" || w == "right") {
        dot();
        steps.push_back({w == "left" ? Qtac::Kind::Left : Qtac::Kind::Right,
                         {}, nullptr, nullptr, true, {}, nullptr});
      } else if (w == "apply") {
        TermPtr t = term();
        dot();
        steps.push_back({Qtac::Kind::Apply, {}, nullptr, std::move(t), true, {}, nullptr});
      } else if (w == "rewrite") {
        bool ltr = true;
        if (peek().kind == QTok::Word && peek().text == "<-") {
          ltr = false;
          next();
        }
        TermPtr eq = term();
        TermPtr motive;
        if (peek().kind == QTok::Word && peek().text == "motive") {
          next();
          motive = term();
        }
        dot();
        steps.push_back({Qtac::Kind::Rewrite, {}, std::move(motive), std::move(eq), ltr, {}, nullptr});
      } else if (w == "induction") {
        TermPtr target = term();
        TermPtr motive;
        if (peek().kind == QTok::Word && peek().text == "motive") {
          next();
          motive = term();
        }
        dot();
        steps.push_back({Qtac::Kind::Induction, {}, std::move(motive), std::move(target), true,
                         branches(depth), nullptr});
        break;
      } else if (w == "split") {
        dot();
        steps.push_back({Qtac::Kind::Split, {}, nullptr, nullptr, true, branches(depth, 2), nullptr});
        break;
      } else {
        err("unknown tactic '" + w + "'");
      }
    }
    if (steps.empty()) err("expected a tactic");
    QtacPtr out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      it->next = std::move(out);
      out = q_step(std::move(*it));
    }
    return out;
  }
};

}  // namespace detail

inline QtacPtr parse_script(const GlobalEnv& env, const std::string& text,
                            const std::vector<std::string>& binders = {}) {
  detail::ScriptParser p{env, detail::lex_script(text)};
  p.names = binders;
  QtacPtr s = p.seq(0);
  if (p.peek().kind != detail::QTok::End) p.err("trailing input after script");
  return s;
}

// ----- simplification -----

struct ScriptHint {
  std::string name;
  QtacPtr script;
};

namespace detail {

inline QtacPtr merge_intros(const QtacPtr& s) {
  if (!s) return s;
  Qtac q = *s;
  for (auto& b : q.branches) b = merge_intros(b);
  q.next = merge_intros(q.next);
  if (q.kind == Qtac::Kind::Intro && q.next && q.next->kind == Qtac::Kind::Intro) {
    Qtac merged = *q.next;
    merged.names.insert(merged.names.begin(), q.names.begin(), q.names.end());
    return q_step(std::move(merged));
  }
  return q_step(std::move(q));
}

// Pre-order numbering over the script tree; `counter` advances even when no
// replacement happens so positions are stable across calls.
inline QtacPtr at_position(const QtacPtr& s, int& counter, int target,
                           const std::function<QtacPtr(const QtacPtr&)>& f) {
  if (!s) return s;
  int here = counter++;
  if (here == target) return f(s);
  Qtac q = *s;
  for (auto& b : q.branches) b = at_position(b, counter, target, f);
  q.next = at_position(q.next, counter, target, f);
  return q_step(std::move(q));
}

inline int count_positions(const QtacPtr& s) {
  if (!s) return 0;
  int n = 1;
  for (auto& b : s->branches) n += count_positions(b);
  return n + count_positions(s->next);
}

inline bool replays(const GlobalEnv& env, const Goal& goal, const QtacPtr& s) {
  try {
    replay(env, goal, s);
    return true;
  } catch (const KernelError&) {
    return false;
  }
}

}  // namespace detail

// Second pass over a suggested script: merge intro chains, drop motive
// arguments the replayer can re-infer, and substitute user hints where they
// still close the goal. Every accepted change is validated by replay, so the
// result replays whenever the input did.
inline QtacPtr simplify_script(const GlobalEnv& env, const Goal& goal, QtacPtr s,
                               const std::vector<ScriptHint>& hints = {}) {
  s = detail::merge_intros(s);

  int n = detail::count_positions(s);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    QtacPtr cand = detail::at_position(s, c, i, [](const QtacPtr& node) -> QtacPtr {
      if ((node->kind == Qtac::Kind::Rewrite || node->kind == Qtac::Kind::Induction) &&
          node->motive) {
        Qtac q = *node;
        q.motive = nullptr;
        return q_step(std::move(q));
      }
      return node;
    });
    if (cand != s && print_script(cand) != print_script(s) && detail::replays(env, goal, cand))
      s = cand;
  }

  if (!hints.empty()) {
    for (int pass = 0; pass < 8; ++pass) {
      bool changed = false;
      n = detail::count_positions(s);
      for (int i = 0; i < n && !changed; ++i) {
        for (auto& h : hints) {
          int c = 0;
          QtacPtr cand = detail::at_position(s, c, i,
                                             [&](const QtacPtr&) { return h.script; });
          if (print_script(cand) == print_script(s)) continue;
          if (detail::replays(env, goal, cand)) {
            s = cand;
            changed = true;
            break;
          }
        }
      }
      if (!changed) break;
    }
  }
  return s;
}

}  // namespace pml
