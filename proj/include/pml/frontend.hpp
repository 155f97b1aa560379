#pragma once

// File loading, vernacular printing, and the command-line driver shared by
// the `pml` tool and the frontend tests.

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pml/decompile.hpp"
#include "pml/prelude.hpp"
#include "pml/search.hpp"
#include "pml/transform.hpp"

namespace pml {

// ----- vernacular printing (emitted files re-parse and re-check) -----

namespace detail {

inline std::string print_under(const TermPtr& t, const std::vector<std::string>& binders) {
  Printer p;
  collect_globals(t, p.reserved);
  p.binders = binders;
  std::string out;
  p.print(t, 0, out);
  return out;
}

}  // namespace detail

inline std::string print_vernacular(const Vernacular& cmd) {
  std::ostringstream out;
  if (auto* i = std::get_if<VInductive>(&cmd)) {
    const InductiveDecl& d = i->decl;
    out << "Inductive " << d.name;
    std::vector<std::string> binders;
    for (auto& [hint, ty] : d.params) {
      out << " (" << hint << " : " << detail::print_under(ty, binders) << ")";
      binders.push_back(hint);
    }
    out << " : " << detail::print_under(d.arity, binders) << " :=";
    for (size_t j = 0; j < d.ctors.size(); ++j) {
      out << (j ? "\n| " : "\n  ") << d.ctors[j].first << " : "
          << detail::print_under(d.ctors[j].second, binders);
    }
    out << ".\n";
  } else if (auto* df = std::get_if<VDefinition>(&cmd)) {
    out << "Definition " << df->name << " :\n  " << print_term(df->type) << " :=\n  "
        << print_term(df->body) << ".\n";
  } else if (auto* ax = std::get_if<VAxiom>(&cmd)) {
    out << "Axiom " << ax->name << " : " << print_term(ax->type) << ".\n";
  } else if (auto* c = std::get_if<VConfigure>(&cmd)) {
    out << "Configure " << c->name << " " << print_term(c->A) << " " << print_term(c->B)
        << " {\n";
    for (auto& [key, vals] : c->fields) {
      out << "  " << key << " := ";
      for (size_t j = 0; j < vals.size(); ++j)
        out << (j ? " | " : "") << print_term(vals[j]);
      out << " ;\n";
    }
    if (!c->trusted.empty()) {
      out << "  trusted :=";
      for (auto& t : c->trusted) out << " " << t;
      out << " ;\n";
    }
    out << "}.\n";
  } else if (auto* r = std::get_if<VRepair>(&cmd)) {
    out << (r->module ? "RepairModule " : "Repair ") << r->A << " " << r->B << " in";
    for (auto& t : r->targets) out << " " << t;
    if (r->config) out << " using " << *r->config;
    if (r->mapping) out << " mapping " << *r->mapping;
    if (r->suggest) out << " suggest";
    out << ".\n";
  } else if (auto* dc = std::get_if<VDecompile>(&cmd)) {
    out << "Decompile " << dc->name << ".\n";
  } else if (auto* an = std::get_if<VAnnotate>(&cmd)) {
    out << "Annotate " << an->name << " as " << an->role << " " << an->index << " at ";
    for (size_t j = 0; j < an->path.size(); ++j) out << (j ? "." : "") << an->path[j];
    out << ".\n";
  }
  return out.str();
}

// ----- loading a file on top of an environment -----

struct LoadedFile {
  GlobalEnv env;
  std::vector<Vernacular> commands;
  std::map<std::string, Configuration> configs;
};

inline LoadedFile load_file(GlobalEnv base, const std::string& text) {
  LoadedFile L{std::move(base), {}, {}};
  for (auto& cmd : parse_file(text)) {
    if (std::holds_alternative<VInductive>(cmd) || std::holds_alternative<VDefinition>(cmd) ||
        std::holds_alternative<VAxiom>(cmd)) {
      L.env = exec_decl(L.env, cmd);
    } else if (auto* c = std::get_if<VConfigure>(&cmd)) {
      L.configs[c->name] = config_from_vernacular(L.env, *c);
    }
    L.commands.push_back(cmd);
  }
  return L;
}

// Annotations recorded in the file, grouped by definition.
inline std::map<std::string, std::vector<Annotation>> file_annotations(const LoadedFile& L) {
  std::map<std::string, std::vector<Annotation>> out;
  for (auto& cmd : L.commands)
    if (auto* a = std::get_if<VAnnotate>(&cmd)) out[a->name].push_back({a->path, a->role, a->index});
  return out;
}

// ----- repair plumbing -----

namespace detail {

inline std::string head_const_name(const TermPtr& t) {
  std::vector<TermPtr> args;
  TermPtr h = spine_head(t, args);
  if (h->tag == Tag::Ind || h->tag == Tag::Const) return h->s;
  return "";
}

}  // namespace detail

// The definitions a repair of `root` drags along: every dependency whose
// statement or body mentions the source type, excluding the configuration's
// own interface constants (those are replaced, not renamed).
inline std::vector<std::string> repair_closure(const GlobalEnv& env, const Configuration& cfg,
                                               const std::string& root) {
  std::string a_name = detail::head_const_name(cfg.type_a);
  std::set<std::string> roles;
  auto role_head = [&](const TermPtr& t) {
    std::string n = detail::head_const_name(t);
    if (!n.empty()) roles.insert(n);
  };
  role_head(cfg.dep_elim_a);
  role_head(cfg.eta_a);
  for (auto& t : cfg.dep_constr_a) role_head(t);
  for (auto& t : cfg.iota_a) role_head(t);

  std::set<std::string> seen;
  std::vector<std::string> out;
  std::function<void(const std::string&, bool)> visit = [&](const std::string& name, bool force) {
    if (seen.count(name)) return;
    const Definition* d = env.definition(name);
    if (!d) return;
    bool mentions = name_occurs(d->type, a_name) || name_occurs(d->body, a_name);
    if (!force && !mentions) return;
    seen.insert(name);
    std::set<std::string> deps;
    detail::collect_consts(d->type, deps);
    detail::collect_consts(d->body, deps);
    for (auto& c : deps)
      if (c != name && !roles.count(c)) visit(c, false);
    out.push_back(name);
  };
  visit(root, true);
  return out;
}

// ----- persistent lift cache (directory from an environment variable) -----

inline void load_lift_cache(const GlobalEnv& env, LiftCache& cache, const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    try {
      cache.store(line.substr(0, tab), resolve(env, parse_term(line.substr(tab + 1))));
    } catch (const std::exception&) {
      // a stale or hand-edited entry; skip it
    }
  }
}

inline void save_lift_cache(LiftCache& cache, const std::string& path) {
  std::map<std::string, TermPtr> sorted;
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    for (auto& [k, v] : cache.map) sorted[k] = v;
  }
  std::ofstream out(path);
  for (auto& [k, v] : sorted) out << k << '\t' << print_term(v) << '\n';
}

// ----- the command-line driver -----

namespace detail {

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct Flags {
  std::string file;
  std::map<std::string, std::string> values;           // --flag value
  std::vector<std::string> targets;                    // --target (repeatable)
  bool suggest = false;

  static Flags parse(const std::vector<std::string>& args, size_t start) {
    Flags f;
    for (size_t i = start; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a == "--suggest-tactics") {
        f.suggest = true;
      } else if (a == "--target" || a == "--targets") {
        ++i;
        while (i < args.size() && args[i].rfind("--", 0) != 0) f.targets.push_back(args[i++]);
        --i;
        if (f.targets.empty()) throw CliError(2, "missing value for " + a);
      } else if (a.rfind("--", 0) == 0) {
        if (i + 1 >= args.size()) throw CliError(2, "missing value for " + a);
        f.values[a.substr(2)] = args[++i];
      } else if (f.file.empty()) {
        f.file = a;
      } else {
        throw CliError(2, "unexpected argument '" + a + "'");
      }
    }
    if (f.file.empty()) throw CliError(2, "missing input file");
    return f;
  }

  std::string need(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw CliError(2, "missing --" + key);
    return it->second;
  }
  const std::string* get(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string stem_of(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".pml")
    return path.substr(0, path.size() - 4);
  return path;
}

// Pick the configuration for a repair run: an explicit name, an explicit
// search-result index, or the first declared configuration connecting the
// two types (falling back to the best search result).
inline Configuration choose_config(const LoadedFile& L, const std::string& A,
                                   const std::string& B, const Flags& f) {
  if (const std::string* c = f.get("config")) {
    auto it = L.configs.find(*c);
    if (it == L.configs.end()) throw CliError(2, "unknown configuration '" + *c + "'");
    return it->second;
  }
  if (const std::string* m = f.get("mapping")) {
    int k = -1;
    try {
      k = std::stoi(*m);
    } catch (const std::exception&) {
      throw CliError(2, "mapping index out of range");
    }
    auto ms = find_permutations(L.env, A, B);
    if (k < 0 || (size_t)k >= ms.size()) throw CliError(2, "mapping index out of range");
    return config_from_permutation(L.env, A, B, ms[k]);
  }
  for (auto& cmd : L.commands)
    if (auto* c = std::get_if<VConfigure>(&cmd)) {
      const Configuration& cfg = L.configs.at(c->name);
      if (head_const_name(cfg.type_a) == A && head_const_name(cfg.type_b) == B)
        return cfg;
    }
  auto ms = find_permutations(L.env, A, B);
  if (ms.empty()) throw CliError(1, "no configuration connects " + A + " and " + B);
  return config_from_permutation(L.env, A, B, ms[0]);
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::CliError;
  try {
    if (args.empty())
      throw CliError(2,
                     "usage: pml <check|repair|repair-module|search-config|decompile|"
                     "validate-config> <file> [flags]");
    const std::string& cmd = args[0];
    detail::Flags f = detail::Flags::parse(args, 1);

    if (cmd == "check") {
      LoadedFile L = load_file(load_prelude(), detail::slurp(f.file));
      size_t decls = 0;
      for (auto& c : L.commands)
        if (std::holds_alternative<VInductive>(c) || std::holds_alternative<VDefinition>(c) ||
            std::holds_alternative<VAxiom>(c))
          ++decls;
      out << "checked " << decls << " declarations, " << L.configs.size()
          << " configurations: ok\n";
      return 0;
    }

    if (cmd == "validate-config") {
      LoadedFile L = load_file(load_prelude(), detail::slurp(f.file));
      std::string name = f.need("config");
      auto it = L.configs.find(name);
      if (it == L.configs.end()) throw CliError(2, "unknown configuration '" + name + "'");
      ValidationReport report = validate_configuration(L.env, it->second);
      out << report.summary();
      if (!report.ok()) {
        err << "configuration '" << name << "' is invalid\n";
        return 1;
      }
      out << "configuration '" << name << "' is valid\n";
      return 0;
    }

    if (cmd == "search-config") {
      LoadedFile L = load_file(load_prelude(), detail::slurp(f.file));
      auto ms = find_permutations(L.env, f.need("from"), f.need("to"));
      for (size_t i = 0; i < ms.size(); ++i) {
        out << i << ":";
        for (int j : ms[i].perm) out << " " << j;
        out << "  (name matches " << ms[i].name_matches << ", distance "
            << ms[i].name_distance << ")\n";
      }
      if (ms.empty()) out << "no type-correct constructor mapping\n";
      return 0;
    }

    if (cmd == "decompile") {
      LoadedFile L = load_file(load_prelude(), detail::slurp(f.file));
      if (f.targets.size() != 1) throw CliError(2, "decompile needs exactly one --target");
      const Definition* d = L.env.definition(f.targets[0]);
      if (!d) throw CliError(1, "'" + f.targets[0] + "' is not a defined constant");
      QtacPtr s = decompile(L.env, Context{}, d->body);
      s = simplify_script(L.env, Goal{Context{}, d->type}, s);
      std::string text = print_script(s);
      out << text;
      std::string side = detail::stem_of(f.file) + "." + f.targets[0] + ".qtac";
      std::ofstream(side) << text;
      err << "wrote " << side << "\n";
      return 0;
    }

    if (cmd == "repair" || cmd == "repair-module") {
      LoadedFile L = load_file(load_prelude(), detail::slurp(f.file));
      std::string A = f.need("from"), B = f.need("to");
      if (f.targets.empty()) throw CliError(2, "missing --target");
      if (cmd == "repair" && f.targets.size() != 1)
        throw CliError(2, "repair takes exactly one --target; use repair-module for several");
      Configuration cfg = detail::choose_config(L, A, B, f);

      std::vector<std::string> targets = f.targets;
      if (cmd == "repair") targets = repair_closure(L.env, cfg, f.targets[0]);
      for (auto& t : targets)
        if (!L.env.definition(t)) throw CliError(1, "'" + t + "' is not a defined constant");

      RepairSession sess;
      sess.annotations = file_annotations(L);
      sess.cache = std::make_shared<LiftCache>();
      std::string cache_file;
      if (const char* dir = std::getenv("PML_CACHE_DIR")) {
        cache_file = std::string(dir) + "/lift-cache.txt";
        load_lift_cache(L.env, *sess.cache, cache_file);
      }

      GlobalEnv repaired = repair_module(L.env, cfg, targets, &sess);
      if (!cache_file.empty()) save_lift_cache(*sess.cache, cache_file);

      // new definitions, in the order the repair introduced them
      std::vector<std::string> fresh(repaired.order.begin() + L.env.order.size(),
                                     repaired.order.end());

      std::ostringstream prog;
      prog << "(* Output of `pml " << cmd << "`: " << A << " to " << B << " via " << cfg.id
           << ". *)\n";
      for (auto& c : L.commands) {
        if (std::holds_alternative<VRepair>(c) || std::holds_alternative<VDecompile>(c)) continue;
        prog << "\n" << print_vernacular(c);
      }
      std::string last_script;
      for (auto& name : fresh) {
        const Definition* d = repaired.definition(name);
        prog << "\n";
        if (f.suggest) {
          QtacPtr s = decompile(repaired, Context{}, d->body);
          s = simplify_script(repaired, Goal{Context{}, d->type}, s);
          last_script = print_script(s);
          prog << "(* suggested script for " << name << ":\n" << last_script << "*)\n";
        }
        prog << print_vernacular(VDefinition{name, d->type, d->body});
      }
      for (auto& [old_name, new_name] : sess.renames)
        out << "repaired " << old_name << " -> " << new_name << "\n";

      std::string out_path = detail::stem_of(f.file) + ".repaired.pml";
      std::ofstream(out_path) << prog.str();
      out << "wrote " << out_path << "\n";
      if (f.suggest && !last_script.empty()) {
        std::string side = detail::stem_of(f.file) + ".repaired.qtac";
        std::ofstream(side) << last_script;
        out << "wrote " << side << "\n";
      }
      return 0;
    }

    throw CliError(2, "unknown subcommand '" + cmd + "'");
  } catch (const detail::CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const TransformFailed& e) {
    err << "transformation failed: " << e.what() << "\n";
    return 3;
  } catch (const TerminationGuardTriggered& e) {
    err << "transformation failed: " << e.what() << "\n";
    return 3;
  } catch (const DependencyError& e) {
    err << "transformation failed: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const KernelError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pml
