#pragma once

// Shared loader: corpus files on top of the prelude, with configurations
// assembled and non-declaration commands kept aside for the frontend tests.

#include <fstream>
#include <sstream>

#include "pml/config.hpp"
#include "pml/prelude.hpp"

namespace cor {

using namespace pml;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(PML_CORPUS_DIR) + "/" + name;
}

struct Loaded {
  GlobalEnv env;
  std::map<std::string, Configuration> configs;
  std::vector<Vernacular> commands;  // Repair/Decompile/Annotate, in order
};

inline void load_into(Loaded& L, const std::string& name) {
  for (auto& cmd : parse_file(read_file(corpus_path(name)))) {
    if (std::holds_alternative<VInductive>(cmd) || std::holds_alternative<VDefinition>(cmd) ||
        std::holds_alternative<VAxiom>(cmd)) {
      L.env = exec_decl(L.env, cmd);
    } else if (auto* c = std::get_if<VConfigure>(&cmd)) {
      L.configs[c->name] = config_from_vernacular(L.env, *c);
    } else {
      L.commands.push_back(cmd);
    }
  }
}

inline Loaded load_corpus(const std::vector<std::string>& names = {"swap.pml", "ij.pml",
                                                                   "natbin.pml", "packed.pml"}) {
  Loaded L;
  L.env = load_prelude();
  for (auto& n : names) load_into(L, n);
  return L;
}

// constructor-form literals
inline TermPtr nat_lit(unsigned k) {
  TermPtr t = mk_constr(0, mk_ind("nat"));
  while (k--) t = mk_app(mk_constr(1, mk_ind("nat")), t);
  return t;
}
inline TermPtr pos_lit(unsigned k) {
  if (k == 1) return mk_constr(0, mk_ind("positive"));
  TermPtr rest = pos_lit(k / 2);
  return mk_app(mk_constr(k % 2 ? 2 : 1, mk_ind("positive")), rest);
}
inline TermPtr N_lit(unsigned k) {
  if (k == 0) return mk_constr(0, mk_ind("N"));
  return mk_app(mk_constr(1, mk_ind("N")), pos_lit(k));
}
inline TermPtr list_lit(const std::string& name, int cons_idx, int nil_idx, const TermPtr& T,
                        const std::vector<TermPtr>& elems) {
  TermPtr ind = mk_app(mk_ind(name), T);
  TermPtr t = mk_constr(nil_idx, ind);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    t = mk_app(mk_app(mk_constr(cons_idx, ind), *it), t);
  return t;
}

// every list over {0, 1} of length <= maxlen, as element vectors
inline std::vector<std::vector<TermPtr>> bit_lists(int maxlen) {
  std::vector<std::vector<TermPtr>> out{{}};
  size_t start = 0;
  for (int len = 1; len <= maxlen; ++len) {
    size_t end = out.size();
    for (size_t i = start; i < end; ++i)
      for (unsigned b = 0; b <= 1; ++b) {
        auto q = out[i];
        q.push_back(nat_lit(b));
        out.push_back(q);
      }
    start = end;
  }
  return out;
}

}  // namespace cor
