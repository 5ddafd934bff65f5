// Command-line front end: proving, reductions, fragment encoders, automaton
// runs and classification, with plain-text or JSON reports.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ipc/kripke.hpp"
#include "ipc/prover.hpp"
#include "ipc/reductions.hpp"

using nlohmann::json;
using namespace ipc;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitError = 2;

// Inputs are literal text, a file name, or "-" for stdin.
std::string slurp(const std::string& input) {
  if (input == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream file(input);
  if (file) {
    std::ostringstream os;
    os << file.rdbuf();
    return os.str();
  }
  return input;
}

json model_json(const Countermodel& cm) {
  json order = json::array();
  for (std::size_t i = 0; i < cm.model.size(); ++i)
    for (std::size_t j = 0; j < cm.model.size(); ++j)
      if (i != j && cm.model.leq(i, j)) order.push_back({i, j});
  json valuation = json::object();
  for (const auto& [atom, mask] : cm.model.valuation()) {
    json states = json::array();
    for (std::size_t i = 0; i < cm.model.size(); ++i)
      if ((mask >> i) & 1u) states.push_back(i);
    valuation[atom] = states;
  }
  return {{"states", cm.model.size()},
          {"order", order},
          {"valuation", valuation},
          {"state", cm.state}};
}

void print_model(const Countermodel& cm, Formula goal) {
  std::cout << "countermodel:\n" << cm.model.to_text();
  std::cout << "refutes: c" << cm.state << " |/- " << print_formula(goal) << "\n";
  bool ok = cm.model.defects().empty() && !forces(cm.model, cm.state, goal);
  std::cout << "verified: " << (ok ? "yes" : "no") << "\n";
}

int cmd_prove(const std::string& input, const std::string& fragment, bool term,
              std::optional<std::size_t> refute, bool as_json) {
  Formula goal = parse_formula(slurp(input));
  ProofSearchResult r =
      fragment == "iipc" ? prove_iipc(Context{}, goal) : prove(Context{}, goal);
  std::optional<Countermodel> cm;
  if (!r.provable() && refute) cm = countermodel_search(Context{}, goal, *refute);

  if (as_json) {
    json out{{"command", "prove"},
             {"input", print_formula(goal)},
             {"result", r.provable() ? "provable" : "unprovable"}};
    if (r.provable() && term) out["witness"] = print_term(*r.witness);
    if (cm) out["countermodel"] = model_json(*cm);
    std::cout << out.dump(2) << "\n";
  } else if (r.provable()) {
    std::cout << "provable\n";
    if (term) {
      std::cout << "witness: " << print_term(*r.witness) << "\n";
      std::cout << "check: " << print_term(*r.witness) << " : " << print_formula(goal) << "\n";
    }
  } else {
    std::cout << "unprovable\n";
    if (refute) {
      if (cm)
        print_model(*cm, goal);
      else
        std::cout << "countermodel: none within " << *refute << " states\n";
    }
  }
  return r.provable() ? kExitYes : kExitNo;
}

int cmd_reduce(const std::string& input, const std::string& target, bool as_json) {
  Formula phi = parse_formula(slurp(input));
  std::string payload;
  if (target == "iipc3") {
    payload = print_formula(ipc_to_iipc3(phi));
  } else if (target == "classical3") {
    payload = print_formula(classical_order3(phi));
  } else if (target == "automaton") {
    AutomatonWithStart aw = ipc_to_automaton(phi);
    payload = print_automaton(aw.automaton, aw.start);
  } else {
    throw CLI::ValidationError("--to must be iipc3, automaton or classical3");
  }
  if (as_json) {
    std::cout << json{{"command", "reduce"},
                      {"input", print_formula(phi)},
                      {"target", target},
                      {"output", payload}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
  }
  return kExitYes;
}

int cmd_encode(const std::string& input, const std::string& mode, bool pad, bool fold,
               bool as_json) {
  Cnf3 psi = parse_dimacs(slurp(input), pad);
  if (mode == "np") {
    Formula f = cnf_to_np_formula(psi);
    if (as_json)
      std::cout << json{{"command", "encode"}, {"mode", "np"}, {"formula", print_formula(f)}}
                       .dump(2)
                << "\n";
    else
      std::cout << print_formula(f) << "\n";
    return kExitYes;
  }
  if (mode != "conp") throw CLI::ValidationError("--mode must be np or conp");
  EncodedJudgement j = cnf_to_conp_context(psi);
  if (fold) {
    if (as_json)
      std::cout << json{{"command", "encode"},
                        {"mode", "conp"},
                        {"formula", print_formula(judgement_formula(j))}}
                       .dump(2)
                << "\n";
    else
      std::cout << print_formula(judgement_formula(j)) << "\n";
    return kExitYes;
  }
  if (as_json) {
    json hyps = json::array();
    for (const auto& [name, f] : j.context.items())
      hyps.push_back({{"name", name}, {"formula", print_formula(f)}});
    std::cout << json{{"command", "encode"},
                      {"mode", "conp"},
                      {"context", hyps},
                      {"goal", print_formula(j.goal)}}
                     .dump(2)
              << "\n";
  } else {
    for (const auto& [name, f] : j.context.items())
      std::cout << name << ": " << print_formula(f) << "\n";
    std::cout << "goal: " << print_formula(j.goal) << "\n";
  }
  return kExitYes;
}

void print_witness_tree(const MonotonicAutomaton& a, const WitnessTree& w, int indent) {
  std::cout << std::string(indent * 2, ' ') << "<" << a.describe(w.config) << ">";
  if (w.instruction) std::cout << " via instruction " << *w.instruction;
  std::cout << "\n";
  for (const WitnessTree& c : w.children) print_witness_tree(a, c, indent + 1);
}

int cmd_automaton_run(const std::string& input, const std::string& init_override, bool witness,
                      bool as_json) {
  ParsedAutomaton p = parse_automaton(slurp(input));
  auto defects = validate(p.automaton);
  if (!defects.empty()) {
    for (const auto& d : defects) std::cerr << "defect: " << d << "\n";
    return kExitError;
  }
  std::optional<Configuration> init = p.initial;
  if (!init_override.empty()) {
    // "q {r1, r2}" in the same shape as the init: line
    ParsedAutomaton tmp = parse_automaton(print_automaton(p.automaton) + "init: " +
                                          init_override + "\n");
    init = tmp.initial;
  }
  if (!init) {
    std::cerr << "no initial configuration: give an init: line or --init\n";
    return kExitError;
  }
  AcceptanceResult res = accepts(p.automaton, *init);
  if (as_json) {
    json out{{"command", "automaton-run"},
             {"result", res.accepting ? "accepting" : "rejecting"},
             {"visited", res.stats.visited}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << (res.accepting ? "accepting" : "rejecting") << "\n";
    if (witness && res.witness) {
      std::cout << "witness:\n";
      print_witness_tree(p.automaton, *res.witness, 1);
      std::cout << "verified: " << (witness_consistent(p.automaton, *res.witness) ? "yes" : "no")
                << "\n";
    }
  }
  return res.accepting ? kExitYes : kExitNo;
}

int cmd_automaton_validate(const std::string& input, bool as_json) {
  ParsedAutomaton p = parse_automaton(slurp(input));
  auto defects = validate(p.automaton);
  if (as_json) {
    std::cout << json{{"command", "automaton-validate"}, {"defects", defects}}.dump(2) << "\n";
  } else if (defects.empty()) {
    std::cout << "ok\n";
  } else {
    for (const auto& d : defects) std::cout << "defect: " << d << "\n";
  }
  return defects.empty() ? kExitYes : kExitError;
}

int cmd_classify(const std::string& input, bool as_json) {
  Formula f = parse_formula(slurp(input));
  FragmentClass c = classify(f);
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += v[i];
    }
    return out;
  };
  if (as_json) {
    json out{{"command", "classify"},
             {"input", print_formula(f)},
             {"implicational", c.is_implicational},
             {"t1_minus", c.in_t1_minus},
             {"t2_minus", c.in_t2_minus},
             {"t3_minus", c.in_t3_minus},
             {"order_two_plus", c.in_order_two_plus},
             {"data_atoms", c.data_atoms},
             {"control_atoms", c.control_atoms}};
    if (c.order) out["order"] = *c.order;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "implicational: " << (c.is_implicational ? "yes" : "no") << "\n";
    if (c.order) std::cout << "order: " << *c.order << "\n";
    std::cout << "t1_minus: " << (c.in_t1_minus ? "yes" : "no") << "\n";
    std::cout << "t2_minus: " << (c.in_t2_minus ? "yes" : "no") << "\n";
    std::cout << "t3_minus: " << (c.in_t3_minus ? "yes" : "no") << "\n";
    if (c.in_t3_minus) {
      std::cout << "data: " << join(c.data_atoms) << "\n";
      std::cout << "control: " << join(c.control_atoms) << "\n";
    }
    std::cout << "order_two_plus: " << (c.in_order_two_plus ? "yes" : "no") << "\n";
  }
  return kExitYes;
}

int cmd_check(const std::string& term_text, const std::string& type_text, bool as_json) {
  Term t = parse_term(slurp(term_text));
  Formula f = parse_formula(slurp(type_text));
  bool ok = checks_against(Context{}, t, f);
  if (as_json)
    std::cout << json{{"command", "check"},
                      {"term", print_term(t)},
                      {"type", print_formula(f)},
                      {"result", ok ? "checks" : "fails"}}
                     .dump(2)
              << "\n";
  else
    std::cout << (ok ? "checks" : "does not check") << "\n";
  return ok ? kExitYes : kExitNo;
}

int cmd_lba_encode(const std::string& input, const std::string& word, int steps_exp) {
  LbaDescription lba = parse_lba(slurp(input));
  std::vector<std::string> symbols;
  std::istringstream ws(word);
  std::string tok;
  while (ws >> tok) symbols.push_back(tok);
  if (symbols.size() == 1 && symbols[0].size() > 1) {
    // contiguous single-character symbols
    std::string all = symbols[0];
    symbols.clear();
    for (char c : all) symbols.emplace_back(1, c);
  }
  int p = steps_exp > 0 ? steps_exp : default_time_exponent(lba, symbols.size());
  AutomatonWithStart aw = lba_to_automaton(lba, symbols, p);
  std::cout << print_automaton(aw.automaton, aw.start);
  return kExitYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof search for intuitionistic propositional logic with monotonic automata,"
               " fragment encoders and Kripke countermodels"};
  app.require_subcommand(1);

  std::string input = "-", fragment = "ipc", target, mode, init_override, word;
  std::string term_text, type_text;
  bool term = false, pad = false, fold = false, witness = false, as_json = false;
  int refute_states = -1, steps_exp = 0;

  auto* prove_cmd = app.add_subcommand("prove", "decide a formula");
  prove_cmd->add_option("input", input, "formula, file, or - for stdin");
  prove_cmd->add_option("--fragment", fragment, "ipc or iipc")
      ->check(CLI::IsMember({"ipc", "iipc"}));
  prove_cmd->add_flag("--term", term, "print a proof-term witness");
  prove_cmd
      ->add_option("--refute", refute_states,
                   "search for a countermodel with at most N states when unprovable")
      ->expected(0, 1)
      ->default_str("4");
  prove_cmd->add_flag("--json", as_json);

  auto* reduce_cmd = app.add_subcommand("reduce", "translate a formula");
  reduce_cmd->add_option("input", input);
  reduce_cmd->add_option("--to", target, "iipc3, automaton or classical3")->required();
  reduce_cmd->add_flag("--json", as_json);

  auto* encode_cmd = app.add_subcommand("encode", "encode a DIMACS 3-CNF instance");
  encode_cmd->add_option("input", input, "DIMACS file or - for stdin");
  encode_cmd->add_option("--mode", mode, "np or conp")->required();
  encode_cmd->add_flag("--pad", pad, "pad short clauses by repeating the last literal");
  encode_cmd->add_flag("--fold", fold, "print the conp context as one formula");
  encode_cmd->add_flag("--json", as_json);

  auto* automaton_cmd = app.add_subcommand("automaton", "work with automaton files");
  automaton_cmd->require_subcommand(1);
  auto* run_cmd = automaton_cmd->add_subcommand("run", "decide acceptance");
  run_cmd->add_option("input", input, "automaton file or - for stdin");
  run_cmd->add_option("--init", init_override, "override the initial configuration: 'q {r1, r2}'");
  run_cmd->add_flag("--witness", witness, "print and re-verify the witness tree");
  run_cmd->add_flag("--json", as_json);
  auto* validate_cmd = automaton_cmd->add_subcommand("validate", "list structural defects");
  validate_cmd->add_option("input", input);
  validate_cmd->add_flag("--json", as_json);

  auto* classify_cmd = app.add_subcommand("classify", "report fragment membership");
  classify_cmd->add_option("input", input);
  classify_cmd->add_flag("--json", as_json);

  auto* check_cmd = app.add_subcommand("check", "typecheck a proof term against a formula");
  check_cmd->add_option("term", term_text)->required();
  check_cmd->add_option("type", type_text)->required();
  check_cmd->add_flag("--json", as_json);

  auto* lba_cmd = app.add_subcommand("lba", "linear bounded automata");
  lba_cmd->require_subcommand(1);
  auto* lba_encode_cmd = lba_cmd->add_subcommand("encode", "compile an LBA run to an automaton");
  lba_encode_cmd->add_option("input", input, "LBA file or - for stdin");
  lba_encode_cmd->add_option("--input-word", word, "input word (spaces or contiguous chars)")
      ->required();
  lba_encode_cmd->add_option("--steps-exp", steps_exp, "time bound exponent (default: derived)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prove_cmd->parsed()) {
      std::optional<std::size_t> refute;
      if (prove_cmd->count("--refute"))
        refute = refute_states > 0 ? static_cast<std::size_t>(refute_states) : 4;
      return cmd_prove(input, fragment, term, refute, as_json);
    }
    if (reduce_cmd->parsed()) return cmd_reduce(input, target, as_json);
    if (encode_cmd->parsed()) return cmd_encode(input, mode, pad, fold, as_json);
    if (automaton_cmd->parsed()) {
      if (run_cmd->parsed()) return cmd_automaton_run(input, init_override, witness, as_json);
      return cmd_automaton_validate(input, as_json);
    }
    if (classify_cmd->parsed()) return cmd_classify(input, as_json);
    if (check_cmd->parsed()) return cmd_check(term_text, type_text, as_json);
    if (lba_cmd->parsed()) return cmd_lba_encode(input, word, steps_exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
