// End-to-end tests driving the ipctk binary; the binary path arrives as the
// first program argument.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace {

std::string g_binary;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, const std::string& stdin_data = "") {
  std::string cmd;
  if (!stdin_data.empty()) {
    std::string quoted = stdin_data;
    // single-quote for the shell
    std::string escaped;
    for (char c : quoted) {
      if (c == '\'')
        escaped += "'\\''";
      else
        escaped += c;
    }
    cmd = "printf '%s' '" + escaped + "' | ";
  }
  cmd += g_binary + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("prove command") {
  auto yes = run("prove \"p -> p\" --term");
  CHECK(yes.exit_code == 0);
  CHECK(yes.out.find("provable") == 0);
  CHECK(yes.out.find("witness:") != std::string::npos);
  CHECK(yes.out.find("check:") != std::string::npos);

  auto no = run("prove \"((p->q)->p)->p\" --refute 3");
  CHECK(no.exit_code == 1);
  CHECK(no.out.find("unprovable") == 0);
  CHECK(no.out.find("countermodel:") != std::string::npos);
  CHECK(no.out.find("verified: yes") != std::string::npos);

  // the three-state example finds a countermodel at the default bound
  auto three = run("prove \"(~p->q)->(~r->q)->(p->~r)->q\" --refute");
  CHECK(three.exit_code == 1);
  CHECK(three.out.find("state c2") != std::string::npos);

  auto bad = run("prove \"p ->\"");
  CHECK(bad.exit_code == 2);

  auto iipc_reject = run("prove \"p /\\\\ q\" --fragment iipc");
  CHECK(iipc_reject.exit_code == 2);

  auto stdin_input = run("prove -", "p -> q -> p");
  CHECK(stdin_input.exit_code == 0);
}

TEST_CASE("witness round trips through check") {
  auto witness = run("prove \"(p -> q) -> (q -> r) -> p -> r\" --term");
  REQUIRE(witness.exit_code == 0);
  std::size_t at = witness.out.find("check: ");
  REQUIRE(at != std::string::npos);
  std::string line = witness.out.substr(at + 7);
  line = line.substr(0, line.find('\n'));
  std::size_t colon = line.rfind(" : ");
  REQUIRE(colon != std::string::npos);
  std::string term = line.substr(0, colon);
  std::string type = line.substr(colon + 3);
  auto checked = run("check \"" + term + "\" \"" + type + "\"");
  CHECK(checked.exit_code == 0);
  CHECK(checked.out.find("checks") == 0);

  auto fails = run("check \"\\\\x:p. x\" \"p -> q\"");
  CHECK(fails.exit_code == 1);
}

TEST_CASE("reduce command and golden classical3") {
  auto gold = run("reduce \"(((p1->p2)->p3)->p4)->p5\" --to classical3");
  CHECK(gold.exit_code == 0);
  CHECK(gold.out == "(p1 -> (p2 -> p5) -> p4) -> (p3 -> p4) -> p5\n");

  auto iipc3 = run("reduce \"p -> p\" --to iipc3");
  CHECK(iipc3.exit_code == 0);

  // conjunctive arguments are fine (they feed the clausal translation);
  // a non-variable target is a fragment violation
  CHECK(run("reduce \"p /\\\\ q -> p\" --to classical3").exit_code == 0);
  auto fragment_error = run("reduce \"p -> p /\\\\ q\" --to classical3");
  CHECK(fragment_error.exit_code == 2);
}

TEST_CASE("pipe coherence") {
  const char* corpus[] = {"p -> p",       "((p->q)->p)->p", "p \\/ q -> q \\/ p",
                          "~~p -> p",     "p /\\ q -> p",   "false -> q",
                          "p \\/ ~p",     "~~(p \\/ ~p)",   "(p -> q) -> ~q -> ~p"};
  for (const char* f : corpus) {
    std::string quoted = std::string("\"") + f + "\"";
    int direct = run("prove " + quoted).exit_code;

    auto reduced = run("reduce " + quoted + " --to iipc3");
    REQUIRE(reduced.exit_code == 0);
    int via_iipc3 = run("prove - --fragment iipc", reduced.out).exit_code;
    CHECK(via_iipc3 == direct);

    auto automaton = run("reduce " + quoted + " --to automaton");
    REQUIRE(automaton.exit_code == 0);
    int via_automaton = run("automaton run -", automaton.out).exit_code;
    CHECK(via_automaton == direct);
  }
}

TEST_CASE("encode command") {
  std::string sat = "p cnf 1 1\n1 1 1 0\n";
  std::string unsat = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n";

  auto np = run("encode - --mode np", sat);
  REQUIRE(np.exit_code == 0);
  CHECK(run("prove - --fragment iipc", np.out).exit_code == 0);

  auto np_unsat = run("encode - --mode np", unsat);
  CHECK(run("prove - --fragment iipc", np_unsat.out).exit_code == 1);

  auto conp = run("encode - --mode conp --fold", unsat);
  REQUIRE(conp.exit_code == 0);
  CHECK(run("prove -", conp.out).exit_code == 0);

  auto conp_ctx = run("encode - --mode conp", sat);
  CHECK(conp_ctx.out.find("X1:") != std::string::npos);
  CHECK(conp_ctx.out.find("goal: false") != std::string::npos);

  auto short_clause = run("encode - --mode np", "p cnf 2 1\n1 2 0\n");
  CHECK(short_clause.exit_code == 2);
  auto padded = run("encode - --mode np --pad", "p cnf 2 1\n1 2 0\n");
  CHECK(padded.exit_code == 0);
}

TEST_CASE("automaton command") {
  std::string machine =
      "states: q0 f\nregisters: r\nfinal: f\ninit: q0 {r}\nq0: check {r} set {} goto f\n";
  auto yes = run("automaton run -", machine);
  CHECK(yes.exit_code == 0);
  CHECK(yes.out == "accepting\n");

  auto witness = run("automaton run - --witness", machine);
  CHECK(witness.out.find("witness:") != std::string::npos);
  CHECK(witness.out.find("verified: yes") != std::string::npos);

  auto overridden = run("automaton run - --init \"q0 {}\"", machine);
  CHECK(overridden.exit_code == 1);
  CHECK(overridden.out == "rejecting\n");

  std::string broken =
      "states: q0 f\nregisters: r\nfinal: f\ninit: q0 {r}\nq0: check {r} set {} goto nowhere\n";
  auto invalid = run("automaton validate -", broken);
  CHECK(invalid.exit_code == 2);
  CHECK(invalid.out.find("defect:") != std::string::npos);
  CHECK(run("automaton run -", broken).exit_code == 2);
  CHECK(run("automaton validate -", machine).exit_code == 0);
}

TEST_CASE("classify command") {
  auto a = run("classify \"p -> p\"");
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("implicational: yes") != std::string::npos);
  CHECK(a.out.find("order: 1") != std::string::npos);

  auto b = run("classify \"(((p1->p2)->p3)->p4)->p5\"");
  CHECK(b.out.find("order: 4") != std::string::npos);

  auto c = run("classify \"(~p->q)->q\"");
  CHECK(c.out.find("order_two_plus: yes") != std::string::npos);

  CHECK(run("classify \"p -> \"").exit_code == 2);
}

TEST_CASE("lba encode pipes into automaton run") {
  std::string machine =
      "states: q0 qa\ninitial: q0\naccept: qa\nalphabet: a b\nq0,a -> qa,a,S\n";
  auto enc = run("lba encode - --input-word ab --steps-exp 2", machine);
  REQUIRE(enc.exit_code == 0);
  CHECK(run("automaton run -", enc.out).exit_code == 0);
  auto enc2 = run("lba encode - --input-word bb --steps-exp 2", machine);
  CHECK(run("automaton run -", enc2.out).exit_code == 1);
}

TEST_CASE("deterministic output and json envelope") {
  auto a = run("prove \"p \\\\/ ~p\" --refute 3");
  auto b = run("prove \"p \\\\/ ~p\" --refute 3");
  CHECK(a.out == b.out);
  CHECK(a.exit_code == b.exit_code);

  auto r1 = run("reduce \"p \\\\/ q -> q \\\\/ p\" --to automaton");
  auto r2 = run("reduce \"p \\\\/ q -> q \\\\/ p\" --to automaton");
  CHECK(r1.out == r2.out);

  auto j = run("prove \"p -> p\" --term --json");
  CHECK(j.exit_code == 0);
  CHECK(j.out.find("\"command\": \"prove\"") != std::string::npos);
  CHECK(j.out.find("\"result\": \"provable\"") != std::string::npos);
  CHECK(j.out.find("\"witness\"") != std::string::npos);

  auto jc = run("classify \"p -> q\" --json");
  CHECK(jc.out.find("\"t1_minus\": true") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-ipctk>\n");
    return 1;
  }
  g_binary = argv[argc - 1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv);
  return context.run();
}
