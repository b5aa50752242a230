#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sm/cli.hpp"
#include "sm/determinize.hpp"
#include "sm/machine_file.hpp"
#include "sm/recognition.hpp"
#include "support.hpp"

using namespace sm;
using sm::test::fixture_path;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run smctl(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_smctl(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text = "") {
    auto path = (std::filesystem::temp_directory_path() / ("smctl_test_" + name)).string();
    if (!text.empty()) std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("check-valid") {
    auto good = smctl({"check-valid", "push1:X", "push1:Y", "push1:X", "pop1:X", "pop1:Y", "pop1:X"});
    CHECK(good.code == 0);
    CHECK(good.out.find("valid") != std::string::npos);

    auto bad = smctl({"check-valid", "push1:X", "push1:Y", "push1:X", "pop1:Y", "pop1:Y", "pop1:X"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("position 4") != std::string::npos);

    CHECK(smctl({"check-valid"}).code == 0);
    CHECK(smctl({"check-valid", "(push1:X,push2:Y)", "(pop1:X,pop2:Y)"}).code == 0);
    CHECK(smctl({"check-valid", "(push1:X,push2:Y)", "(pop1:X,_)"}).code == 1);
    CHECK(smctl({"check-valid", "push1:X", "pop2:X"}).code == 2);
    CHECK(smctl({"check-valid", "push1:X", "(pop1:X,_)"}).code == 2);
    CHECK(smctl({"check-valid", "pusj:X"}).code == 2);
    CHECK(smctl({"check-valid", "0"}).code == 2);
}

TEST_CASE("accept exit codes") {
    CHECK(smctl({"accept", "-m", fixture_path("leq.sm"), "-x", "000111222", "--max-steps", "5000", "--max-depth",
                 "12"})
              .code == 0);
    CHECK(smctl({"accept", "-m", fixture_path("lwwr.sm"), "-x", "010"}).code == 1);
    CHECK(smctl({"accept", "-m", fixture_path("leq.sm"), "-x", "012012", "--max-steps", "10"}).code == 3);
    CHECK(smctl({"accept", "-m", fixture_path("lwwr.sm"), "-x", "012"}).code == 2);
    CHECK(smctl({"accept", "-m", fixture_path("missing.sm"), "-x", "0"}).code == 2);
    CHECK(smctl({"accept", "-m", fixture_path("rot.sm"), "-x", "0"}).code == 2);
    CHECK(smctl({"accept", "-x", "0"}).code == 2);
    CHECK(smctl({"accept", "-m", fixture_path("lwwr.sm"), "--max-steps", "many"}).code == 2);
    CHECK(smctl({"frobnicate"}).code == 2);
    CHECK(smctl({}).code == 2);
    CHECK(smctl({"--help"}).code == 0);

    auto empty = smctl({"accept", "-m", fixture_path("lwwr.sm")});
    CHECK(empty.code == 0);
    CHECK(empty.out == "accepted\n");
}

TEST_CASE("accept prints a witness") {
    auto r = smctl({"accept", "-m", fixture_path("lwwr.sm"), "-x", "0110", "--witness"});
    CHECK(r.code == 0);
    auto pos = r.out.find("witness: ");
    REQUIRE(pos != std::string::npos);
    auto line = r.out.substr(pos + 9);
    line.pop_back();
    auto m = std::get<PdaII>(load_machine(fixture_path("lwwr.sm")));
    CHECK(check_pda2_witness(m, sm::test::word("0110"), parse_annotation(line)));

    auto two = smctl({"accept", "-m", fixture_path("lw.sm"), "-x", "10#10", "--witness"});
    CHECK(two.code == 0);
    auto lw = std::get<TwoStackMachine>(load_machine(fixture_path("lw.sm")));
    auto wline = two.out.substr(two.out.find("witness: ") + 9);
    wline.pop_back();
    CHECK(run_annotation_two_stack(lw, parse_annotation(wline)).verdict == Verdict::accepted);
}

TEST_CASE("malformed machine file reports its line") {
    auto path = temp_file("bad.sm", "machine pda2\nstates q0\ninput 0\nstack Z\ninitial q0\naccept qx\n");
    auto r = smctl({"accept", "-m", path, "-x", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 6") != std::string::npos);
    CHECK(r.err.find("qx") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("convert then accept agrees with the source") {
    auto p1 = temp_file("p1.sm", "machine pda1\nstates p q f\ninput 0 1\nstack Z A\ninitial p\naccept f\nbottom Z\n"
                                 "trans\np 0 Z -> p A Z\np 0 A -> p A A\np _ Z -> f Z\np 1 A -> q\nq 1 A -> q\n"
                                 "q _ Z -> f Z\n");
    auto p2 = temp_file("p2.sm");
    CHECK(smctl({"convert", "--to", "pda2", "-m", p1, "-o", p2}).code == 0);
    auto source = std::get<PdaI>(load_machine(p1));
    for (const auto& x : sm::test::all_words({"0", "1"}, 6)) {
        std::string text = to_string(x);
        int expected = sm::test::pda1_accepts_summary(source, x) ? 0 : 1;
        CHECK(smctl({"accept", "-m", p2, "-x", text}).code == expected);
        CHECK(smctl({"accept", "-m", p1, "-x", text}).code == expected);
    }
    auto back = temp_file("back.sm");
    CHECK(smctl({"convert", "--to", "pda1", "-m", fixture_path("lwwr.sm"), "-o", back}).code == 0);
    CHECK(std::holds_alternative<PdaI>(load_machine(back)));
    CHECK(smctl({"convert", "--to", "pda1", "-m", fixture_path("leq.sm")}).code == 2);
    CHECK(smctl({"convert", "--to", "pda3", "-m", fixture_path("lwwr.sm")}).code == 2);
    CHECK(smctl({"convert", "-m", fixture_path("lwwr.sm")}).code == 2);
    for (const auto& p : {p1, p2, back}) std::filesystem::remove(p);
}

TEST_CASE("determinize then accept gives identical verdicts") {
    auto d = temp_file("d.sm");
    CHECK(smctl({"determinize", "-m", fixture_path("lwwr.sm"), "-o", d}).code == 0);
    CHECK(std::holds_alternative<DpdaII>(load_machine(d)));
    for (const auto& x : sm::test::all_words({"0", "1"}, 6)) {
        std::string text = to_string(x);
        CHECK(smctl({"accept", "-m", d, "-x", text}).code == smctl({"accept", "-m", fixture_path("lwwr.sm"), "-x", text}).code);
    }
    CHECK(smctl({"determinize", "-m", fixture_path("leq.sm")}).code == 2);
    auto printed = smctl({"determinize", "-m", fixture_path("lwwr.sm")});
    CHECK(printed.code == 0);
    CHECK(printed.out.rfind("machine dpda2", 0) == 0);
    std::filesystem::remove(d);
}

TEST_CASE("qprob") {
    auto r = smctl({"qprob", "-m", fixture_path("rot.sm"), "-x", "0", "--max-len", "6"});
    CHECK(r.code == 0);
    double expected = std::pow(std::sin(std::numbers::pi / 6), 2);
    CHECK(std::abs(std::stod(r.out) - expected) <= 1e-9);
    CHECK(smctl({"qprob", "-m", fixture_path("lwwr.sm"), "-x", "0"}).code == 2);
    CHECK(smctl({"qprob", "-m", fixture_path("rot.sm"), "-x", "0", "--max-len", "40"}).code == 2);
    CHECK(smctl({"qprob", "-m", fixture_path("rot.sm"), "-x", "0", "--tol", "x"}).code == 2);
}

TEST_CASE("oracle lists the accepted strings") {
    auto r = smctl({"oracle", "-m", fixture_path("lwwr.sm"), "--max-input-len", "4", "--max-annot-len", "14"});
    CHECK(r.code == 0);
    CHECK(r.out == "_\n00\n11\n0000\n0110\n1001\n1111\n");
    auto small = smctl({"oracle", "-m", fixture_path("lwwr.sm"), "--max-input-len", "2", "--max-annot-len", "6"});
    CHECK(small.out == "_\n");
    CHECK(smctl({"oracle", "-m", fixture_path("lwwr.sm"), "--max-annot-len", "20"}).code == 2);
    auto two = smctl({"oracle", "-m", fixture_path("lw.sm"), "--max-input-len", "3", "--max-annot-len", "10"});
    CHECK(two.out == "#\n0#0\n1#1\n");
}

TEST_CASE("export-dot") {
    auto r = smctl({"export-dot", "-m", fixture_path("lwwr.sm")});
    CHECK(r.code == 0);
    auto summary = sm::test::check_dot(r.out);
    CHECK(summary.ok);
    CHECK(summary.node_statements == 8);
    CHECK(summary.edge_statements == 12);
    auto path = temp_file("g.dot");
    CHECK(smctl({"export-dot", "-m", fixture_path("leq.sm"), "-o", path}).code == 0);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(sm::test::check_dot(text.str()).ok);
    std::filesystem::remove(path);
}
