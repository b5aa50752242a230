#include "sm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sm/convert.hpp"
#include "sm/determinize.hpp"
#include "sm/machine_file.hpp"
#include "sm/quantum.hpp"
#include "sm/recognition.hpp"
#include "sm/validity.hpp"

namespace sm {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<std::string> ops;
    std::string machine;
    std::string x;
    std::string output;
    std::string to;
    std::size_t max_steps = 100000;
    std::size_t max_depth = 16;
    std::size_t max_len = 8;
    std::size_t max_input_len = 4;
    std::size_t max_annot_len = 10;
    bool witness = false;
    double tol = kDefaultTolerance;
};

std::string show(const Word& w) {
    if (w.empty()) return "_";
    bool single = std::all_of(w.begin(), w.end(), [](const Symbol& a) { return a.size() == 1; });
    if (single) return to_string(w);
    std::string out;
    for (const auto& a : w) out += (out.empty() ? "" : " ") + a;
    return out;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

int cmd_check_valid(const Options& o, std::ostream& out) {
    std::string text;
    for (const auto& s : o.ops) text += s + " ";
    AnnotationString tokens = parse_annotation(text);
    std::vector<StackOp> singles;
    std::vector<PairOp> pairs;
    for (const auto& t : tokens) {
        if (const auto* op = std::get_if<StackOp>(&t)) singles.push_back(*op);
        else if (const auto* p = std::get_if<PairOp>(&t)) pairs.push_back(*p);
        else throw MalformedInput("'" + to_string(t) + "' is not a stack operation");
    }
    if (!singles.empty() && !pairs.empty()) throw MalformedInput("cannot mix single and pair stack operations");
    if (pairs.empty()) {
        auto trace = check_valid_single(singles);
        out << render(trace);
        return trace.valid() ? kExitAccepted : kExitRejected;
    }
    auto [first, second] = check_valid_two(pairs);
    out << "stack 1:\n" << render(first) << "stack 2:\n" << render(second);
    return first.valid() && second.valid() ? kExitAccepted : kExitRejected;
}

int report(const RunOutcome& r, bool witness, std::ostream& out) {
    out << to_string(r.verdict) << '\n';
    if (witness && r.verdict == Verdict::accepted) out << "witness: " << to_string(r.witness) << '\n';
    switch (r.verdict) {
    case Verdict::accepted: return kExitAccepted;
    case Verdict::rejected: return kExitRejected;
    case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitUsage;
}

RunOutcome run_pda2(const PdaII& m, const std::string& x) {
    auto [ok, witness] = accepts_pda2(m, split_input(x, m.input));
    RunOutcome r;
    r.verdict = ok ? Verdict::accepted : Verdict::rejected;
    if (witness) r.witness = *witness;
    return r;
}

int cmd_accept(const Options& o, std::ostream& out) {
    AnyMachine machine = load_machine(o.machine, o.tol);
    if (auto* m = std::get_if<TwoStackMachine>(&machine)) {
        auto r = accepts_two_stack_bounded(*m, split_input(o.x, m->alphabets.input), {o.max_steps, o.max_depth});
        return report(r, o.witness, out);
    }
    if (auto* m = std::get_if<PdaI>(&machine)) return report(run_pda2(pda1_to_pda2(*m), o.x), o.witness, out);
    if (auto* m = std::get_if<PdaII>(&machine)) return report(run_pda2(*m, o.x), o.witness, out);
    if (auto* m = std::get_if<DpdaII>(&machine)) return report(run_pda2(embed_dpda2(*m), o.x), o.witness, out);
    throw UsageError("accept does not apply to quantum machines; use qprob");
}

int cmd_convert(const Options& o, std::ostream& out) {
    AnyMachine machine = load_machine(o.machine, o.tol);
    AnyMachine result;
    if (o.to == "pda2") {
        if (const auto* m = std::get_if<PdaI>(&machine)) result = pda1_to_pda2(*m);
        else throw UsageError("convert --to pda2 needs a pda1 machine, got " + kind_name(machine));
    } else if (o.to == "pda1") {
        if (const auto* m = std::get_if<PdaII>(&machine)) result = pda2_to_pda1(*m);
        else if (const auto* d = std::get_if<DpdaII>(&machine)) result = pda2_to_pda1(embed_dpda2(*d));
        else throw UsageError("convert --to pda1 needs a pda2 or dpda2 machine, got " + kind_name(machine));
    } else {
        throw UsageError("convert --to must be pda1 or pda2");
    }
    write_or_print(o.output, serialize_machine(result), out);
    return kExitAccepted;
}

int cmd_determinize(const Options& o, std::ostream& out) {
    AnyMachine machine = load_machine(o.machine, o.tol);
    PdaII source;
    if (const auto* m = std::get_if<PdaII>(&machine)) source = *m;
    else if (const auto* d = std::get_if<DpdaII>(&machine)) source = embed_dpda2(*d);
    else throw UsageError("determinize needs a pda2 or dpda2 machine, got " + kind_name(machine));
    write_or_print(o.output, serialize_machine(subset_construct(source).machine), out);
    return kExitAccepted;
}

int cmd_qprob(const Options& o, std::ostream& out) {
    AnyMachine machine = load_machine(o.machine, o.tol);
    const auto* m = std::get_if<QuantumMachine>(&machine);
    if (!m) throw UsageError("qprob needs a qpda2 or q2sm machine, got " + kind_name(machine));
    double p = accept_prob_bounded(*m, split_input(o.x, m->alphabets.input), o.max_len);
    out << std::setprecision(17) << p << '\n';
    return kExitAccepted;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    AnyMachine machine = load_machine(o.machine, o.tol);
    std::function<bool(const Word&)> accepts;
    std::set<Symbol> sigma;
    std::optional<PdaII> pda;
    if (const auto* m = std::get_if<TwoStackMachine>(&machine)) {
        sigma = m->alphabets.input;
        accepts = [&, m](const Word& x) { return brute_force_accepts(*m, x, o.max_annot_len); };
    } else {
        if (const auto* p1 = std::get_if<PdaI>(&machine)) pda = pda1_to_pda2(*p1);
        else if (const auto* p2 = std::get_if<PdaII>(&machine)) pda = *p2;
        else if (const auto* d = std::get_if<DpdaII>(&machine)) pda = embed_dpda2(*d);
        else throw UsageError("oracle does not apply to quantum machines");
        sigma = pda->input;
        accepts = [&](const Word& x) { return brute_force_accepts(*pda, x, o.max_annot_len); };
    }
    const std::vector<Symbol> symbols(sigma.begin(), sigma.end());
    std::vector<Word> layer{Word{}};
    for (std::size_t len = 0; len <= o.max_input_len; ++len) {
        std::vector<Word> next;
        for (const auto& w : layer) {
            if (accepts(w)) out << show(w) << '\n';
            if (len == o.max_input_len) continue;
            for (const auto& a : symbols) {
                Word v = w;
                v.push_back(a);
                next.push_back(std::move(v));
            }
        }
        layer = std::move(next);
    }
    return kExitAccepted;
}

int cmd_export_dot(const Options& o, std::ostream& out) {
    write_or_print(o.output, export_dot(load_machine(o.machine, o.tol)), out);
    return kExitAccepted;
}

}  // namespace

int run_smctl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stack machine workbench", "smctl"};
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check-valid", "Check a push/pop sequence for validity");
    check->add_option("ops", o.ops, "Operations such as push1:X pop1:X or (push1:X,pop2:Y)");

    auto machine_option = [&](CLI::App* sub) { sub->add_option("-m", o.machine, "Machine file")->required(); };
    auto tol_option = [&](CLI::App* sub) { sub->add_option("--tol", o.tol, "Unitarity tolerance"); };

    auto* accept = app.add_subcommand("accept", "Decide membership of an input string");
    machine_option(accept);
    accept->add_option("-x", o.x, "Input string");
    accept->add_option("--max-steps", o.max_steps, "Two-stack search expansions");
    accept->add_option("--max-depth", o.max_depth, "Two-stack stack depth bound");
    accept->add_flag("--witness", o.witness, "Print the annotation string");
    tol_option(accept);

    auto* convert = app.add_subcommand("convert", "Convert between pda1 and pda2");
    machine_option(convert);
    convert->add_option("--to", o.to, "Target kind (pda1 or pda2)")->required();
    convert->add_option("-o", o.output, "Output file");

    auto* determinize = app.add_subcommand("determinize", "Subset construction to dpda2");
    machine_option(determinize);
    determinize->add_option("-o", o.output, "Output file");

    auto* qprob = app.add_subcommand("qprob", "Bounded acceptance probability of a quantum machine");
    machine_option(qprob);
    qprob->add_option("-x", o.x, "Input string");
    qprob->add_option("--max-len", o.max_len, "Annotation length bound");
    tol_option(qprob);

    auto* oracle = app.add_subcommand("oracle", "List accepted strings by brute force");
    machine_option(oracle);
    oracle->add_option("--max-input-len", o.max_input_len, "Longest input string");
    oracle->add_option("--max-annot-len", o.max_annot_len, "Longest annotation string");

    auto* dot = app.add_subcommand("export-dot", "Write the transition diagram as DOT");
    machine_option(dot);
    dot->add_option("-o", o.output, "Output file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitAccepted : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check_valid(o, out);
        if (accept->parsed()) return cmd_accept(o, out);
        if (convert->parsed()) return cmd_convert(o, out);
        if (determinize->parsed()) return cmd_determinize(o, out);
        if (qprob->parsed()) return cmd_qprob(o, out);
        if (oracle->parsed()) return cmd_oracle(o, out);
        if (dot->parsed()) return cmd_export_dot(o, out);
    } catch (const ParseError& e) {
        err << o.machine << ":" << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace sm
