#include "sm/validity.hpp"

#include <functional>

namespace sm {

namespace {

void require_same_stack(std::span<const StackOp> ops) {
    for (const auto& op : ops)
        if (op.stack != ops.front().stack)
            throw MalformedInput("sequence mixes stack indices " + std::to_string(ops.front().stack) + " and " +
                                 std::to_string(op.stack));
}

}  // namespace

StackTrace check_valid_single(std::span<const StackOp> ops) {
    if (!ops.empty()) require_same_stack(ops);
    StackTrace trace;
    std::vector<Symbol> stack;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto& op = ops[i];
        if (op.is_push()) {
            stack.push_back(op.symbol);
        } else {
            if (stack.empty() || stack.back() != op.symbol) {
                trace.outcome = StackTrace::Outcome::illegal_pop;
                trace.illegal_position = i + 1;
                return trace;
            }
            stack.pop_back();
        }
        trace.steps.push_back({i + 1, stack});
    }
    if (!stack.empty()) {
        trace.outcome = StackTrace::Outcome::nonempty_final;
        trace.final_stack = std::move(stack);
    }
    return trace;
}

std::pair<StackTrace, StackTrace> check_valid_two(std::span<const PairOp> ops) {
    std::vector<StackOp> firsts, seconds;
    for (const auto& p : ops) {
        if (p.first) firsts.push_back(*p.first);
        if (p.second) seconds.push_back(*p.second);
    }
    return {check_valid_single(firsts), check_valid_single(seconds)};
}

bool is_valid_single(std::span<const StackOp> ops) {
    std::vector<const Symbol*> stack;
    for (const auto& op : ops) {
        if (op.is_push()) {
            stack.push_back(&op.symbol);
        } else {
            if (stack.empty() || *stack.back() != op.symbol) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

bool is_valid_two(std::span<const PairOp> ops) {
    std::vector<const Symbol*> s1, s2;
    auto apply = [](std::vector<const Symbol*>& stack, const StackOp& op) {
        if (op.is_push()) {
            stack.push_back(&op.symbol);
            return true;
        }
        if (stack.empty() || *stack.back() != op.symbol) return false;
        stack.pop_back();
        return true;
    };
    for (const auto& p : ops) {
        if (p.first && !apply(s1, *p.first)) return false;
        if (p.second && !apply(s2, *p.second)) return false;
    }
    return s1.empty() && s2.empty();
}

std::string render(const StackTrace& trace) {
    std::string out;
    for (const auto& step : trace.steps) {
        out += std::to_string(step.position) + ": [";
        for (std::size_t k = 0; k < step.stack.size(); ++k) {
            if (k) out += ' ';
            out += step.stack[k];
        }
        out += "]\n";
    }
    switch (trace.outcome) {
    case StackTrace::Outcome::valid:
        out += "valid\n";
        break;
    case StackTrace::Outcome::illegal_pop:
        out += "invalid: illegal pop at position " + std::to_string(trace.illegal_position) + "\n";
        break;
    case StackTrace::Outcome::nonempty_final: {
        out += "invalid: stack not empty at end [";
        for (std::size_t k = 0; k < trace.final_stack.size(); ++k) {
            if (k) out += ' ';
            out += trace.final_stack[k];
        }
        out += "]\n";
        break;
    }
    }
    return out;
}

Grammar valid_string_grammar(const std::set<Symbol>& gamma) {
    if (gamma.empty()) throw ValidationError("valid-string grammar needs a nonempty stack alphabet");
    Grammar g{"S", {}};
    g.productions.push_back({"S", {}});
    g.productions.push_back({"S", {Nonterminal("S"), Nonterminal("S")}});
    for (const auto& x : gamma)
        g.productions.push_back({"S", {StackOp::push(x), Nonterminal("S"), StackOp::pop(x)}});
    return g;
}

bool grammar_derives(const Grammar& g, std::span<const StackOp> word) {
    const std::size_t n = word.size();
    // chart[i][j] holds the nonterminals deriving word[i..j).
    std::vector<std::vector<std::set<Nonterminal>>> chart(n + 1, std::vector<std::set<Nonterminal>>(n + 1));

    // Can rhs[k..] derive word[i..j)? Sub-spans inside the current span are
    // read from the chart, which a per-span fixpoint keeps current.
    std::function<bool(const std::vector<GrammarSymbol>&, std::size_t, std::size_t, std::size_t)> match =
        [&](const std::vector<GrammarSymbol>& rhs, std::size_t k, std::size_t i, std::size_t j) -> bool {
        if (k == rhs.size()) return i == j;
        if (const auto* op = std::get_if<StackOp>(&rhs[k]))
            return i < j && word[i] == *op && match(rhs, k + 1, i + 1, j);
        const auto& nt = std::get<Nonterminal>(rhs[k]);
        for (std::size_t m = i; m <= j; ++m)
            if (chart[i][m].contains(nt) && match(rhs, k + 1, m, j)) return true;
        return false;
    };

    for (std::size_t len = 0; len <= n; ++len) {
        for (std::size_t i = 0; i + len <= n; ++i) {
            std::size_t j = i + len;
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& p : g.productions) {
                    if (chart[i][j].contains(p.lhs)) continue;
                    if (match(p.rhs, 0, i, j)) {
                        chart[i][j].insert(p.lhs);
                        changed = true;
                    }
                }
            }
        }
    }
    return chart[0][n].contains(g.start);
}

std::set<std::vector<StackOp>> enumerate_valid(const std::set<Symbol>& gamma, std::size_t max_len, std::size_t cap) {
    if (max_len > cap)
        throw CapExceeded("enumerate_valid: max length " + std::to_string(max_len) + " exceeds cap " +
                          std::to_string(cap));
    std::set<std::vector<StackOp>> out;
    std::vector<StackOp> current;
    std::vector<Symbol> stack;
    std::function<void()> extend = [&] {
        if (stack.empty()) out.insert(current);
        std::size_t remaining = max_len - current.size();
        if (remaining == 0) return;
        if (!stack.empty()) {
            Symbol top = stack.back();
            current.push_back(StackOp::pop(top));
            stack.pop_back();
            extend();
            stack.push_back(top);
            current.pop_back();
        }
        // a push must still be matched by a pop within the budget
        if (stack.size() + 2 <= remaining) {
            for (const auto& x : gamma) {
                current.push_back(StackOp::push(x));
                stack.push_back(x);
                extend();
                stack.pop_back();
                current.pop_back();
            }
        }
    };
    extend();
    return out;
}

}  // namespace sm
