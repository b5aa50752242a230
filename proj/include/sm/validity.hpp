#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sm/core.hpp"

namespace sm {

/// Result of simulating a push/pop sequence on an initially empty stack.
struct StackTrace {
    enum class Outcome { valid, illegal_pop, nonempty_final };

    struct Step {
        std::size_t position;  // 1-based index into the checked sequence
        std::vector<Symbol> stack;  // bottom first
    };

    std::vector<Step> steps;
    Outcome outcome = Outcome::valid;
    /// 1-based position of the offending pop when outcome == illegal_pop.
    std::size_t illegal_position = 0;
    /// Stack left over when outcome == nonempty_final.
    std::vector<Symbol> final_stack;

    bool valid() const { return outcome == Outcome::valid; }
};

/// Checks a single-stack sequence. A pop is legal only if the stack is
/// nonempty and its top equals the popped symbol. Steps stop at the first
/// illegal pop. Throws MalformedInput if the tokens mix stack indices.
StackTrace check_valid_single(std::span<const StackOp> ops);

/// Splits pair tokens into their stack-1 and stack-2 sequences (epsilon
/// components dropped) and checks each.
std::pair<StackTrace, StackTrace> check_valid_two(std::span<const PairOp> ops);

/// Fast yes/no forms of the two checks above.
bool is_valid_single(std::span<const StackOp> ops);
bool is_valid_two(std::span<const PairOp> ops);

std::string render(const StackTrace& trace);

// ---------------------------------------------------------------------------
// Grammar of valid strings
// ---------------------------------------------------------------------------

using Nonterminal = std::string;
using GrammarSymbol = std::variant<Nonterminal, StackOp>;

struct Production {
    Nonterminal lhs;
    std::vector<GrammarSymbol> rhs;
};

struct Grammar {
    Nonterminal start;
    std::vector<Production> productions;
};

/// S -> ε | S S | X(↓) S X(↑) for every X in gamma. Throws if gamma is empty.
Grammar valid_string_grammar(const std::set<Symbol>& gamma);

/// Chart recognizer for an arbitrary context-free grammar, including
/// epsilon and left-recursive productions.
bool grammar_derives(const Grammar& g, std::span<const StackOp> word);

/// All valid strings of length <= max_len over Γ(↕). Throws CapExceeded if
/// max_len > cap.
std::set<std::vector<StackOp>> enumerate_valid(const std::set<Symbol>& gamma, std::size_t max_len,
                                               std::size_t cap = 12);

}  // namespace sm
