#pragma once

// Shared fixtures, generators and independent oracles for the test suites.

#include <random>
#include <string>
#include <vector>

#include "sm/core.hpp"
#include "sm/machine_file.hpp"
#include "sm/quantum.hpp"

namespace sm::test {

std::string fixture_path(const std::string& name);

template <typename M>
M load_fixture(const std::string& name) {
    return std::get<M>(load_machine(fixture_path(name)));
}

/// All words over `sigma` of length <= max_len, shortest first.
std::vector<Word> all_words(const std::vector<Symbol>& sigma, std::size_t max_len);
Word word(const std::string& chars);

bool is_leq(const Word& x);   // 0^n 1^n 2^n
bool is_lw(const Word& x);    // w#w over {0,1}
bool is_wwr(const Word& x);   // w w^R over {0,1}

std::uint64_t catalan(unsigned n);

// ---------------------------------------------------------------------------
// Random machines
// ---------------------------------------------------------------------------

struct RandomPdaShape {
    int max_states = 4;
    int max_stack = 2;
    int max_transitions = 6;
    int max_push = 2;
};

PdaI random_pda1(std::mt19937& rng, RandomPdaShape shape = {});
PdaII random_pda2(std::mt19937& rng, int max_states = 4, int max_stack = 2, int max_edges = 8);
TwoStackMachine random_two_stack(std::mt19937& rng);
Matrix random_unitary(std::mt19937& rng, int dim);
QuantumMachine random_quantum(std::mt19937& rng, QuantumFlavor flavor, int dim, bool with_stack = true);
AnnotationString random_annotation(std::mt19937& rng, const std::vector<Token>& tokens, std::size_t max_len);

// ---------------------------------------------------------------------------
// PDA-I oracles (classical final-state acceptance)
// ---------------------------------------------------------------------------

/// Exact decision by pop-summary saturation over (state, position, top).
bool pda1_accepts_summary(const PdaI& m, const Word& x);

enum class SearchResult { accepted, rejected, unknown };

/// Configuration search over (state, position, stack) with stack height at
/// most max_depth and at most max_steps expansions.
SearchResult pda1_accepts_search(const PdaI& m, const Word& x, std::size_t max_depth, std::size_t max_steps);

/// Search with the depth bound doubled until two consecutive bounds agree.
bool pda1_accepts_stable(const PdaI& m, const Word& x);

// ---------------------------------------------------------------------------
// Extended-alphabet comparison and DOT checking
// ---------------------------------------------------------------------------

/// Number of strings over Σ ∪ Γ(↕) of length <= max_len on which the ε-NFA
/// reading of `nfa` and the DFA reading of `dfa` disagree. `checked` receives
/// the number of strings compared.
std::size_t extended_disagreements(const PdaII& nfa, const DpdaII& dfa, std::size_t max_len,
                                   std::size_t* checked = nullptr);

struct DotSummary {
    bool ok = false;
    std::string error;
    std::size_t node_statements = 0;
    std::size_t edge_statements = 0;
};

/// Recursive-descent check of the DOT language (graph, statements,
/// attribute lists, quoted and plain IDs).
DotSummary check_dot(const std::string& text);

}  // namespace sm::test
