#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "sm/core.hpp"

namespace sm {

enum class Verdict { accepted, rejected, inconclusive };

std::string to_string(Verdict v);

struct RunOutcome {
    Verdict verdict = Verdict::rejected;
    AnnotationString witness;  // set only when accepted
    std::size_t states_visited = 0;
};

// ---------------------------------------------------------------------------
// Two-stack machines
// ---------------------------------------------------------------------------

/// Runs δ* along `s` and applies the three acceptance conditions; the input
/// read is project_input(s). Throws MalformedInput on a token outside the
/// machine's annotation alphabet.
RunOutcome run_annotation_two_stack(const TwoStackMachine& m, const AnnotationString& s);

struct SearchBounds {
    std::size_t max_steps = 100000;
    std::size_t max_depth = 16;
};

/// Breadth-first search over (state, stack 1, stack 2, position).
/// Inconclusive when the step budget runs out or a move was cut by the depth
/// bound; rejected only when the whole bounded space was explored.
RunOutcome accepts_two_stack_bounded(const TwoStackMachine& m, const Word& x, SearchBounds bounds = {});

// ---------------------------------------------------------------------------
// PDA-II / DPDA-II
// ---------------------------------------------------------------------------

/// Entries (p, i, q, j): from p at input position i the machine reaches q at
/// position j along a segment whose stack projection is balanced.
class BalancedReachabilityTable {
public:
    BalancedReachabilityTable();
    BalancedReachabilityTable(BalancedReachabilityTable&&) noexcept;
    BalancedReachabilityTable& operator=(BalancedReachabilityTable&&) noexcept;
    ~BalancedReachabilityTable();

    bool contains(const State& p, std::size_t i, const State& q, std::size_t j) const;
    std::size_t size() const;

    /// Witness segment for a present entry; nullopt when absent.
    std::optional<AnnotationString> segment(const State& p, std::size_t i, const State& q, std::size_t j) const;

    struct Impl;

private:
    explicit BalancedReachabilityTable(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;

    friend BalancedReachabilityTable build_reachability_table(const PdaII&, const Word&);
    friend std::pair<bool, std::optional<AnnotationString>> accepts_pda2(const PdaII&, const Word&);
};

/// Full table: every (p, i) is a segment start.
BalancedReachabilityTable build_reachability_table(const PdaII& m, const Word& x);

/// Exact membership. The witness, when present, satisfies all three
/// acceptance conditions; epsilon moves appear in it as `_` tokens.
std::pair<bool, std::optional<AnnotationString>> accepts_pda2(const PdaII& m, const Word& x);

bool accepts_dpda2(const DpdaII& m, const Word& x);

/// Checks the acceptance conditions for a PDA-II witness. Tokens are applied
/// literally, so an `_` token follows δ(q, ε).
bool check_pda2_witness(const PdaII& m, const Word& x, const AnnotationString& s);

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Searches annotation strings of length <= max_annot_len whose input
/// projection is x and whose stack projection is valid. True means accepted;
/// false only means no short witness exists. Throws CapExceeded above cap.
bool brute_force_accepts(const PdaII& m, const Word& x, std::size_t max_annot_len, std::size_t cap = 14);
bool brute_force_accepts(const TwoStackMachine& m, const Word& x, std::size_t max_annot_len, std::size_t cap = 14);

/// Throws MalformedInput if some symbol of x is not in sigma.
void require_word(const Word& x, const std::set<Symbol>& sigma);

}  // namespace sm
