#pragma once

#include <map>
#include <set>
#include <variant>

#include "sm/core.hpp"

namespace sm {

/// Smallest superset of `states` closed under epsilon moves.
std::set<State> eps_closure(const PdaII& m, const std::set<State>& states);

struct Determinized {
    DpdaII machine;
    /// Source states making up each output state.
    std::map<State, std::set<State>> members;
};

/// Subset construction over Σ ∪ Γ(↕) treated as one alphabet. Only reachable
/// nonempty subsets are built; a missing transition stands for the empty set.
Determinized subset_construct(const PdaII& m);

/// Output state name for a subset: members joined by '|' inside brackets.
std::string subset_name(const std::set<State>& members);

/// Finite-automaton acceptance over the extended alphabet (stack validity is
/// not checked). Tokens must be input symbols or untagged stack operations.
bool accepts_extended(const PdaII& m, const AnnotationString& w);
bool accepts_extended(const DpdaII& m, const AnnotationString& w);

/// Σ-projections of all w over Σ ∪ Γ(↕), |w| <= max_ext_len, that the machine
/// accepts as a finite automaton and whose stack projection is valid.
/// Throws CapExceeded if max_ext_len > cap.
std::set<Word> corollary1_language(const PdaII& m, std::size_t max_ext_len, std::size_t cap = 10);
std::set<Word> corollary1_language(const DpdaII& m, std::size_t max_ext_len, std::size_t cap = 10);

}  // namespace sm
