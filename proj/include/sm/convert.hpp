#pragma once

#include <optional>

#include "sm/core.hpp"

namespace sm {

/// PDA-I -> PDA-II. A fresh initial state pushes the bottom symbol; each
/// PDA-I transition (q, a, X) -> (p, X1..Xn) becomes the chain
///   q -a-> aux0 -X(↑)-> aux1 -Xn(↓)-> ... -X2(↓)-> auxn -X1(↓)-> p
/// over auxiliary states private to that transition (for n = 0 the pop edge
/// ends at p). Accepting states move by epsilon into a fresh drain state that
/// may pop any symbol; the drain is the only accepting state.
PdaII pda1_to_pda2(const PdaI& m);

/// PDA-II -> PDA-I over Γ ∪ {sentinel}. Input and epsilon moves keep the top;
/// pops become epsilon pops; pushes are allowed on any top including the
/// sentinel. A fresh accepting state is entered by epsilon only with the bare
/// sentinel on the stack. With no sentinel given, a fresh name based on "Z0"
/// is chosen; a given sentinel that is already in Γ is an error.
PdaI pda2_to_pda1(const PdaII& m, const std::optional<Symbol>& sentinel = std::nullopt);

}  // namespace sm
