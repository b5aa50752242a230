#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "sm/core.hpp"
#include "sm/quantum.hpp"

namespace sm {

using AnyMachine = std::variant<TwoStackMachine, PdaI, PdaII, DpdaII, QuantumMachine>;

/// Header keyword: twostack, pda1, pda2, dpda2, qpda2 or q2sm.
std::string kind_name(const AnyMachine& m);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// Parses a `.sm` machine description. The result passes validate_machine.
/// Quantum tokens without a `matrix` block get the identity.
AnyMachine parse_machine(std::string_view text, double tol = kDefaultTolerance);

/// Canonical text; parse_machine(serialize_machine(m)) == m.
std::string serialize_machine(const AnyMachine& m);

AnyMachine load_machine(const std::string& path, double tol = kDefaultTolerance);
void save_machine(const std::string& path, const AnyMachine& m);

/// Complex literal `a`, `a+bi`, `a-bi` or `bi`. Throws MalformedInput.
Complex parse_complex(std::string_view text);
/// Shortest text that parses back to exactly `z`.
std::string format_complex(Complex z);

/// DOT digraph: one node statement per state (accepting ones as double
/// circles), an entry arrow into the initial state, one edge per transition
/// entry. Quantum machines get one edge per nonzero matrix entry.
std::string export_dot(const AnyMachine& m);

}  // namespace sm
