#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "sm/core.hpp"

namespace sm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTolerance = 1e-9;

enum class QuantumFlavor { single_stack, two_stack };

/// QPDA-II (single_stack) or Q2SM-II (two_stack). Basis vector k of the state
/// space is states[k].
struct QuantumMachine {
    std::vector<State> states;
    Alphabets alphabets;
    std::map<Token, Matrix> unitaries;
    State initial;
    std::set<State> accepting;
    QuantumFlavor flavor = QuantumFlavor::single_stack;

    std::size_t dimension() const { return states.size(); }
    std::size_t index_of(const State& q) const;

    friend bool operator==(const QuantumMachine& a, const QuantumMachine& b);
};

/// Tokens that must carry a unitary: Σ ∪ Γ(↕) for single_stack,
/// Σ ∪ Γ_{1,2}(↕) ∪ Δ for two_stack.
std::vector<Token> quantum_tokens(QuantumFlavor flavor, const Alphabets& a);

/// max |(U†U - I)_ij| <= tol. Throws std::invalid_argument if U is not square.
bool check_unitary(const Matrix& u, double tol = kDefaultTolerance);
double unitarity_residual(const Matrix& u);

/// Checks states, accepting set, token coverage, matrix shapes and unitarity.
ValidationReport validate_machine(const QuantumMachine& m, double tol = kDefaultTolerance);

/// U_{a_k} ... U_{a_1} |q0>. Throws MalformedInput for tokens without a matrix.
Vector evolve(const QuantumMachine& m, const AnnotationString& s);

/// Σ_{q∈F} |<q|v>|².
double accepting_probability(const QuantumMachine& m, const Vector& v);

/// Maximum accepting probability over annotation strings of length
/// <= max_annot_len whose input projection is x and whose stack projection is
/// valid; 0 if there are none. Throws CapExceeded above cap and MalformedInput
/// if x is not over Σ.
double accept_prob_bounded(const QuantumMachine& m, const Word& x, std::size_t max_annot_len, std::size_t cap = 12);

/// Identity matrices for every token of the flavor's alphabet that has none.
void fill_identity(QuantumMachine& m);

}  // namespace sm
