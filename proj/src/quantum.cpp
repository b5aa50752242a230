#include "sm/quantum.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "sm/recognition.hpp"

namespace sm {

std::size_t QuantumMachine::index_of(const State& q) const {
    auto it = std::find(states.begin(), states.end(), q);
    if (it == states.end()) throw MalformedInput("unknown state '" + q + "'");
    return static_cast<std::size_t>(it - states.begin());
}

bool operator==(const QuantumMachine& a, const QuantumMachine& b) {
    if (a.states != b.states || a.alphabets != b.alphabets || a.initial != b.initial ||
        a.accepting != b.accepting || a.flavor != b.flavor || a.unitaries.size() != b.unitaries.size())
        return false;
    for (auto ia = a.unitaries.begin(), ib = b.unitaries.begin(); ia != a.unitaries.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (ia->second.rows() != ib->second.rows() || ia->second.cols() != ib->second.cols()) return false;
        if (!(ia->second.array() == ib->second.array()).all()) return false;
    }
    return true;
}

std::vector<Token> quantum_tokens(QuantumFlavor flavor, const Alphabets& a) {
    if (flavor == QuantumFlavor::single_stack) return extended_tokens(a.input, a.stack);
    return two_stack_tokens(a);
}

double unitarity_residual(const Matrix& u) {
    if (u.rows() != u.cols())
        throw std::invalid_argument("matrix is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                                    ", not square");
    Matrix r = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    return u.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

bool check_unitary(const Matrix& u, double tol) { return unitarity_residual(u) <= tol; }

ValidationReport validate_machine(const QuantumMachine& m, double tol) {
    ValidationReport report;
    auto add = [&](std::string where, std::string what) { report.push_back({std::move(where), std::move(what)}); };
    std::set<State> seen;
    if (m.states.empty()) add("states", "no states declared");
    for (const auto& q : m.states) {
        if (!is_valid_name(q)) add("states", "invalid name '" + q + "'");
        if (!seen.insert(q).second) add("states", "state '" + q + "' declared twice");
    }
    if (!seen.contains(m.initial)) add("initial", "state '" + m.initial + "' is not declared");
    for (const auto& f : m.accepting)
        if (!seen.contains(f)) add("accept", "state '" + f + "' is not declared");
    const auto& a = m.alphabets;
    if (a.input.empty()) add("input", "input alphabet is empty");
    for (const auto* set : {&a.input, &a.stack, &a.tape})
        for (const auto& s : *set)
            if (!is_valid_name(s)) add("alphabets", "invalid name '" + s + "'");
    for (const auto& s : a.input)
        if (a.stack.contains(s) || a.tape.contains(s)) add("alphabets", "symbol '" + s + "' is in two alphabets");
    for (const auto& s : a.stack)
        if (a.tape.contains(s)) add("alphabets", "symbol '" + s + "' is in two alphabets");
    if (m.flavor == QuantumFlavor::single_stack && !a.tape.empty())
        add("tape", "single-stack quantum machines have no tape symbols");

    const auto tokens = quantum_tokens(m.flavor, a);
    const std::set<Token> expected(tokens.begin(), tokens.end());
    for (const auto& t : expected)
        if (!m.unitaries.contains(t)) add("matrix " + to_string(t), "missing unitary");
    const auto dim = static_cast<Eigen::Index>(m.states.size());
    for (const auto& [t, u] : m.unitaries) {
        std::string where = "matrix " + to_string(t);
        if (!expected.contains(t)) add(where, "token is not in the machine's alphabet");
        if (u.rows() != dim || u.cols() != dim) {
            add(where, "expected " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
            continue;
        }
        double r = unitarity_residual(u);
        if (r > tol) add(where, "not unitary (residual " + std::to_string(r) + ")");
    }
    return report;
}

void fill_identity(QuantumMachine& m) {
    const auto dim = static_cast<Eigen::Index>(m.states.size());
    for (const auto& t : quantum_tokens(m.flavor, m.alphabets))
        if (!m.unitaries.contains(t)) m.unitaries.emplace(t, Matrix::Identity(dim, dim));
}

Vector evolve(const QuantumMachine& m, const AnnotationString& s) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(m.dimension()));
    v(static_cast<Eigen::Index>(m.index_of(m.initial))) = 1.0;
    for (const auto& t : s) {
        auto it = m.unitaries.find(t);
        if (it == m.unitaries.end()) throw MalformedInput("no unitary for token '" + to_string(t) + "'");
        v = it->second * v;
    }
    return v;
}

double accepting_probability(const QuantumMachine& m, const Vector& v) {
    double p = 0.0;
    for (const auto& f : m.accepting) p += std::norm(v(static_cast<Eigen::Index>(m.index_of(f))));
    return p;
}

double accept_prob_bounded(const QuantumMachine& m, const Word& x, std::size_t max_annot_len, std::size_t cap) {
    if (max_annot_len > cap)
        throw CapExceeded("accept_prob_bounded: annotation length " + std::to_string(max_annot_len) +
                          " exceeds cap " + std::to_string(cap));
    require_word(x, m.alphabets.input);
    auto matrix = [&](const Token& t) -> const Matrix& {
        auto it = m.unitaries.find(t);
        if (it == m.unitaries.end()) throw MalformedInput("no unitary for token '" + to_string(t) + "'");
        return it->second;
    };
    const std::vector<Symbol> gamma(m.alphabets.stack.begin(), m.alphabets.stack.end());
    const std::size_t n = x.size();
    double best = 0.0;

    Vector start = Vector::Zero(static_cast<Eigen::Index>(m.dimension()));
    start(static_cast<Eigen::Index>(m.index_of(m.initial))) = 1.0;

    if (m.flavor == QuantumFlavor::single_stack) {
        std::vector<Symbol> stack;
        std::function<void(const Vector&, std::size_t, std::size_t)> search = [&](const Vector& v, std::size_t pos,
                                                                                std::size_t remaining) {
            if (stack.size() + (n - pos) > remaining) return;
            if (pos == n && stack.empty()) best = std::max(best, accepting_probability(m, v));
            if (remaining == 0) return;
            if (pos < n) search(matrix(InputSymbol{x[pos]}) * v, pos + 1, remaining - 1);
            if (!stack.empty()) {
                Symbol top = stack.back();
                stack.pop_back();
                search(matrix(StackOp::pop(top)) * v, pos, remaining - 1);
                stack.push_back(top);
            }
            for (const auto& g : gamma) {
                stack.push_back(g);
                search(matrix(StackOp::push(g)) * v, pos, remaining - 1);
                stack.pop_back();
            }
        };
        search(start, 0, max_annot_len);
        return best;
    }

    std::vector<Symbol> s1, s2;
    auto options = [&](const std::vector<Symbol>& stack, int index) {
        std::vector<std::optional<StackOp>> out{std::nullopt};
        if (!stack.empty()) out.push_back(StackOp::pop(stack.back(), index));
        for (const auto& g : gamma) out.push_back(StackOp::push(g, index));
        return out;
    };
    auto apply = [](std::vector<Symbol>& stack, const std::optional<StackOp>& op) {
        if (!op) return;
        if (op->is_push()) stack.push_back(op->symbol);
        else stack.pop_back();
    };
    std::function<void(const Vector&, std::size_t, std::size_t)> search = [&](const Vector& v, std::size_t pos,
                                                                            std::size_t remaining) {
        if (std::max(s1.size(), s2.size()) + (n - pos) > remaining) return;
        if (pos == n && s1.empty() && s2.empty()) best = std::max(best, accepting_probability(m, v));
        if (remaining == 0) return;
        if (pos < n) search(matrix(InputSymbol{x[pos]}) * v, pos + 1, remaining - 1);
        for (const auto& t : m.alphabets.tape) search(matrix(TapeSymbol{t}) * v, pos, remaining - 1);
        for (const auto& a : options(s1, 1)) {
            for (const auto& b : options(s2, 2)) {
                if (!a && !b) continue;
                const auto saved1 = s1;
                const auto saved2 = s2;
                apply(s1, a);
                apply(s2, b);
                search(matrix(PairOp{a, b}) * v, pos, remaining - 1);
                s1 = saved1;
                s2 = saved2;
            }
        }
    };
    search(start, 0, max_annot_len);
    return best;
}

}  // namespace sm
