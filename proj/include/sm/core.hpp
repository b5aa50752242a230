#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace sm {

using Symbol = std::string;
using State = std::string;
using Word = std::vector<Symbol>;

class MalformedInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Annotation tokens
// ---------------------------------------------------------------------------

enum class Direction : std::uint8_t { push, pop };

/// Push or pop of one stack symbol. `stack` is 0 for single-stack models,
/// otherwise 1 or 2.
struct StackOp {
    int stack = 0;
    Direction direction = Direction::push;
    Symbol symbol;

    static StackOp push(Symbol s, int stack = 0) { return {stack, Direction::push, std::move(s)}; }
    static StackOp pop(Symbol s, int stack = 0) { return {stack, Direction::pop, std::move(s)}; }

    bool is_push() const { return direction == Direction::push; }

    friend auto operator<=>(const StackOp&, const StackOp&) = default;
    friend bool operator==(const StackOp&, const StackOp&) = default;
};

/// Simultaneous action on stacks 1 and 2; an absent component is epsilon.
struct PairOp {
    std::optional<StackOp> first;
    std::optional<StackOp> second;

    friend auto operator<=>(const PairOp&, const PairOp&) = default;
    friend bool operator==(const PairOp&, const PairOp&) = default;
};

struct Epsilon {
    friend auto operator<=>(const Epsilon&, const Epsilon&) = default;
    friend bool operator==(const Epsilon&, const Epsilon&) = default;
};

struct InputSymbol {
    Symbol symbol;
    friend auto operator<=>(const InputSymbol&, const InputSymbol&) = default;
    friend bool operator==(const InputSymbol&, const InputSymbol&) = default;
};

struct TapeSymbol {
    Symbol symbol;
    friend auto operator<=>(const TapeSymbol&, const TapeSymbol&) = default;
    friend bool operator==(const TapeSymbol&, const TapeSymbol&) = default;
};

using Token = std::variant<Epsilon, InputSymbol, StackOp, PairOp, TapeSymbol>;
using AnnotationString = std::vector<Token>;

inline Token input(Symbol s) { return InputSymbol{std::move(s)}; }
inline Token tape(Symbol s) { return TapeSymbol{std::move(s)}; }
inline Token epsilon() { return Epsilon{}; }
inline Token pair(std::optional<StackOp> a, std::optional<StackOp> b) {
    return PairOp{std::move(a), std::move(b)};
}

/// Text form shared by the CLI and machine files: `0`, `_`, `tape:t`,
/// `push:X`, `pop2:Y`, `(push1:X,_)`.
std::string to_string(const StackOp& op);
std::string to_string(const Token& t);
std::string to_string(const AnnotationString& s);
std::string to_string(const Word& w);

/// Throws MalformedInput on bad syntax.
StackOp parse_stack_op(std::string_view text);
Token parse_token(std::string_view text);
AnnotationString parse_annotation(std::string_view text);

/// Splits `text` into input symbols: on whitespace when present, otherwise
/// one symbol per character. Throws MalformedInput for symbols outside `sigma`.
Word split_input(std::string_view text, const std::set<Symbol>& sigma);

/// Names usable as states and alphabet symbols in files and token text.
bool is_valid_name(std::string_view name);

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// Subsequence of `s` whose tokens belong to `target`.
AnnotationString project(const AnnotationString& s, const std::set<Token>& target);
AnnotationString project(const AnnotationString& s, const std::function<bool(const Token&)>& keep);

Word project_input(const AnnotationString& s);
std::vector<StackOp> project_stack(const AnnotationString& s);
std::vector<PairOp> project_pairs(const AnnotationString& s);

// ---------------------------------------------------------------------------
// Machines
// ---------------------------------------------------------------------------

struct Alphabets {
    std::set<Symbol> input;
    std::set<Symbol> stack;
    std::set<Symbol> tape;

    friend bool operator==(const Alphabets&, const Alphabets&) = default;
};

struct Dfa {
    std::set<State> states;
    std::set<Symbol> input;
    std::map<std::pair<State, Symbol>, State> delta;
    State initial;
    std::set<State> accepting;

    bool accepts(const Word& x) const;
};

struct TwoStackMachine {
    std::set<State> states;
    Alphabets alphabets;
    std::map<std::pair<State, Token>, State> delta;
    State initial;
    std::set<State> accepting;

    friend bool operator==(const TwoStackMachine&, const TwoStackMachine&) = default;
};

struct PdaITransition {
    State from;
    std::optional<Symbol> input;  // nullopt is epsilon
    Symbol top;
    State to;
    std::vector<Symbol> push;  // front ends up on top

    friend auto operator<=>(const PdaITransition&, const PdaITransition&) = default;
    friend bool operator==(const PdaITransition&, const PdaITransition&) = default;
};

struct PdaI {
    std::set<State> states;
    std::set<Symbol> input;
    std::set<Symbol> stack;
    std::set<PdaITransition> delta;
    State initial;
    Symbol initial_stack;
    std::set<State> accepting;

    friend bool operator==(const PdaI&, const PdaI&) = default;
};

struct PdaII {
    std::set<State> states;
    std::set<Symbol> input;
    std::set<Symbol> stack;
    std::map<std::pair<State, Token>, std::set<State>> delta;
    State initial;
    std::set<State> accepting;

    void add(const State& from, const Token& t, const State& to) { delta[{from, t}].insert(to); }
    std::size_t edge_count() const;

    friend bool operator==(const PdaII&, const PdaII&) = default;
};

struct DpdaII {
    std::set<State> states;
    std::set<Symbol> input;
    std::set<Symbol> stack;
    std::map<std::pair<State, Token>, State> delta;
    State initial;
    std::set<State> accepting;

    friend bool operator==(const DpdaII&, const DpdaII&) = default;
};

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

struct Violation {
    std::string location;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_machine(const Dfa& m);
ValidationReport validate_machine(const TwoStackMachine& m);
ValidationReport validate_machine(const PdaI& m);
ValidationReport validate_machine(const PdaII& m);
ValidationReport validate_machine(const DpdaII& m);

std::string format_report(const ValidationReport& report);

/// Throws ValidationError carrying the formatted report if it is nonempty.
template <typename Machine>
void require_valid(const Machine& m) {
    auto report = validate_machine(m);
    if (!report.empty()) throw ValidationError(format_report(report));
}

/// Annotation-alphabet membership per machine kind.
bool in_annotation_alphabet(const TwoStackMachine& m, const Token& t);
bool in_annotation_alphabet(const PdaII& m, const Token& t);
bool in_annotation_alphabet(const DpdaII& m, const Token& t);

/// Every token a two-stack machine can read: Σ, Γ_{1,2}(↕) and Δ.
std::vector<Token> two_stack_tokens(const Alphabets& a);
/// Σ ∪ Γ(↕) in a fixed order.
std::vector<Token> extended_tokens(const std::set<Symbol>& input, const std::set<Symbol>& stack);

/// Returns `base` or `base` with primes appended, whichever is first not in `taken`.
std::string fresh_name(const std::string& base, const std::set<std::string>& taken);

/// The DFA as a two-stack machine that never touches its stacks.
/// `stack_symbol` fills Γ, which must be nonempty.
TwoStackMachine embed_dfa_as_two_stack(const Dfa& d, const Symbol& stack_symbol = "Z0");

/// DPDA-II viewed as a PDA-II with singleton images and no epsilon row.
PdaII embed_dpda2(const DpdaII& m);

}  // namespace sm
