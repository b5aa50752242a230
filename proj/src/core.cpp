#include "sm/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<StackOp> parse_pair_component(std::string_view text, int expected_stack) {
    text = trim(text);
    if (text == "_") return std::nullopt;
    StackOp op = parse_stack_op(text);
    if (op.stack != expected_stack)
        throw MalformedInput("pair component '" + std::string(text) + "' must act on stack " +
                             std::to_string(expected_stack));
    return op;
}

}  // namespace

bool is_valid_name(std::string_view name) {
    if (name.empty() || name == "_" || name == "->") return false;
    for (char c : name) {
        if (is_space(c)) return false;
        switch (c) {
        case '(': case ')': case '{': case '}': case ',': case ':':
            return false;
        default:
            break;
        }
    }
    return true;
}

std::string to_string(const StackOp& op) {
    std::string out = op.is_push() ? "push" : "pop";
    if (op.stack != 0) out += std::to_string(op.stack);
    out += ':';
    out += op.symbol;
    return out;
}

std::string to_string(const Token& t) {
    struct Visitor {
        std::string operator()(const Epsilon&) const { return "_"; }
        std::string operator()(const InputSymbol& a) const { return a.symbol; }
        std::string operator()(const TapeSymbol& a) const { return "tape:" + a.symbol; }
        std::string operator()(const StackOp& op) const { return to_string(op); }
        std::string operator()(const PairOp& p) const {
            return "(" + (p.first ? to_string(*p.first) : std::string("_")) + "," +
                   (p.second ? to_string(*p.second) : std::string("_")) + ")";
        }
    };
    return std::visit(Visitor{}, t);
}

std::string to_string(const AnnotationString& s) {
    std::string out;
    for (const auto& t : s) {
        if (!out.empty()) out += ' ';
        out += to_string(t);
    }
    return out;
}

std::string to_string(const Word& w) {
    std::string out;
    for (const auto& a : w) out += a;
    return out;
}

StackOp parse_stack_op(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw MalformedInput("expected stack operation, got '" + std::string(text) + "'");
    std::string_view head = text.substr(0, colon);
    std::string_view symbol = text.substr(colon + 1);
    StackOp op;
    std::string_view index;
    if (head.starts_with("push")) {
        op.direction = Direction::push;
        index = head.substr(4);
    } else if (head.starts_with("pop")) {
        op.direction = Direction::pop;
        index = head.substr(3);
    } else {
        throw MalformedInput("unknown stack operation '" + std::string(text) + "'");
    }
    if (index.empty()) {
        op.stack = 0;
    } else if (index == "1" || index == "2") {
        op.stack = index[0] - '0';
    } else {
        throw MalformedInput("stack index must be 1 or 2 in '" + std::string(text) + "'");
    }
    if (!is_valid_name(symbol))
        throw MalformedInput("bad stack symbol in '" + std::string(text) + "'");
    op.symbol = std::string(symbol);
    return op;
}

Token parse_token(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw MalformedInput("empty token");
    if (text == "_") return Epsilon{};
    if (text.front() == '(') {
        if (text.back() != ')') throw MalformedInput("unterminated pair token '" + std::string(text) + "'");
        auto inner = text.substr(1, text.size() - 2);
        auto comma = inner.find(',');
        if (comma == std::string_view::npos || inner.find(',', comma + 1) != std::string_view::npos)
            throw MalformedInput("pair token needs exactly one comma: '" + std::string(text) + "'");
        PairOp p{parse_pair_component(inner.substr(0, comma), 1),
                 parse_pair_component(inner.substr(comma + 1), 2)};
        if (!p.first && !p.second) throw MalformedInput("pair token (_,_) is not allowed");
        return p;
    }
    if (text.starts_with("tape:")) {
        auto name = text.substr(5);
        if (!is_valid_name(name)) throw MalformedInput("bad tape symbol in '" + std::string(text) + "'");
        return TapeSymbol{std::string(name)};
    }
    if (text.find(':') != std::string_view::npos) return parse_stack_op(text);
    if (!is_valid_name(text)) throw MalformedInput("bad symbol '" + std::string(text) + "'");
    return InputSymbol{std::string(text)};
}

AnnotationString parse_annotation(std::string_view text) {
    AnnotationString out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        if (text[i] == '(') {
            // pair tokens may contain spaces after the comma
            j = text.find(')', i);
            if (j == std::string_view::npos) throw MalformedInput("unterminated pair token");
            ++j;
        } else {
            while (j < text.size() && !is_space(text[j])) ++j;
        }
        out.push_back(parse_token(text.substr(i, j - i)));
        i = j;
    }
    return out;
}

Word split_input(std::string_view text, const std::set<Symbol>& sigma) {
    Word out;
    bool has_space = std::any_of(text.begin(), text.end(), is_space);
    if (has_space) {
        std::istringstream in{std::string(text)};
        std::string a;
        while (in >> a) {
            if (!sigma.contains(a)) throw MalformedInput("symbol '" + a + "' is not in the input alphabet");
            out.push_back(a);
        }
        return out;
    }
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t best = 0;
        for (const auto& a : sigma)
            if (a.size() > best && text.substr(i, a.size()) == a) best = a.size();
        if (best == 0)
            throw MalformedInput("input '" + std::string(text) + "' has a symbol outside the input alphabet at offset " +
                                 std::to_string(i));
        out.emplace_back(text.substr(i, best));
        i += best;
    }
    return out;
}

AnnotationString project(const AnnotationString& s, const std::set<Token>& target) {
    return project(s, [&](const Token& t) { return target.contains(t); });
}

AnnotationString project(const AnnotationString& s, const std::function<bool(const Token&)>& keep) {
    AnnotationString out;
    for (const auto& t : s)
        if (keep(t)) out.push_back(t);
    return out;
}

Word project_input(const AnnotationString& s) {
    Word out;
    for (const auto& t : s)
        if (const auto* a = std::get_if<InputSymbol>(&t)) out.push_back(a->symbol);
    return out;
}

std::vector<StackOp> project_stack(const AnnotationString& s) {
    std::vector<StackOp> out;
    for (const auto& t : s)
        if (const auto* op = std::get_if<StackOp>(&t)) out.push_back(*op);
    return out;
}

std::vector<PairOp> project_pairs(const AnnotationString& s) {
    std::vector<PairOp> out;
    for (const auto& t : s)
        if (const auto* p = std::get_if<PairOp>(&t)) out.push_back(*p);
    return out;
}

bool Dfa::accepts(const Word& x) const {
    State q = initial;
    for (const auto& a : x) {
        auto it = delta.find({q, a});
        if (it == delta.end()) return false;
        q = it->second;
    }
    return accepting.contains(q);
}

std::size_t PdaII::edge_count() const {
    std::size_t n = 0;
    for (const auto& [key, image] : delta) n += image.size();
    return n;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Reporter {
public:
    void add(std::string location, std::string message) {
        report_.push_back({std::move(location), std::move(message)});
    }
    ValidationReport take() { return std::move(report_); }

    void names(const std::set<std::string>& names, const std::string& what) {
        for (const auto& n : names) {
            if (!is_valid_name(n)) add(what, "invalid name '" + n + "'");
            else if (what == "states" && n.front() == '#') add(what, "state name '" + n + "' may not start with '#'");
        }
    }

    void state_ref(const std::set<State>& q, const State& s, const std::string& where) {
        if (!q.contains(s)) add(where, "state '" + s + "' is not declared");
    }

    void alphabets(const std::set<Symbol>& sigma, const std::set<Symbol>& gamma, const std::set<Symbol>& tape,
                   bool require_stack) {
        names(sigma, "input");
        names(gamma, "stack");
        names(tape, "tape");
        if (sigma.empty()) add("input", "input alphabet is empty");
        if (require_stack && gamma.empty()) add("stack", "stack alphabet is empty");
        for (const auto& a : sigma) {
            if (gamma.contains(a)) add("alphabets", "symbol '" + a + "' is both input and stack");
            if (tape.contains(a)) add("alphabets", "symbol '" + a + "' is both input and tape");
        }
        for (const auto& a : gamma)
            if (tape.contains(a)) add("alphabets", "symbol '" + a + "' is both stack and tape");
    }

    void common(const std::set<State>& q, const State& initial, const std::set<State>& accepting) {
        if (q.empty()) add("states", "no states declared");
        names(q, "states");
        state_ref(q, initial, "initial");
        for (const auto& f : accepting) state_ref(q, f, "accept");
    }

private:
    ValidationReport report_;
};

std::string where(const State& from, const Token& t) { return "transition " + from + " " + to_string(t); }

bool stack_op_ok(const StackOp& op, const std::set<Symbol>& gamma, int stack) {
    return op.stack == stack && gamma.contains(op.symbol);
}

}  // namespace

bool in_annotation_alphabet(const TwoStackMachine& m, const Token& t) {
    const auto& a = m.alphabets;
    if (const auto* s = std::get_if<InputSymbol>(&t)) return a.input.contains(s->symbol);
    if (const auto* s = std::get_if<TapeSymbol>(&t)) return a.tape.contains(s->symbol);
    if (const auto* p = std::get_if<PairOp>(&t)) {
        if (!p->first && !p->second) return false;
        if (p->first && !stack_op_ok(*p->first, a.stack, 1)) return false;
        if (p->second && !stack_op_ok(*p->second, a.stack, 2)) return false;
        return true;
    }
    return false;
}

bool in_annotation_alphabet(const PdaII& m, const Token& t) {
    if (std::holds_alternative<Epsilon>(t)) return true;
    if (const auto* s = std::get_if<InputSymbol>(&t)) return m.input.contains(s->symbol);
    if (const auto* op = std::get_if<StackOp>(&t)) return stack_op_ok(*op, m.stack, 0);
    return false;
}

bool in_annotation_alphabet(const DpdaII& m, const Token& t) {
    if (const auto* s = std::get_if<InputSymbol>(&t)) return m.input.contains(s->symbol);
    if (const auto* op = std::get_if<StackOp>(&t)) return stack_op_ok(*op, m.stack, 0);
    return false;
}

ValidationReport validate_machine(const Dfa& m) {
    Reporter r;
    r.common(m.states, m.initial, m.accepting);
    r.alphabets(m.input, {}, {}, false);
    for (const auto& [key, to] : m.delta) {
        std::string w = "transition " + key.first + " " + key.second;
        r.state_ref(m.states, key.first, w);
        r.state_ref(m.states, to, w);
        if (!m.input.contains(key.second)) r.add(w, "symbol '" + key.second + "' is not in the input alphabet");
    }
    return r.take();
}

ValidationReport validate_machine(const TwoStackMachine& m) {
    Reporter r;
    r.common(m.states, m.initial, m.accepting);
    r.alphabets(m.alphabets.input, m.alphabets.stack, m.alphabets.tape, true);
    for (const auto& [key, to] : m.delta) {
        auto w = where(key.first, key.second);
        r.state_ref(m.states, key.first, w);
        r.state_ref(m.states, to, w);
        if (!in_annotation_alphabet(m, key.second)) r.add(w, "token is not in the two-stack annotation alphabet");
    }
    return r.take();
}

ValidationReport validate_machine(const PdaI& m) {
    Reporter r;
    r.common(m.states, m.initial, m.accepting);
    r.alphabets(m.input, m.stack, {}, true);
    if (!m.stack.contains(m.initial_stack))
        r.add("bottom", "initial stack symbol '" + m.initial_stack + "' is not in the stack alphabet");
    for (const auto& t : m.delta) {
        std::string w = "transition " + t.from + " " + (t.input ? *t.input : std::string("_")) + " " + t.top;
        r.state_ref(m.states, t.from, w);
        r.state_ref(m.states, t.to, w);
        if (t.input && !m.input.contains(*t.input)) r.add(w, "symbol '" + *t.input + "' is not in the input alphabet");
        if (!m.stack.contains(t.top)) r.add(w, "stack symbol '" + t.top + "' is not in the stack alphabet");
        for (const auto& x : t.push)
            if (!m.stack.contains(x)) r.add(w, "pushed symbol '" + x + "' is not in the stack alphabet");
    }
    return r.take();
}

ValidationReport validate_machine(const PdaII& m) {
    Reporter r;
    r.common(m.states, m.initial, m.accepting);
    r.alphabets(m.input, m.stack, {}, true);
    for (const auto& [key, image] : m.delta) {
        auto w = where(key.first, key.second);
        r.state_ref(m.states, key.first, w);
        for (const auto& to : image) r.state_ref(m.states, to, w);
        if (!in_annotation_alphabet(m, key.second)) r.add(w, "token is not in the PDA-II annotation alphabet");
    }
    return r.take();
}

ValidationReport validate_machine(const DpdaII& m) {
    Reporter r;
    r.common(m.states, m.initial, m.accepting);
    r.alphabets(m.input, m.stack, {}, true);
    for (const auto& [key, to] : m.delta) {
        auto w = where(key.first, key.second);
        r.state_ref(m.states, key.first, w);
        r.state_ref(m.states, to, w);
        if (std::holds_alternative<Epsilon>(key.second)) r.add(w, "deterministic machines have no epsilon moves");
        else if (!in_annotation_alphabet(m, key.second)) r.add(w, "token is not in the DPDA-II annotation alphabet");
    }
    return r.take();
}

std::string format_report(const ValidationReport& report) {
    std::string out;
    for (const auto& v : report) {
        if (!out.empty()) out += '\n';
        out += v.location + ": " + v.message;
    }
    return out;
}

std::vector<Token> extended_tokens(const std::set<Symbol>& input, const std::set<Symbol>& stack) {
    std::vector<Token> out;
    for (const auto& a : input) out.push_back(InputSymbol{a});
    for (const auto& x : stack) {
        out.push_back(StackOp::push(x));
        out.push_back(StackOp::pop(x));
    }
    return out;
}

std::vector<Token> two_stack_tokens(const Alphabets& a) {
    std::vector<Token> out;
    for (const auto& s : a.input) out.push_back(InputSymbol{s});
    std::vector<std::optional<StackOp>> firsts{std::nullopt}, seconds{std::nullopt};
    for (const auto& x : a.stack) {
        firsts.push_back(StackOp::push(x, 1));
        firsts.push_back(StackOp::pop(x, 1));
        seconds.push_back(StackOp::push(x, 2));
        seconds.push_back(StackOp::pop(x, 2));
    }
    for (const auto& f : firsts)
        for (const auto& s : seconds)
            if (f || s) out.push_back(PairOp{f, s});
    for (const auto& t : a.tape) out.push_back(TapeSymbol{t});
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
    std::string name = base;
    while (taken.contains(name)) name += '\'';
    return name;
}

TwoStackMachine embed_dfa_as_two_stack(const Dfa& d, const Symbol& stack_symbol) {
    TwoStackMachine m;
    m.states = d.states;
    m.alphabets.input = d.input;
    m.alphabets.stack = {fresh_name(stack_symbol, d.input)};
    for (const auto& [key, to] : d.delta) m.delta[{key.first, InputSymbol{key.second}}] = to;
    m.initial = d.initial;
    m.accepting = d.accepting;
    return m;
}

PdaII embed_dpda2(const DpdaII& m) {
    PdaII out;
    out.states = m.states;
    out.input = m.input;
    out.stack = m.stack;
    for (const auto& [key, to] : m.delta) out.delta[key].insert(to);
    out.initial = m.initial;
    out.accepting = m.accepting;
    return out;
}

}  // namespace sm
