#include "sm/machine_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sm {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

std::string kind_name(const AnyMachine& m) {
    struct Visitor {
        std::string operator()(const TwoStackMachine&) const { return "twostack"; }
        std::string operator()(const PdaI&) const { return "pda1"; }
        std::string operator()(const PdaII&) const { return "pda2"; }
        std::string operator()(const DpdaII&) const { return "dpda2"; }
        std::string operator()(const QuantumMachine& q) const {
            return q.flavor == QuantumFlavor::single_stack ? "qpda2" : "q2sm";
        }
    };
    return std::visit(Visitor{}, m);
}

// ---------------------------------------------------------------------------
// Complex literals
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

// Parses an unsigned-or-signed decimal at the front of `s`; advances `s`.
std::optional<double> take_number(std::string_view& s) {
    bool negative = false;
    std::size_t k = 0;
    if (k < s.size() && (s[k] == '+' || s[k] == '-')) negative = s[k++] == '-';
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + k, s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data() + k) return std::nullopt;
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return negative ? -v : v;
}

}  // namespace

Complex parse_complex(std::string_view text) {
    const std::string original(text);
    auto fail = [&]() -> Complex { throw MalformedInput("bad complex literal '" + original + "'"); };
    auto first = take_number(text);
    if (!first) return fail();
    if (text.empty()) return {*first, 0.0};
    if (text == "i") return {0.0, *first};
    if (text.front() != '+' && text.front() != '-') return fail();
    auto second = take_number(text);
    if (!second || text != "i") return fail();
    return {*first, *second};
}

std::string format_complex(Complex z) {
    std::string out = format_double(z.real());
    double im = z.imag();
    out += std::signbit(im) ? '-' : '+';
    out += format_double(std::fabs(im));
    out += 'i';
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Word {
    std::string text;
    std::size_t column;
};

struct Line {
    std::size_t number;
    std::vector<Word> words;
};

std::vector<Word> split_words(std::string_view raw, std::size_t line_number) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        char c = raw[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '{' || c == '}') {
            out.push_back({std::string(1, c), i + 1});
            ++i;
            continue;
        }
        std::size_t j = i;
        if (c == '(') {
            j = raw.find(')', i);
            if (j == std::string_view::npos) throw ParseError(line_number, i + 1, "unterminated pair token");
            ++j;
            std::string compact;
            for (char d : raw.substr(i, j - i))
                if (d != ' ' && d != '\t') compact += d;
            out.push_back({compact, i + 1});
        } else {
            while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r' && raw[j] != '{' &&
                   raw[j] != '}')
                ++j;
            out.push_back({std::string(raw.substr(i, j - i)), i + 1});
        }
        i = j;
    }
    return out;
}

class Parser {
public:
    Parser(std::string_view text, double tol) : tol_(tol) {
        std::size_t number = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            ++number;
            std::string_view raw = text.substr(start, end - start);
            std::size_t first = raw.find_first_not_of(" \t\r");
            if (first != std::string_view::npos && raw[first] != '#') lines_.push_back({number, split_words(raw, number)});
            if (end == text.size()) break;
            start = end + 1;
        }
    }

    AnyMachine parse() {
        if (lines_.empty()) throw ParseError(1, 1, "empty machine file; expected 'machine KIND'");
        const Line& head = lines_.front();
        if (head.words[0].text != "machine" || head.words.size() != 2)
            throw ParseError(head.number, 1, "expected 'machine KIND' as the first line");
        kind_ = head.words[1].text;
        static const std::set<std::string> kinds{"twostack", "pda1", "pda2", "dpda2", "qpda2", "q2sm"};
        if (!kinds.contains(kind_)) throw error(head, head.words[1], "unknown machine kind '" + kind_ + "'");
        const bool quantum = kind_ == "qpda2" || kind_ == "q2sm";

        std::size_t k = 1;
        for (; k < lines_.size(); ++k) {
            const Line& line = lines_[k];
            const std::string& key = line.words[0].text;
            if (key == "trans") {
                if (quantum) throw error(line, line.words[0], "quantum machines have matrices, not transitions");
                require_header(line);
                ++k;
                break;
            }
            if (key == "matrix") {
                if (!quantum) throw error(line, line.words[0], "matrices are only allowed in quantum machines");
                require_header(line);
                break;
            }
            declaration(line);
        }
        if (k >= lines_.size() || !quantum) {
            require_header(lines_.back());
            for (; k < lines_.size(); ++k) transition(lines_[k]);
        } else {
            while (k < lines_.size()) k = matrix_block(k);
        }
        return build();
    }

private:
    ParseError error(const Line& line, const Word& w, const std::string& message) const {
        return ParseError(line.number, w.column, message);
    }

    void declaration(const Line& line) {
        const std::string& key = line.words[0].text;
        if (seen_.contains(key)) throw error(line, line.words[0], "duplicate '" + key + "' declaration");
        std::vector<Word> args(line.words.begin() + 1, line.words.end());
        for (const auto& w : args)
            if (!is_valid_name(w.text)) throw error(line, w, "invalid name '" + w.text + "'");

        if (key == "states") {
            for (const auto& w : args) {
                if (w.text.front() == '#') throw error(line, w, "state names may not start with '#'");
                if (std::find(state_order_.begin(), state_order_.end(), w.text) != state_order_.end())
                    throw error(line, w, "state '" + w.text + "' declared twice");
                state_order_.push_back(w.text);
            }
            states_.insert(state_order_.begin(), state_order_.end());
        } else if (key == "input" || key == "stack" || key == "tape") {
            if (key == "tape" && kind_ != "twostack" && kind_ != "q2sm")
                throw error(line, line.words[0], "only two-stack machines have tape symbols");
            auto& target = key == "input" ? alphabets_.input : key == "stack" ? alphabets_.stack : alphabets_.tape;
            for (const auto& w : args) {
                for (const auto* other : {&alphabets_.input, &alphabets_.stack, &alphabets_.tape})
                    if (other != &target && other->contains(w.text))
                        throw error(line, w, "symbol '" + w.text + "' is already in another alphabet");
                if (!target.insert(w.text).second) throw error(line, w, "symbol '" + w.text + "' declared twice");
            }
        } else if (key == "initial") {
            if (args.size() != 1) throw error(line, line.words[0], "'initial' takes exactly one state");
            initial_ = state_ref(line, args[0]);
        } else if (key == "accept") {
            for (const auto& w : args) accepting_.insert(state_ref(line, w));
        } else if (key == "bottom") {
            if (kind_ != "pda1") throw error(line, line.words[0], "'bottom' is only used by pda1 machines");
            if (args.size() != 1) throw error(line, line.words[0], "'bottom' takes exactly one stack symbol");
            if (!seen_.contains("stack")) throw error(line, args[0], "'bottom' must follow the 'stack' declaration");
            if (!alphabets_.stack.contains(args[0].text))
                throw error(line, args[0], "stack symbol '" + args[0].text + "' is not declared");
            bottom_ = args[0].text;
        } else {
            throw error(line, line.words[0], "unknown declaration '" + key + "'");
        }
        seen_.insert(key);
    }

    void require_header(const Line& line) const {
        for (const char* key : {"states", "initial", "input", "stack"})
            if (!seen_.contains(key))
                throw ParseError(line.number, 1, std::string("missing '") + key + "' declaration");
        if (kind_ == "pda1" && bottom_.empty()) throw ParseError(line.number, 1, "missing 'bottom' declaration");
    }

    const State& state_ref(const Line& line, const Word& w) const {
        if (!seen_.contains("states")) throw error(line, w, "'" + w.text + "' used before the 'states' declaration");
        auto it = states_.find(w.text);
        if (it == states_.end()) throw error(line, w, "undeclared state '" + w.text + "'");
        return *it;
    }

    const Symbol& stack_ref(const Line& line, const Word& w) const {
        auto it = alphabets_.stack.find(w.text);
        if (it == alphabets_.stack.end()) throw error(line, w, "undeclared stack symbol '" + w.text + "'");
        return *it;
    }

    Token token_ref(const Line& line, const Word& w) const {
        Token t;
        try {
            t = parse_token(w.text);
        } catch (const MalformedInput& e) {
            throw error(line, w, e.what());
        }
        bool ok = false;
        if (std::holds_alternative<Epsilon>(t)) {
            ok = kind_ == "pda2";
        } else if (const auto* a = std::get_if<InputSymbol>(&t)) {
            ok = alphabets_.input.contains(a->symbol);
        } else if (const auto* a = std::get_if<TapeSymbol>(&t)) {
            ok = alphabets_.tape.contains(a->symbol);
        } else if (const auto* op = std::get_if<StackOp>(&t)) {
            ok = kind_ != "twostack" && kind_ != "q2sm" && op->stack == 0 && alphabets_.stack.contains(op->symbol);
        } else if (const auto* p = std::get_if<PairOp>(&t)) {
            ok = kind_ == "twostack" || kind_ == "q2sm";
            for (const auto* c : {&p->first, &p->second})
                if (*c && !alphabets_.stack.contains((*c)->symbol)) ok = false;
        }
        if (!ok) throw error(line, w, "token '" + w.text + "' is not in this machine's alphabet");
        return t;
    }

    void transition(const Line& line) {
        const auto& w = line.words;
        auto arrow = std::find_if(w.begin(), w.end(), [](const Word& x) { return x.text == "->"; });
        if (arrow == w.end()) throw error(line, w[0], "expected '->' in transition");
        std::size_t a = static_cast<std::size_t>(arrow - w.begin());

        if (kind_ == "pda1") {
            if (a != 3) throw error(line, w[0], "expected 'FROM INPUT TOP -> TO PUSH...'");
            if (a + 1 >= w.size()) throw error(line, w[a], "missing target state");
            PdaITransition t;
            t.from = state_ref(line, w[0]);
            if (w[1].text != "_") {
                if (!alphabets_.input.contains(w[1].text))
                    throw error(line, w[1], "undeclared input symbol '" + w[1].text + "'");
                t.input = w[1].text;
            }
            t.top = stack_ref(line, w[2]);
            t.to = state_ref(line, w[a + 1]);
            for (std::size_t k = a + 2; k < w.size(); ++k) {
                if (w[k].text == "_" && w.size() == a + 3) break;
                t.push.push_back(stack_ref(line, w[k]));
            }
            if (!pda1_.insert(t).second) throw error(line, w[0], "duplicate transition");
            return;
        }

        if (a != 2) throw error(line, w[0], "expected 'FROM TOKEN -> TARGET'");
        const State& from = state_ref(line, w[0]);
        Token token = token_ref(line, w[1]);
        std::vector<State> targets;
        if (a + 1 < w.size() && w[a + 1].text == "{") {
            if (w.back().text != "}") throw error(line, w.back(), "expected '}'");
            for (std::size_t k = a + 2; k + 1 < w.size(); ++k) targets.push_back(state_ref(line, w[k]));
        } else {
            if (w.size() != a + 2) throw error(line, w[a], "expected exactly one target state");
            targets.push_back(state_ref(line, w[a + 1]));
        }
        if (kind_ == "pda2") {
            auto& image = pda2_[{from, token}];
            image.insert(targets.begin(), targets.end());
            return;
        }
        if (targets.size() != 1) throw error(line, w[a], kind_ + " transitions have exactly one target");
        auto [it, inserted] = det_.emplace(std::make_pair(from, token), targets[0]);
        if (!inserted && it->second != targets[0])
            throw error(line, w[0], "conflicting transitions for " + from + " " + w[1].text);
    }

    std::size_t matrix_block(std::size_t k) {
        const Line& head = lines_[k];
        // a pair token is split off from its colon: `matrix (_,pop2:X):`
        const bool split_colon = head.words.size() == 3 && head.words[2].text == ":";
        if (head.words[0].text != "matrix" || (head.words.size() != 2 && !split_colon) ||
            (!split_colon && (head.words[1].text.size() < 2 || head.words[1].text.back() != ':')))
            throw ParseError(head.number, 1, "expected 'matrix TOKEN:'");
        Word tw = head.words[1];
        if (!split_colon) tw.text.pop_back();
        Token token = token_ref(head, tw);
        if (matrices_.contains(token)) throw error(head, tw, "duplicate matrix for '" + tw.text + "'");
        const auto dim = static_cast<Eigen::Index>(state_order_.size());
        Matrix u(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            ++k;
            if (k >= lines_.size()) throw ParseError(head.number, 1, "matrix needs " + std::to_string(dim) + " rows");
            const Line& row = lines_[k];
            if (static_cast<Eigen::Index>(row.words.size()) != dim)
                throw ParseError(row.number, 1, "matrix row needs " + std::to_string(dim) + " entries");
            for (Eigen::Index c = 0; c < dim; ++c) {
                try {
                    u(r, c) = parse_complex(row.words[static_cast<std::size_t>(c)].text);
                } catch (const MalformedInput& e) {
                    throw error(row, row.words[static_cast<std::size_t>(c)], e.what());
                }
            }
        }
        double residual = unitarity_residual(u);
        if (residual > tol_)
            throw error(head, tw, "matrix for '" + tw.text + "' is not unitary (residual " + std::to_string(residual) + ")");
        matrices_.emplace(token, std::move(u));
        return k + 1;
    }

    template <typename M>
    M finish(M m) const {
        auto report = validate_machine(m);
        if (!report.empty()) throw ParseError(lines_.back().number, 1, format_report(report));
        return m;
    }

    AnyMachine build() const {
        if (kind_ == "twostack") {
            return finish(TwoStackMachine{states_, alphabets_, det_, initial_, accepting_});
        }
        if (kind_ == "pda1") {
            return finish(PdaI{states_, alphabets_.input, alphabets_.stack, pda1_, initial_, bottom_, accepting_});
        }
        if (kind_ == "pda2") {
            return finish(PdaII{states_, alphabets_.input, alphabets_.stack, pda2_, initial_, accepting_});
        }
        if (kind_ == "dpda2") {
            return finish(DpdaII{states_, alphabets_.input, alphabets_.stack, det_, initial_, accepting_});
        }
        QuantumMachine q;
        q.states = state_order_;
        q.alphabets = alphabets_;
        q.unitaries = matrices_;
        q.initial = initial_;
        q.accepting = accepting_;
        q.flavor = kind_ == "qpda2" ? QuantumFlavor::single_stack : QuantumFlavor::two_stack;
        fill_identity(q);
        auto report = validate_machine(q, tol_);
        if (!report.empty()) throw ParseError(lines_.back().number, 1, format_report(report));
        return q;
    }

    double tol_;
    std::vector<Line> lines_;
    std::string kind_;
    std::set<std::string> seen_;
    std::vector<State> state_order_;
    std::set<State> states_;
    Alphabets alphabets_;
    State initial_;
    std::set<State> accepting_;
    Symbol bottom_;
    std::set<PdaITransition> pda1_;
    std::map<std::pair<State, Token>, std::set<State>> pda2_;
    std::map<std::pair<State, Token>, State> det_;
    std::map<Token, Matrix> matrices_;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string join(const auto& names) {
    std::string out;
    for (const auto& n : names) {
        out += ' ';
        out += n;
    }
    return out;
}

void header(std::ostringstream& out, const std::string& kind, const auto& states, const State& initial,
            const std::set<State>& accepting, const Alphabets& a) {
    out << "machine " << kind << '\n';
    out << "states" << join(states) << '\n';
    out << "input" << join(a.input) << '\n';
    out << "stack" << join(a.stack) << '\n';
    if (!a.tape.empty()) out << "tape" << join(a.tape) << '\n';
    out << "initial " << initial << '\n';
    out << "accept" << join(accepting) << '\n';
}

}  // namespace

AnyMachine parse_machine(std::string_view text, double tol) { return Parser(text, tol).parse(); }

std::string serialize_machine(const AnyMachine& machine) {
    std::ostringstream out;
    const std::string kind = kind_name(machine);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, TwoStackMachine>) {
                header(out, kind, m.states, m.initial, m.accepting, m.alphabets);
                out << "trans\n";
                for (const auto& [key, to] : m.delta) out << key.first << ' ' << to_string(key.second) << " -> " << to << '\n';
            } else if constexpr (std::is_same_v<M, PdaI>) {
                header(out, kind, m.states, m.initial, m.accepting, Alphabets{m.input, m.stack, {}});
                out << "bottom " << m.initial_stack << '\n';
                out << "trans\n";
                for (const auto& t : m.delta) {
                    out << t.from << ' ' << (t.input ? *t.input : std::string("_")) << ' ' << t.top << " -> " << t.to;
                    for (const auto& x : t.push) out << ' ' << x;
                    out << '\n';
                }
            } else if constexpr (std::is_same_v<M, PdaII>) {
                header(out, kind, m.states, m.initial, m.accepting, Alphabets{m.input, m.stack, {}});
                out << "trans\n";
                for (const auto& [key, image] : m.delta) {
                    if (image.empty()) continue;
                    out << key.first << ' ' << to_string(key.second) << " -> {" << join(image) << " }\n";
                }
            } else if constexpr (std::is_same_v<M, DpdaII>) {
                header(out, kind, m.states, m.initial, m.accepting, Alphabets{m.input, m.stack, {}});
                out << "trans\n";
                for (const auto& [key, to] : m.delta) out << key.first << ' ' << to_string(key.second) << " -> " << to << '\n';
            } else {
                header(out, kind, m.states, m.initial, m.accepting, m.alphabets);
                for (const auto& [token, u] : m.unitaries) {
                    out << "matrix " << to_string(token) << ":\n";
                    for (Eigen::Index r = 0; r < u.rows(); ++r) {
                        for (Eigen::Index c = 0; c < u.cols(); ++c) out << (c ? " " : "  ") << format_complex(u(r, c));
                        out << '\n';
                    }
                }
            }
        },
        machine);
    return out.str();
}

AnyMachine load_machine(const std::string& path, double tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_machine(buffer.str(), tol);
}

void save_machine(const std::string& path, const AnyMachine& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << serialize_machine(m);
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

class DotWriter {
public:
    explicit DotWriter(const std::string& kind) { out_ << "digraph " << quote(kind) << " {\n  rankdir=LR;\n  node [shape=circle];\n"; }

    void node(const State& q, bool accepting) {
        out_ << "  " << quote(q);
        if (accepting) out_ << " [shape=doublecircle]";
        out_ << ";\n";
    }

    void entry(const State& initial, const std::set<State>& states) {
        out_ << "  node [shape=point, label=\"\"];\n";
        out_ << "  " << quote(fresh_name("__start", states)) << " -> " << quote(initial) << ";\n";
    }

    void edge(const State& from, const State& to, const std::string& label) {
        out_ << "  " << quote(from) << " -> " << quote(to) << " [label=" << quote(label) << "];\n";
    }

    std::string finish() {
        out_ << "}\n";
        return out_.str();
    }

private:
    std::ostringstream out_;
};

}  // namespace

std::string export_dot(const AnyMachine& machine) {
    DotWriter dot(kind_name(machine));
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            for (const auto& q : m.states) dot.node(q, m.accepting.contains(q));
            dot.entry(m.initial, std::set<State>(m.states.begin(), m.states.end()));
            if constexpr (std::is_same_v<M, TwoStackMachine> || std::is_same_v<M, DpdaII>) {
                for (const auto& [key, to] : m.delta) dot.edge(key.first, to, to_string(key.second));
            } else if constexpr (std::is_same_v<M, PdaII>) {
                for (const auto& [key, image] : m.delta)
                    for (const auto& to : image) dot.edge(key.first, to, to_string(key.second));
            } else if constexpr (std::is_same_v<M, PdaI>) {
                for (const auto& t : m.delta) {
                    std::string label = (t.input ? *t.input : std::string("_")) + ", " + t.top + " / ";
                    label += t.push.empty() ? std::string("_") : join(t.push).substr(1);
                    dot.edge(t.from, t.to, label);
                }
            } else {
                for (const auto& [token, u] : m.unitaries)
                    for (Eigen::Index c = 0; c < u.cols(); ++c)
                        for (Eigen::Index r = 0; r < u.rows(); ++r)
                            if (std::abs(u(r, c)) > 1e-12)
                                dot.edge(m.states[static_cast<std::size_t>(c)], m.states[static_cast<std::size_t>(r)],
                                         to_string(token) + " : " + format_complex(u(r, c)));
            }
        },
        machine);
    return dot.finish();
}

}  // namespace sm
