#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include <Eigen/QR>

#include "sm/determinize.hpp"

namespace sm::test {

std::string fixture_path(const std::string& name) { return std::string(SM_FIXTURE_DIR) + "/" + name; }

std::vector<Word> all_words(const std::vector<Symbol>& sigma, std::size_t max_len) {
    std::vector<Word> out{Word{}};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t end = out.size();
        for (std::size_t k = begin; k < end; ++k)
            for (const auto& a : sigma) {
                Word w = out[k];
                w.push_back(a);
                out.push_back(std::move(w));
            }
        begin = end;
    }
    return out;
}

Word word(const std::string& chars) {
    Word w;
    for (char c : chars) w.emplace_back(1, c);
    return w;
}

bool is_leq(const Word& x) {
    if (x.size() % 3 != 0) return false;
    std::size_t n = x.size() / 3;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != std::to_string(k / n)) return false;
    return true;
}

bool is_lw(const Word& x) {
    auto hash = std::find(x.begin(), x.end(), "#");
    if (hash == x.end() || std::count(x.begin(), x.end(), "#") != 1) return false;
    return Word(x.begin(), hash) == Word(hash + 1, x.end());
}

bool is_wwr(const Word& x) {
    if (x.size() % 2 != 0) return false;
    for (const auto& a : x)
        if (a != "0" && a != "1") return false;
    return std::equal(x.begin(), x.end(), x.rbegin());
}

std::uint64_t catalan(unsigned n) {
    // C(2n, n) / (n + 1) computed incrementally
    std::uint64_t c = 1;
    for (unsigned k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return c;
}

// ---------------------------------------------------------------------------
// Random machines
// ---------------------------------------------------------------------------

namespace {

int uniform(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<State> state_names(int n) {
    std::vector<State> out;
    for (int k = 0; k < n; ++k) out.push_back("q" + std::to_string(k));
    return out;
}

std::set<State> random_accepting(std::mt19937& rng, const std::vector<State>& states) {
    std::set<State> out;
    for (const auto& q : states)
        if (uniform(rng, 0, 2) == 0) out.insert(q);
    return out;
}

}  // namespace

PdaI random_pda1(std::mt19937& rng, RandomPdaShape shape) {
    auto states = state_names(uniform(rng, 1, shape.max_states));
    std::vector<Symbol> gamma{"Z", "A"};
    gamma.resize(static_cast<std::size_t>(uniform(rng, 1, shape.max_stack)));
    PdaI m;
    m.states.insert(states.begin(), states.end());
    m.input = {"0", "1"};
    m.stack.insert(gamma.begin(), gamma.end());
    m.initial = states[0];
    m.initial_stack = gamma[0];
    m.accepting = random_accepting(rng, states);
    int transitions = uniform(rng, 0, shape.max_transitions);
    for (int k = 0; k < transitions; ++k) {
        PdaITransition t;
        t.from = states[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(states.size()) - 1))];
        int a = uniform(rng, 0, 2);
        if (a < 2) t.input = std::to_string(a);
        t.top = gamma[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(gamma.size()) - 1))];
        t.to = states[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(states.size()) - 1))];
        int len = uniform(rng, 0, shape.max_push);
        for (int j = 0; j < len; ++j)
            t.push.push_back(gamma[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(gamma.size()) - 1))]);
        m.delta.insert(t);
    }
    return m;
}

PdaII random_pda2(std::mt19937& rng, int max_states, int max_stack, int max_edges) {
    auto states = state_names(uniform(rng, 1, max_states));
    std::vector<Symbol> gamma{"X", "Y"};
    gamma.resize(static_cast<std::size_t>(uniform(rng, 1, max_stack)));
    PdaII m;
    m.states.insert(states.begin(), states.end());
    m.input = {"0", "1"};
    m.stack.insert(gamma.begin(), gamma.end());
    m.initial = states[0];
    m.accepting = random_accepting(rng, states);
    auto tokens = extended_tokens(m.input, m.stack);
    tokens.push_back(Epsilon{});
    int edges = uniform(rng, 0, max_edges);
    auto pick = [&](const auto& v) { return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))]; };
    for (int k = 0; k < edges; ++k) m.add(pick(states), pick(tokens), pick(states));
    return m;
}

TwoStackMachine random_two_stack(std::mt19937& rng) {
    auto states = state_names(uniform(rng, 1, 4));
    TwoStackMachine m;
    m.states.insert(states.begin(), states.end());
    m.alphabets.input = {"0", "1"};
    m.alphabets.stack = {"X"};
    if (uniform(rng, 0, 1)) m.alphabets.stack.insert("Y");
    if (uniform(rng, 0, 1)) m.alphabets.tape = {"t"};
    m.initial = states[0];
    m.accepting = random_accepting(rng, states);
    auto tokens = two_stack_tokens(m.alphabets);
    auto pick = [&](const auto& v) { return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))]; };
    int edges = uniform(rng, 0, 10);
    for (int k = 0; k < edges; ++k) m.delta[{pick(states), pick(tokens)}] = pick(states);
    return m;
}

Matrix random_unitary(std::mt19937& rng, int dim) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(dim, dim);
}

QuantumMachine random_quantum(std::mt19937& rng, QuantumFlavor flavor, int dim, bool with_stack) {
    QuantumMachine m;
    m.states = state_names(dim);
    m.alphabets.input = {"0", "1"};
    if (with_stack) m.alphabets.stack = {"X"};
    if (flavor == QuantumFlavor::two_stack && with_stack) m.alphabets.tape = {"t"};
    m.flavor = flavor;
    m.initial = m.states[0];
    for (const auto& q : m.states)
        if (uniform(rng, 0, 1)) m.accepting.insert(q);
    for (const auto& t : quantum_tokens(flavor, m.alphabets)) m.unitaries.emplace(t, random_unitary(rng, dim));
    return m;
}

AnnotationString random_annotation(std::mt19937& rng, const std::vector<Token>& tokens, std::size_t max_len) {
    AnnotationString s;
    std::size_t len = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_len)));
    for (std::size_t k = 0; k < len; ++k)
        s.push_back(tokens[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(tokens.size()) - 1))]);
    return s;
}

// ---------------------------------------------------------------------------
// PDA-I oracles
// ---------------------------------------------------------------------------

bool pda1_accepts_summary(const PdaI& m, const Word& x) {
    const int n = static_cast<int>(x.size());
    using Config = std::pair<State, int>;
    // pops[(q, i, X)]: configurations reached right after X is first popped.
    std::map<std::tuple<State, int, Symbol>, std::set<Config>> pops;
    std::set<std::tuple<State, int, Symbol>> accepts;

    auto after_input = [&](const PdaITransition& t, int i) -> int {
        if (!t.input) return i;
        if (i < n && x[static_cast<std::size_t>(i)] == *t.input) return i + 1;
        return -1;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& q : m.states) {
            for (int i = 0; i <= n; ++i) {
                for (const auto& top : m.stack) {
                    auto key = std::make_tuple(q, i, top);
                    if (!accepts.contains(key) && m.accepting.contains(q) && i == n) {
                        accepts.insert(key);
                        changed = true;
                    }
                    for (const auto& t : m.delta) {
                        if (t.from != q || t.top != top) continue;
                        int j = after_input(t, i);
                        if (j < 0) continue;
                        // frontier: configurations after popping push[0..k)
                        std::set<Config> frontier{{t.to, j}};
                        for (std::size_t k = 0; k < t.push.size() && !frontier.empty(); ++k) {
                            for (const auto& [r, pos] : frontier)
                                if (accepts.contains({r, pos, t.push[k]}) && !accepts.contains(key)) {
                                    accepts.insert(key);
                                    changed = true;
                                }
                            std::set<Config> next;
                            for (const auto& [r, pos] : frontier) {
                                auto it = pops.find({r, pos, t.push[k]});
                                if (it != pops.end()) next.insert(it->second.begin(), it->second.end());
                            }
                            frontier = std::move(next);
                        }
                        auto& target = pops[key];
                        for (const auto& c : frontier)
                            if (target.insert(c).second) changed = true;
                    }
                }
            }
        }
    }
    if (accepts.contains({m.initial, 0, m.initial_stack})) return true;
    auto it = pops.find({m.initial, 0, m.initial_stack});
    if (it != pops.end())
        for (const auto& [p, j] : it->second)
            if (j == n && m.accepting.contains(p)) return true;
    return false;
}

SearchResult pda1_accepts_search(const PdaI& m, const Word& x, std::size_t max_depth, std::size_t max_steps) {
    struct Config {
        State q;
        std::size_t pos;
        std::vector<Symbol> stack;  // top at back
        auto operator<=>(const Config&) const = default;
    };
    std::set<Config> seen;
    std::deque<Config> queue;
    Config start{m.initial, 0, {m.initial_stack}};
    seen.insert(start);
    queue.push_back(start);
    bool truncated = false;
    std::size_t steps = 0;
    while (!queue.empty()) {
        if (steps++ == max_steps) return SearchResult::unknown;
        Config c = queue.front();
        queue.pop_front();
        if (c.pos == x.size() && m.accepting.contains(c.q)) return SearchResult::accepted;
        if (c.stack.empty()) continue;
        for (const auto& t : m.delta) {
            if (t.from != c.q || t.top != c.stack.back()) continue;
            Config next = c;
            if (t.input) {
                if (c.pos >= x.size() || x[c.pos] != *t.input) continue;
                ++next.pos;
            }
            next.q = t.to;
            next.stack.pop_back();
            for (auto it = t.push.rbegin(); it != t.push.rend(); ++it) next.stack.push_back(*it);
            if (next.stack.size() > max_depth) {
                truncated = true;
                continue;
            }
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    return truncated ? SearchResult::unknown : SearchResult::rejected;
}

bool pda1_accepts_stable(const PdaI& m, const Word& x) {
    std::size_t depth = 4;
    SearchResult previous = pda1_accepts_search(m, x, depth, 200000);
    while (true) {
        if (previous == SearchResult::accepted) return true;
        depth *= 2;
        SearchResult current = pda1_accepts_search(m, x, depth, 200000);
        if (current == SearchResult::accepted) return true;
        if (current == SearchResult::rejected) return false;
        if (current == previous || depth >= 64) return false;
        previous = current;
    }
}

// ---------------------------------------------------------------------------
// Extended-alphabet comparison
// ---------------------------------------------------------------------------

std::size_t extended_disagreements(const PdaII& nfa, const DpdaII& dfa, std::size_t max_len, std::size_t* checked) {
    const auto tokens = extended_tokens(nfa.input, nfa.stack);
    std::vector<State> nfa_states(nfa.states.begin(), nfa.states.end());
    std::map<State, int> nfa_index;
    for (std::size_t k = 0; k < nfa_states.size(); ++k) nfa_index[nfa_states[k]] = static_cast<int>(k);
    // bitmask successor tables; the ε-NFA side closes after each token
    const std::size_t q = nfa_states.size();
    std::vector<std::uint64_t> closure(q), nfa_accept_mask(1, 0);
    std::uint64_t accept_mask = 0;
    for (std::size_t s = 0; s < q; ++s) {
        std::set<State> c = eps_closure(nfa, {nfa_states[s]});
        for (const auto& r : c) closure[s] |= 1ULL << nfa_index[r];
        if (nfa.accepting.contains(nfa_states[s])) accept_mask |= 1ULL << s;
    }
    auto close = [&](std::uint64_t set) {
        std::uint64_t out = 0;
        for (std::size_t s = 0; s < q; ++s)
            if (set >> s & 1) out |= closure[s];
        return out;
    };
    std::vector<std::vector<std::uint64_t>> step(q, std::vector<std::uint64_t>(tokens.size(), 0));
    for (std::size_t s = 0; s < q; ++s)
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            auto it = nfa.delta.find({nfa_states[s], tokens[t]});
            if (it == nfa.delta.end()) continue;
            for (const auto& r : it->second) step[s][t] |= 1ULL << nfa_index[r];
        }

    std::vector<State> dfa_states(dfa.states.begin(), dfa.states.end());
    std::map<State, int> dfa_index;
    for (std::size_t k = 0; k < dfa_states.size(); ++k) dfa_index[dfa_states[k]] = static_cast<int>(k);
    std::vector<std::vector<int>> dstep(dfa_states.size(), std::vector<int>(tokens.size(), -1));
    std::vector<char> daccept(dfa_states.size(), 0);
    for (std::size_t s = 0; s < dfa_states.size(); ++s) {
        daccept[s] = dfa.accepting.contains(dfa_states[s]);
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            auto it = dfa.delta.find({dfa_states[s], tokens[t]});
            if (it != dfa.delta.end()) dstep[s][t] = dfa_index[it->second];
        }
    }

    std::size_t bad = 0, count = 0;
    std::function<void(std::uint64_t, int, std::size_t)> walk = [&](std::uint64_t set, int d, std::size_t depth) {
        // both sides dead: every extension is rejected by both, count them
        if (set == 0 && d < 0) {
            std::size_t extensions = 0, layer = 1;
            for (std::size_t k = depth; k <= max_len; ++k) {
                extensions += layer;
                layer *= tokens.size();
            }
            count += extensions;
            return;
        }
        ++count;
        bool a = (set & accept_mask) != 0;
        bool b = d >= 0 && daccept[static_cast<std::size_t>(d)];
        if (a != b) ++bad;
        if (depth == max_len) return;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            std::uint64_t next = 0;
            for (std::size_t s = 0; s < q; ++s)
                if (set >> s & 1) next |= step[s][t];
            walk(close(next), d >= 0 ? dstep[static_cast<std::size_t>(d)][t] : -1, depth + 1);
        }
    };
    walk(closure[static_cast<std::size_t>(nfa_index[nfa.initial])], dfa_index.at(dfa.initial), 0);
    if (checked) *checked = count;
    return bad;
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

namespace {

class DotChecker {
public:
    explicit DotChecker(const std::string& text) : text_(text) { lex(); }

    DotSummary run() {
        DotSummary s;
        try {
            graph();
            s.ok = true;
        } catch (const std::runtime_error& e) {
            s.error = e.what();
        }
        s.node_statements = nodes_;
        s.edge_statements = edges_;
        return s;
    }

private:
    struct Tok {
        enum Kind { id, punct, end } kind;
        std::string text;
    };

    void lex() {
        std::size_t i = 0;
        while (i < text_.size()) {
            char c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '"') {
                std::string s;
                ++i;
                while (i < text_.size() && text_[i] != '"') {
                    if (text_[i] == '\\' && i + 1 < text_.size()) ++i;
                    s += text_[i++];
                }
                if (i >= text_.size()) throw std::runtime_error("unterminated string");
                ++i;
                toks_.push_back({Tok::id, s});
            } else if (c == '-' && i + 1 < text_.size() && (text_[i + 1] == '>' || text_[i + 1] == '-')) {
                toks_.push_back({Tok::punct, text_.substr(i, 2)});
                i += 2;
            } else if (std::string("{}[];,=:").find(c) != std::string::npos) {
                toks_.push_back({Tok::punct, std::string(1, c)});
                ++i;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
                std::size_t j = i;
                while (j < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_' || text_[j] == '.'))
                    ++j;
                if (j == i) ++j;
                toks_.push_back({Tok::id, text_.substr(i, j - i)});
                i = j;
            } else {
                throw std::runtime_error(std::string("unexpected character '") + c + "'");
            }
        }
        toks_.push_back({Tok::end, ""});
    }

    const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool is(const std::string& p, std::size_t k = 0) const { return peek(k).kind == Tok::punct && peek(k).text == p; }
    void expect(const std::string& p) {
        if (!is(p)) throw std::runtime_error("expected '" + p + "' got '" + peek().text + "'");
        ++pos_;
    }
    std::string id() {
        if (peek().kind != Tok::id) throw std::runtime_error("expected ID got '" + peek().text + "'");
        return toks_[pos_++].text;
    }
    bool keyword(const std::string& k) const {
        if (peek().kind != Tok::id) return false;
        std::string t = peek().text;
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        return t == k;
    }

    void graph() {
        if (keyword("strict")) ++pos_;
        if (keyword("digraph")) directed_ = true;
        else if (!keyword("graph")) throw std::runtime_error("expected graph or digraph");
        ++pos_;
        if (peek().kind == Tok::id) ++pos_;
        expect("{");
        stmt_list();
        expect("}");
        if (peek().kind != Tok::end) throw std::runtime_error("trailing input");
    }

    void stmt_list() {
        while (!is("}")) {
            if (peek().kind == Tok::end) throw std::runtime_error("unexpected end");
            stmt();
            if (is(";")) ++pos_;
        }
    }

    void attr_list() {
        while (is("[")) {
            ++pos_;
            while (!is("]")) {
                id();
                expect("=");
                id();
                if (is(";") || is(",")) ++pos_;
            }
            ++pos_;
        }
    }

    void node_id() {
        id();
        if (is(":")) {
            ++pos_;
            id();
        }
    }

    void stmt() {
        if (keyword("graph") || keyword("node") || keyword("edge")) {
            ++pos_;
            if (!is("[")) throw std::runtime_error("attribute statement needs '['");
            attr_list();
            return;
        }
        if (is("{") || keyword("subgraph")) {
            throw std::runtime_error("subgraphs are not used by the exporter");
        }
        if (peek().kind == Tok::id && is("=", 1)) {
            id();
            ++pos_;
            id();
            return;
        }
        node_id();
        if (is("->") || is("--")) {
            while (is("->") || is("--")) {
                if (is("--") == directed_) throw std::runtime_error("edge operator does not match graph type");
                ++pos_;
                node_id();
            }
            ++edges_;
        } else {
            ++nodes_;
        }
        attr_list();
    }

    std::string text_;
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    std::size_t nodes_ = 0, edges_ = 0;
};

}  // namespace

DotSummary check_dot(const std::string& text) {
    try {
        return DotChecker(text).run();
    } catch (const std::runtime_error& e) {
        DotSummary s;
        s.error = e.what();
        return s;
    }
}

}  // namespace sm::test
