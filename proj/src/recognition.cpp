#include "sm/recognition.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>

#include "indexed_pda.hpp"
#include "sm/validity.hpp"

namespace sm {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::accepted: return "accepted";
    case Verdict::rejected: return "rejected";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

void require_word(const Word& x, const std::set<Symbol>& sigma) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!sigma.contains(x[k]))
            throw MalformedInput("input symbol '" + x[k] + "' at position " + std::to_string(k + 1) +
                                 " is not in the input alphabet");
}

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::size_t h = v.size();
        for (int x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

/// Integer view of a two-stack machine.
struct IndexedTwoStack {
    struct Move {
        enum class Kind { input, pair, tape } kind;
        int symbol = -1;           // input symbol index for Kind::input
        int op1 = -1, op2 = -1;    // stack symbol index, -1 for epsilon component
        bool push1 = false, push2 = false;
        int target = 0;
        Token token;
    };

    std::vector<State> names;
    std::map<State, int> state_index;
    std::map<Symbol, int> input_index;
    std::map<Symbol, int> stack_index;
    std::vector<char> accepting;
    int initial = 0;
    std::vector<std::vector<Move>> moves;

    explicit IndexedTwoStack(const TwoStackMachine& m) {
        for (const auto& q : m.states) {
            state_index[q] = static_cast<int>(names.size());
            names.push_back(q);
        }
        int k = 0;
        for (const auto& a : m.alphabets.input) input_index[a] = k++;
        k = 0;
        for (const auto& x : m.alphabets.stack) stack_index[x] = k++;
        initial = state_index.at(m.initial);
        accepting.assign(names.size(), 0);
        for (const auto& f : m.accepting) accepting[state_index.at(f)] = 1;
        moves.resize(names.size());
        for (const auto& [key, to] : m.delta) {
            Move mv;
            mv.target = state_index.at(to);
            mv.token = key.second;
            if (const auto* a = std::get_if<InputSymbol>(&key.second)) {
                mv.kind = Move::Kind::input;
                mv.symbol = input_index.at(a->symbol);
            } else if (std::holds_alternative<TapeSymbol>(key.second)) {
                mv.kind = Move::Kind::tape;
            } else {
                const auto& p = std::get<PairOp>(key.second);
                mv.kind = Move::Kind::pair;
                if (p.first) {
                    mv.op1 = stack_index.at(p.first->symbol);
                    mv.push1 = p.first->is_push();
                }
                if (p.second) {
                    mv.op2 = stack_index.at(p.second->symbol);
                    mv.push2 = p.second->is_push();
                }
            }
            moves[state_index.at(key.first)].push_back(std::move(mv));
        }
    }
};

bool apply_op(std::vector<int>& stack, int symbol, bool push) {
    if (symbol < 0) return true;
    if (push) {
        stack.push_back(symbol);
        return true;
    }
    if (stack.empty() || stack.back() != symbol) return false;
    stack.pop_back();
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-stack machines
// ---------------------------------------------------------------------------

RunOutcome run_annotation_two_stack(const TwoStackMachine& m, const AnnotationString& s) {
    RunOutcome out;
    State q = m.initial;
    out.states_visited = 1;
    bool alive = true;
    for (const auto& t : s) {
        if (!in_annotation_alphabet(m, t))
            throw MalformedInput("token '" + to_string(t) + "' is not in the machine's annotation alphabet");
        if (!alive) continue;
        auto it = m.delta.find({q, t});
        if (it == m.delta.end()) {
            alive = false;
            continue;
        }
        q = it->second;
        ++out.states_visited;
    }
    if (alive && m.accepting.contains(q) && is_valid_two(project_pairs(s))) {
        out.verdict = Verdict::accepted;
        out.witness = s;
    }
    return out;
}

RunOutcome accepts_two_stack_bounded(const TwoStackMachine& m, const Word& x, SearchBounds bounds) {
    require_word(x, m.alphabets.input);
    IndexedTwoStack ix(m);
    std::vector<int> word;
    for (const auto& a : x) word.push_back(ix.input_index.at(a));
    const int n = static_cast<int>(word.size());

    struct Node {
        int parent;
        const IndexedTwoStack::Move* move;
        int state;
        int pos;
        std::vector<int> s1, s2;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::vector<int>, int, VectorHash> seen;
    auto key_of = [](const Node& nd) {
        std::vector<int> k;
        k.reserve(nd.s1.size() + nd.s2.size() + 3);
        k.push_back(nd.state);
        k.push_back(nd.pos);
        k.push_back(static_cast<int>(nd.s1.size()));
        k.insert(k.end(), nd.s1.begin(), nd.s1.end());
        k.insert(k.end(), nd.s2.begin(), nd.s2.end());
        return k;
    };
    auto is_goal = [&](const Node& nd) {
        return ix.accepting[nd.state] && nd.pos == n && nd.s1.empty() && nd.s2.empty();
    };
    auto accept = [&](int id) {
        RunOutcome out;
        out.verdict = Verdict::accepted;
        for (int k = id; nodes[k].parent >= 0; k = nodes[k].parent) out.witness.push_back(nodes[k].move->token);
        std::reverse(out.witness.begin(), out.witness.end());
        out.states_visited = nodes.size();
        return out;
    };

    nodes.push_back({-1, nullptr, ix.initial, 0, {}, {}});
    seen.emplace(key_of(nodes[0]), 0);
    if (is_goal(nodes[0])) return accept(0);

    std::deque<int> queue{0};
    std::size_t steps = 0;
    bool truncated = false;
    while (!queue.empty()) {
        if (steps == bounds.max_steps) {
            RunOutcome out;
            out.verdict = Verdict::inconclusive;
            out.states_visited = nodes.size();
            return out;
        }
        ++steps;
        int id = queue.front();
        queue.pop_front();
        for (const auto& mv : ix.moves[nodes[id].state]) {
            Node next{id, &mv, mv.target, nodes[id].pos, nodes[id].s1, nodes[id].s2};
            switch (mv.kind) {
            case IndexedTwoStack::Move::Kind::input:
                if (next.pos >= n || word[next.pos] != mv.symbol) continue;
                ++next.pos;
                break;
            case IndexedTwoStack::Move::Kind::tape:
                break;
            case IndexedTwoStack::Move::Kind::pair:
                if (!apply_op(next.s1, mv.op1, mv.push1) || !apply_op(next.s2, mv.op2, mv.push2)) continue;
                if (next.s1.size() > bounds.max_depth || next.s2.size() > bounds.max_depth) {
                    truncated = true;
                    continue;
                }
                break;
            }
            auto key = key_of(next);
            if (seen.contains(key)) continue;
            int nid = static_cast<int>(nodes.size());
            seen.emplace(std::move(key), nid);
            nodes.push_back(std::move(next));
            if (is_goal(nodes[nid])) return accept(nid);
            queue.push_back(nid);
        }
    }
    RunOutcome out;
    out.verdict = truncated ? Verdict::inconclusive : Verdict::rejected;
    out.states_visited = nodes.size();
    return out;
}

// ---------------------------------------------------------------------------
// Balanced reachability
// ---------------------------------------------------------------------------

struct BalancedReachabilityTable::Impl {
    enum class Rule { base, input, epsilon, wrap };

    struct Entry {
        int p, i, q, j;
        Rule rule;
        int prev = -1;    // input, epsilon, wrap: the extended prefix
        int inner = -1;   // wrap: balanced segment between push and pop
        int symbol = -1;  // input symbol or wrapped stack symbol
    };

    struct Waiter {
        int outer;
        int symbol;
    };

    detail::IndexedPda pda;
    std::vector<int> word;
    std::vector<Entry> entries;
    std::unordered_map<std::uint64_t, int> ids;
    std::vector<std::vector<int>> processed;  // by start (p, i)
    std::vector<std::vector<Waiter>> waiters;  // by start (q', j) of the awaited segment
    std::vector<char> demanded;
    std::deque<int> work;

    Impl(const PdaII& m, const Word& x) : pda(m), word(pda.encode(x)) {
        std::size_t starts = pda.size() * (word.size() + 1);
        processed.resize(starts);
        waiters.resize(starts);
        demanded.assign(starts, 0);
    }

    int positions() const { return static_cast<int>(word.size()) + 1; }
    int start_of(int p, int i) const { return p * positions() + i; }

    std::uint64_t key(int p, int i, int q, int j) const {
        std::uint64_t s = pda.size(), n = positions();
        return ((static_cast<std::uint64_t>(p) * n + i) * s + q) * n + j;
    }

    int find(int p, int i, int q, int j) const {
        auto it = ids.find(key(p, i, q, j));
        return it == ids.end() ? -1 : it->second;
    }

    void add(Entry e) {
        auto [it, inserted] = ids.emplace(key(e.p, e.i, e.q, e.j), static_cast<int>(entries.size()));
        if (!inserted) return;
        entries.push_back(e);
        work.push_back(it->second);
    }

    void demand(int p, int i) {
        int s = start_of(p, i);
        if (demanded[s]) return;
        demanded[s] = 1;
        add({p, i, p, i, Rule::base});
    }

    void close(const Waiter& w, int inner_id) {
        const Entry outer = entries[w.outer];
        const Entry inner = entries[inner_id];
        for (const auto& pop : pda.pop_edges[inner.q])
            if (pop.symbol == w.symbol)
                add({outer.p, outer.i, pop.target, inner.j, Rule::wrap, w.outer, inner_id, w.symbol});
    }

    void saturate() {
        const int n = static_cast<int>(word.size());
        while (!work.empty()) {
            int id = work.front();
            work.pop_front();
            const Entry e = entries[id];
            int s = start_of(e.p, e.i);
            processed[s].push_back(id);
            for (std::size_t k = 0; k < waiters[s].size(); ++k) close(waiters[s][k], id);

            if (e.j < n)
                for (const auto& edge : pda.input_edges[e.q])
                    if (edge.symbol == word[e.j]) add({e.p, e.i, edge.target, e.j + 1, Rule::input, id, -1, edge.symbol});
            for (int r : pda.eps_edges[e.q]) add({e.p, e.i, r, e.j, Rule::epsilon, id});
            for (const auto& push : pda.push_edges[e.q]) {
                Waiter w{id, push.symbol};
                int t = start_of(push.target, e.j);
                waiters[t].push_back(w);
                demand(push.target, e.j);
                for (std::size_t k = 0; k < processed[t].size(); ++k) close(w, processed[t][k]);
            }
        }
    }

    void expand(int id, AnnotationString& out) const {
        const Entry& e = entries[id];
        switch (e.rule) {
        case Rule::base:
            return;
        case Rule::input:
            expand(e.prev, out);
            out.push_back(InputSymbol{pda.inputs[e.symbol]});
            return;
        case Rule::epsilon:
            expand(e.prev, out);
            out.push_back(Epsilon{});
            return;
        case Rule::wrap:
            expand(e.prev, out);
            out.push_back(StackOp::push(pda.stack[e.symbol]));
            expand(e.inner, out);
            out.push_back(StackOp::pop(pda.stack[e.symbol]));
            return;
        }
    }
};

BalancedReachabilityTable::BalancedReachabilityTable() = default;
BalancedReachabilityTable::BalancedReachabilityTable(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
BalancedReachabilityTable::BalancedReachabilityTable(BalancedReachabilityTable&&) noexcept = default;
BalancedReachabilityTable& BalancedReachabilityTable::operator=(BalancedReachabilityTable&&) noexcept = default;
BalancedReachabilityTable::~BalancedReachabilityTable() = default;

bool BalancedReachabilityTable::contains(const State& p, std::size_t i, const State& q, std::size_t j) const {
    if (!impl_) return false;
    auto pi = impl_->pda.state_index.find(p);
    auto qi = impl_->pda.state_index.find(q);
    if (pi == impl_->pda.state_index.end() || qi == impl_->pda.state_index.end()) return false;
    if (i > impl_->word.size() || j > impl_->word.size()) return false;
    return impl_->find(pi->second, static_cast<int>(i), qi->second, static_cast<int>(j)) >= 0;
}

std::size_t BalancedReachabilityTable::size() const { return impl_ ? impl_->entries.size() : 0; }

std::optional<AnnotationString> BalancedReachabilityTable::segment(const State& p, std::size_t i, const State& q,
                                                                   std::size_t j) const {
    if (!contains(p, i, q, j)) return std::nullopt;
    int id = impl_->find(impl_->pda.state_index.at(p), static_cast<int>(i), impl_->pda.state_index.at(q),
                         static_cast<int>(j));
    AnnotationString out;
    impl_->expand(id, out);
    return out;
}

BalancedReachabilityTable build_reachability_table(const PdaII& m, const Word& x) {
    require_valid(m);
    require_word(x, m.input);
    auto impl = std::make_unique<BalancedReachabilityTable::Impl>(m, x);
    for (int p = 0; p < static_cast<int>(impl->pda.size()); ++p)
        for (int i = 0; i <= static_cast<int>(x.size()); ++i) impl->demand(p, i);
    impl->saturate();
    return BalancedReachabilityTable(std::move(impl));
}

std::pair<bool, std::optional<AnnotationString>> accepts_pda2(const PdaII& m, const Word& x) {
    require_valid(m);
    require_word(x, m.input);
    BalancedReachabilityTable::Impl impl(m, x);
    impl.demand(impl.pda.initial, 0);
    impl.saturate();
    const int n = static_cast<int>(x.size());
    for (int f = 0; f < static_cast<int>(impl.pda.size()); ++f) {
        if (!impl.pda.accepting[f]) continue;
        int id = impl.find(impl.pda.initial, 0, f, n);
        if (id < 0) continue;
        AnnotationString witness;
        impl.expand(id, witness);
        return {true, std::move(witness)};
    }
    return {false, std::nullopt};
}

bool accepts_dpda2(const DpdaII& m, const Word& x) { return accepts_pda2(embed_dpda2(m), x).first; }

bool check_pda2_witness(const PdaII& m, const Word& x, const AnnotationString& s) {
    for (const auto& t : s)
        if (!in_annotation_alphabet(m, t)) return false;
    if (project_input(s) != x) return false;
    std::set<State> current{m.initial};
    for (const auto& t : s) {
        std::set<State> next;
        for (const auto& q : current) {
            auto it = m.delta.find({q, t});
            if (it != m.delta.end()) next.insert(it->second.begin(), it->second.end());
        }
        current = std::move(next);
        if (current.empty()) return false;
    }
    bool final_hit = false;
    for (const auto& q : current) final_hit = final_hit || m.accepting.contains(q);
    return final_hit && is_valid_single(project_stack(s));
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

namespace {

void check_cap(std::size_t len, std::size_t cap) {
    if (len > cap)
        throw CapExceeded("brute_force_accepts: annotation length " + std::to_string(len) + " exceeds cap " +
                          std::to_string(cap));
}

/// Remembers the largest remaining budget a search node was expanded with.
class BudgetMemo {
public:
    bool should_skip(std::vector<int> key, int remaining) {
        auto [it, inserted] = best_.emplace(std::move(key), remaining);
        if (inserted) return false;
        if (it->second >= remaining) return true;
        it->second = remaining;
        return false;
    }

private:
    std::unordered_map<std::vector<int>, int, VectorHash> best_;
};

}  // namespace

bool brute_force_accepts(const PdaII& m, const Word& x, std::size_t max_annot_len, std::size_t cap) {
    check_cap(max_annot_len, cap);
    require_word(x, m.input);
    detail::IndexedPda pda(m);
    const std::vector<int> word = pda.encode(x);
    const int n = static_cast<int>(word.size());
    const std::size_t q = pda.size();
    BudgetMemo memo;

    std::function<bool(const std::vector<char>&, std::vector<int>&, int, int)> search =
        [&](const std::vector<char>& set, std::vector<int>& stack, int pos, int remaining) -> bool {
        if (pos == n && stack.empty())
            for (std::size_t s = 0; s < q; ++s)
                if (set[s] && pda.accepting[s]) return true;
        if (remaining == 0) return false;
        // the rest of the input and the pending pops must fit in the budget
        if (static_cast<int>(stack.size()) + (n - pos) > remaining) return false;

        std::vector<int> key(set.begin(), set.end());
        key.push_back(pos);
        key.insert(key.end(), stack.begin(), stack.end());
        if (memo.should_skip(std::move(key), remaining)) return false;

        auto successor = [&](auto&& edges_of) {
            std::vector<char> next(q, 0);
            bool any = false;
            for (std::size_t s = 0; s < q; ++s)
                if (set[s])
                    edges_of(static_cast<int>(s), [&](int t) {
                        next[t] = 1;
                        any = true;
                    });
            return std::make_pair(any, next);
        };

        if (pos < n) {
            auto [any, next] = successor([&](int s, auto emit) {
                for (const auto& e : pda.input_edges[s])
                    if (e.symbol == word[pos]) emit(e.target);
            });
            if (any && search(next, stack, pos + 1, remaining - 1)) return true;
        }
        {
            auto [any, next] = successor([&](int s, auto emit) {
                for (int t : pda.eps_edges[s]) emit(t);
            });
            if (any && search(next, stack, pos, remaining - 1)) return true;
        }
        if (!stack.empty()) {
            int top = stack.back();
            auto [any, next] = successor([&](int s, auto emit) {
                for (const auto& e : pda.pop_edges[s])
                    if (e.symbol == top) emit(e.target);
            });
            if (any) {
                stack.pop_back();
                bool ok = search(next, stack, pos, remaining - 1);
                stack.push_back(top);
                if (ok) return true;
            }
        }
        for (int sym = 0; sym < static_cast<int>(pda.stack.size()); ++sym) {
            auto [any, next] = successor([&](int s, auto emit) {
                for (const auto& e : pda.push_edges[s])
                    if (e.symbol == sym) emit(e.target);
            });
            if (!any) continue;
            stack.push_back(sym);
            bool ok = search(next, stack, pos, remaining - 1);
            stack.pop_back();
            if (ok) return true;
        }
        return false;
    };

    std::vector<char> init(q, 0);
    init[pda.initial] = 1;
    std::vector<int> stack;
    return search(init, stack, 0, static_cast<int>(max_annot_len));
}

bool brute_force_accepts(const TwoStackMachine& m, const Word& x, std::size_t max_annot_len, std::size_t cap) {
    check_cap(max_annot_len, cap);
    require_word(x, m.alphabets.input);
    IndexedTwoStack ix(m);
    std::vector<int> word;
    for (const auto& a : x) word.push_back(ix.input_index.at(a));
    const int n = static_cast<int>(word.size());
    BudgetMemo memo;

    std::function<bool(int, int, std::vector<int>&, std::vector<int>&, int)> search =
        [&](int state, int pos, std::vector<int>& s1, std::vector<int>& s2, int remaining) -> bool {
        if (pos == n && s1.empty() && s2.empty() && ix.accepting[state]) return true;
        if (remaining == 0) return false;
        if (static_cast<int>(std::max(s1.size(), s2.size())) + (n - pos) > remaining) return false;
        std::vector<int> key{state, pos, static_cast<int>(s1.size())};
        key.insert(key.end(), s1.begin(), s1.end());
        key.insert(key.end(), s2.begin(), s2.end());
        if (memo.should_skip(std::move(key), remaining)) return false;

        for (const auto& mv : ix.moves[state]) {
            switch (mv.kind) {
            case IndexedTwoStack::Move::Kind::input:
                if (pos < n && word[pos] == mv.symbol && search(mv.target, pos + 1, s1, s2, remaining - 1))
                    return true;
                break;
            case IndexedTwoStack::Move::Kind::tape:
                if (search(mv.target, pos, s1, s2, remaining - 1)) return true;
                break;
            case IndexedTwoStack::Move::Kind::pair: {
                auto c1 = s1;
                auto c2 = s2;
                if (!apply_op(c1, mv.op1, mv.push1) || !apply_op(c2, mv.op2, mv.push2)) break;
                if (search(mv.target, pos, c1, c2, remaining - 1)) return true;
                break;
            }
            }
        }
        return false;
    };

    std::vector<int> s1, s2;
    return search(ix.initial, 0, s1, s2, static_cast<int>(max_annot_len));
}

}  // namespace sm
