#include "sm/determinize.hpp"

#include <deque>
#include <functional>

#include "indexed_pda.hpp"

namespace sm {

std::set<State> eps_closure(const PdaII& m, const std::set<State>& states) {
    std::set<State> closure = states;
    std::deque<State> work(states.begin(), states.end());
    while (!work.empty()) {
        State q = work.front();
        work.pop_front();
        auto it = m.delta.find({q, Epsilon{}});
        if (it == m.delta.end()) continue;
        for (const auto& r : it->second)
            if (closure.insert(r).second) work.push_back(r);
    }
    return closure;
}

std::string subset_name(const std::set<State>& members) {
    std::string name = "[";
    for (const auto& q : members) {
        if (name.size() > 1) name += '|';
        name += q;
    }
    return name + "]";
}

namespace {

std::set<State> step(const PdaII& m, const std::set<State>& from, const Token& t) {
    std::set<State> next;
    for (const auto& q : from) {
        auto it = m.delta.find({q, t});
        if (it != m.delta.end()) next.insert(it->second.begin(), it->second.end());
    }
    return eps_closure(m, next);
}

bool hits(const std::set<State>& states, const std::set<State>& accepting) {
    for (const auto& q : states)
        if (accepting.contains(q)) return true;
    return false;
}

}  // namespace

Determinized subset_construct(const PdaII& m) {
    require_valid(m);
    Determinized out;
    DpdaII& d = out.machine;
    d.input = m.input;
    d.stack = m.stack;

    std::map<std::set<State>, State> names;
    std::set<std::string> used;
    std::deque<std::set<State>> work;
    auto intern = [&](const std::set<State>& subset) -> const State& {
        auto it = names.find(subset);
        if (it != names.end()) return it->second;
        State name = fresh_name(subset_name(subset), used);
        used.insert(name);
        d.states.insert(name);
        if (hits(subset, m.accepting)) d.accepting.insert(name);
        out.members[name] = subset;
        work.push_back(subset);
        return names.emplace(subset, name).first->second;
    };

    d.initial = intern(eps_closure(m, {m.initial}));
    const auto tokens = extended_tokens(m.input, m.stack);
    while (!work.empty()) {
        auto subset = work.front();
        work.pop_front();
        const State from = names.at(subset);
        for (const auto& t : tokens) {
            auto next = step(m, subset, t);
            if (next.empty()) continue;
            d.delta[{from, t}] = intern(next);
        }
    }
    return out;
}

bool accepts_extended(const PdaII& m, const AnnotationString& w) {
    auto current = eps_closure(m, {m.initial});
    for (const auto& t : w) {
        if (std::holds_alternative<Epsilon>(t)) continue;
        current = step(m, current, t);
        if (current.empty()) return false;
    }
    return hits(current, m.accepting);
}

bool accepts_extended(const DpdaII& m, const AnnotationString& w) {
    State q = m.initial;
    for (const auto& t : w) {
        auto it = m.delta.find({q, t});
        if (it == m.delta.end()) return false;
        q = it->second;
    }
    return m.accepting.contains(q);
}

std::set<Word> corollary1_language(const PdaII& m, std::size_t max_ext_len, std::size_t cap) {
    if (max_ext_len > cap)
        throw CapExceeded("corollary1_language: length " + std::to_string(max_ext_len) + " exceeds cap " +
                          std::to_string(cap));
    require_valid(m);
    detail::IndexedPda pda(m);
    const std::size_t q = pda.size();

    auto close = [&](std::vector<char>& set) {
        std::vector<int> work;
        for (std::size_t s = 0; s < q; ++s)
            if (set[s]) work.push_back(static_cast<int>(s));
        while (!work.empty()) {
            int s = work.back();
            work.pop_back();
            for (int r : pda.eps_edges[s])
                if (!set[r]) {
                    set[r] = 1;
                    work.push_back(r);
                }
        }
    };
    auto successor = [&](const std::vector<char>& set, const std::vector<std::vector<detail::IndexedPda::Edge>>& edges,
                         int symbol) {
        std::vector<char> next(q, 0);
        bool any = false;
        for (std::size_t s = 0; s < q; ++s)
            if (set[s])
                for (const auto& e : edges[s])
                    if (e.symbol == symbol) {
                        next[e.target] = 1;
                        any = true;
                    }
        if (any) close(next);
        return std::make_pair(any, next);
    };

    std::set<Word> out;
    Word word;
    std::vector<int> stack;
    // Every extension of w is visited except those that already failed: an
    // empty state set, an illegal pop, or more pending pops than budget.
    std::function<void(const std::vector<char>&, std::size_t)> extend = [&](const std::vector<char>& set,
                                                                           std::size_t remaining) {
        if (stack.empty())
            for (std::size_t s = 0; s < q; ++s)
                if (set[s] && pda.accepting[s]) {
                    out.insert(word);
                    break;
                }
        if (remaining == 0) return;
        for (int a = 0; a < static_cast<int>(pda.inputs.size()); ++a) {
            auto [any, next] = successor(set, pda.input_edges, a);
            if (!any || stack.size() > remaining - 1) continue;
            word.push_back(pda.inputs[a]);
            extend(next, remaining - 1);
            word.pop_back();
        }
        if (!stack.empty()) {
            int top = stack.back();
            auto [any, next] = successor(set, pda.pop_edges, top);
            if (any) {
                stack.pop_back();
                extend(next, remaining - 1);
                stack.push_back(top);
            }
        }
        for (int x = 0; x < static_cast<int>(pda.stack.size()); ++x) {
            if (stack.size() + 2 > remaining) break;
            auto [any, next] = successor(set, pda.push_edges, x);
            if (!any) continue;
            stack.push_back(x);
            extend(next, remaining - 1);
            stack.pop_back();
        }
    };

    std::vector<char> init(q, 0);
    init[pda.initial] = 1;
    close(init);
    extend(init, max_ext_len);
    return out;
}

std::set<Word> corollary1_language(const DpdaII& m, std::size_t max_ext_len, std::size_t cap) {
    return corollary1_language(embed_dpda2(m), max_ext_len, cap);
}

}  // namespace sm
