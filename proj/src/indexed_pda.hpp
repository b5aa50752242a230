#pragma once

// Integer-indexed view of a PDA-II used by the search and fixpoint code.

#include <map>
#include <string>
#include <vector>

#include "sm/core.hpp"

namespace sm::detail {

struct IndexedPda {
    struct Edge {
        int symbol;  // input or stack symbol index; unused for epsilon
        int target;
    };

    std::vector<State> names;
    std::map<State, int> state_index;
    std::vector<Symbol> inputs;
    std::map<Symbol, int> input_index;
    std::vector<Symbol> stack;
    std::map<Symbol, int> stack_index;

    int initial = 0;
    std::vector<char> accepting;

    std::vector<std::vector<Edge>> input_edges;
    std::vector<std::vector<int>> eps_edges;
    std::vector<std::vector<Edge>> push_edges;
    std::vector<std::vector<Edge>> pop_edges;

    explicit IndexedPda(const PdaII& m) {
        for (const auto& q : m.states) {
            state_index[q] = static_cast<int>(names.size());
            names.push_back(q);
        }
        for (const auto& a : m.input) {
            input_index[a] = static_cast<int>(inputs.size());
            inputs.push_back(a);
        }
        for (const auto& x : m.stack) {
            stack_index[x] = static_cast<int>(stack.size());
            stack.push_back(x);
        }
        const std::size_t n = names.size();
        initial = state_index.at(m.initial);
        accepting.assign(n, 0);
        for (const auto& f : m.accepting) accepting[state_index.at(f)] = 1;
        input_edges.resize(n);
        eps_edges.resize(n);
        push_edges.resize(n);
        pop_edges.resize(n);
        for (const auto& [key, image] : m.delta) {
            int from = state_index.at(key.first);
            for (const auto& to_name : image) {
                int to = state_index.at(to_name);
                const Token& t = key.second;
                if (std::holds_alternative<Epsilon>(t)) {
                    eps_edges[from].push_back(to);
                } else if (const auto* a = std::get_if<InputSymbol>(&t)) {
                    input_edges[from].push_back({input_index.at(a->symbol), to});
                } else if (const auto* op = std::get_if<StackOp>(&t)) {
                    auto& edges = op->is_push() ? push_edges : pop_edges;
                    edges[from].push_back({stack_index.at(op->symbol), to});
                }
            }
        }
    }

    std::size_t size() const { return names.size(); }

    std::vector<int> encode(const Word& x) const {
        std::vector<int> out;
        out.reserve(x.size());
        for (const auto& a : x) out.push_back(input_index.at(a));
        return out;
    }
};

}  // namespace sm::detail
