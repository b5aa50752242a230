#include "sm/convert.hpp"

namespace sm {

PdaII pda1_to_pda2(const PdaI& m) {
    require_valid(m);
    PdaII out;
    out.input = m.input;
    out.stack = m.stack;
    out.states = m.states;

    std::set<std::string> taken = m.states;
    auto fresh = [&](const std::string& base) {
        auto name = fresh_name(base, taken);
        taken.insert(name);
        out.states.insert(name);
        return name;
    };

    out.initial = fresh("qN");
    out.add(out.initial, StackOp::push(m.initial_stack), m.initial);

    std::size_t index = 0;
    for (const auto& t : m.delta) {
        const std::string prefix = "t" + std::to_string(index++) + ".";
        const std::size_t n = t.push.size();
        std::vector<State> aux;
        for (std::size_t k = 0; k <= n; ++k) aux.push_back(fresh(prefix + std::to_string(k)));

        out.add(t.from, t.input ? input(*t.input) : epsilon(), aux[0]);
        out.add(aux[0], StackOp::pop(t.top), n == 0 ? t.to : aux[1]);
        // push X_n first so X_1 ends on top
        for (std::size_t k = 1; k <= n; ++k) {
            const Symbol& pushed = t.push[n - k];
            out.add(aux[k], StackOp::push(pushed), k == n ? t.to : aux[k + 1]);
        }
    }

    State drain = fresh("qF");
    for (const auto& f : m.accepting) out.add(f, epsilon(), drain);
    std::set<Symbol> drainable = m.stack;
    drainable.insert(m.initial_stack);
    for (const auto& x : drainable) out.add(drain, StackOp::pop(x), drain);
    out.accepting = {drain};
    return out;
}

PdaI pda2_to_pda1(const PdaII& m, const std::optional<Symbol>& sentinel) {
    require_valid(m);
    std::set<std::string> names = m.stack;
    names.insert(m.input.begin(), m.input.end());
    Symbol bottom;
    if (sentinel) {
        if (names.contains(*sentinel))
            throw ValidationError("sentinel '" + *sentinel +
                                  "' is already used by the machine's alphabets; choose a different sentinel");
        if (!is_valid_name(*sentinel)) throw ValidationError("sentinel '" + *sentinel + "' is not a valid name");
        bottom = *sentinel;
    } else {
        bottom = fresh_name("Z0", names);
    }

    PdaI out;
    out.states = m.states;
    out.input = m.input;
    out.stack = m.stack;
    out.stack.insert(bottom);
    out.initial = m.initial;
    out.initial_stack = bottom;

    for (const auto& [key, image] : m.delta) {
        const auto& [from, token] = key;
        for (const auto& to : image) {
            if (const auto* op = std::get_if<StackOp>(&token)) {
                if (op->is_push()) {
                    for (const auto& x : out.stack) out.delta.insert({from, std::nullopt, x, to, {op->symbol, x}});
                } else {
                    out.delta.insert({from, std::nullopt, op->symbol, to, {}});
                }
                continue;
            }
            std::optional<Symbol> a;
            if (const auto* s = std::get_if<InputSymbol>(&token)) a = s->symbol;
            for (const auto& x : out.stack) out.delta.insert({from, a, x, to, {x}});
        }
    }

    State accept = fresh_name("qacc", m.states);
    out.states.insert(accept);
    for (const auto& f : m.accepting) out.delta.insert({f, std::nullopt, bottom, accept, {bottom}});
    out.accepting = {accept};
    return out;
}

}  // namespace sm
