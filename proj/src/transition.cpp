#include "catgen/transition.hpp"

namespace catgen {

std::string Action::str() const {
    switch (kind) {
        case Kind::Gen: return "gen(" + atom.str() + ")";
        case Kind::Op: return std::string("op(") + slash_char(slash) + ")";
        case Kind::Reduce: return "reduce";
        case Kind::Stop: return "stop";
    }
    return "?";
}

bool Action::operator==(const Action& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Gen) return atom == o.atom;
    if (kind == Kind::Op) return slash == o.slash;
    return true;
}

std::string StackItem::str() const {
    if (is_operator) return std::string(1, slash_char(op));
    return value.str();
}

std::string TransitionState::render_stack() const {
    std::string out;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        if (i) out += " | ";
        out += stack[i].str();
    }
    return out;
}

std::string TransitionState::render_buffer() const {
    std::string out;
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        if (i) out += " | ";
        out += buffer[i].str();
    }
    return out;
}

TransitionState initial_state() { return TransitionState{}; }

namespace {

bool top_is_operator(const TransitionState& s) {
    return !s.stack.empty() && s.stack.back().is_operator;
}

// Returns the violated side condition, or nullptr when a is legal in s.
const char* legality_violation(const TransitionState& s, const Action& a,
                               const std::vector<std::string>& punct) {
    if (s.terminated) return "state is terminated";
    if (s.punct_generated && a.kind != Action::Kind::Stop)
        return "only stop is legal after a punctuation atom";
    switch (a.kind) {
        case Action::Kind::Gen:
            if (!s.stack.empty() && !top_is_operator(s))
                return "gen requires an empty stack or an operator on top";
            if (is_punctuation_base(a.atom.base, punct) && !s.stack.empty())
                return "punctuation atoms can only be generated on an empty stack";
            return nullptr;
        case Action::Kind::Op:
            if (s.stack.empty() || top_is_operator(s))
                return "op requires a non-operator on top of the stack";
            return nullptr;
        case Action::Kind::Reduce: {
            std::size_t n = s.stack.size();
            if (n < 3 || s.stack[n - 1].is_operator || !s.stack[n - 2].is_operator ||
                s.stack[n - 3].is_operator)
                return "reduce requires (category, operator, category) on top of the stack";
            return nullptr;
        }
        case Action::Kind::Stop:
            if (s.stack.size() != 1 || s.stack.front().is_operator)
                return "stop requires a single non-operator stack item";
            return nullptr;
    }
    return "unknown action";
}

}  // namespace

bool is_legal(const TransitionState& s, const Action& a, const std::vector<std::string>& punct) {
    return legality_violation(s, a, punct) == nullptr;
}

std::vector<Action> legal_actions(const TransitionState& s,
                                  const std::vector<AtomicCategory>& atoms,
                                  const std::vector<std::string>& punct) {
    std::vector<Action> out;
    if (s.terminated) return out;
    for (const auto& a : atoms) {
        Action act = Action::gen(a);
        if (is_legal(s, act, punct)) out.push_back(std::move(act));
    }
    for (SlashOp op : {SlashOp::Forward, SlashOp::Backward}) {
        Action act = Action::op(op);
        if (is_legal(s, act, punct)) out.push_back(std::move(act));
    }
    if (is_legal(s, Action::reduce(), punct)) out.push_back(Action::reduce());
    if (is_legal(s, Action::stop(), punct)) out.push_back(Action::stop());
    return out;
}

TransitionState apply(const TransitionState& s, const Action& a, int max_actions,
                      const std::vector<std::string>& punct) {
    if (s.timestep >= max_actions)
        throw IllegalActionError("action cap exceeded (" + std::to_string(max_actions) + ")");
    if (const char* why = legality_violation(s, a, punct))
        throw IllegalActionError(std::string("illegal ") + a.str() + ": " + why);
    TransitionState next = s;
    switch (a.kind) {
        case Action::Kind::Gen:
            next.stack.push_back(StackItem{false, SlashOp::Forward, Category::atom(a.atom)});
            next.buffer.push_back(a.atom);
            if (is_punctuation_base(a.atom.base, punct)) next.punct_generated = true;
            break;
        case Action::Kind::Op:
            next.stack.push_back(StackItem{true, a.slash, Category()});
            break;
        case Action::Kind::Reduce: {
            StackItem arg = next.stack.back();
            next.stack.pop_back();
            StackItem op = next.stack.back();
            next.stack.pop_back();
            StackItem res = next.stack.back();
            next.stack.pop_back();
            next.stack.push_back(
                StackItem{false, SlashOp::Forward,
                          Category::complex(res.value, op.op, arg.value)});
            break;
        }
        case Action::Kind::Stop:
            next.terminated = true;
            break;
    }
    next.timestep = s.timestep + 1;
    next.last_action = a;
    return next;
}

Category result(const TransitionState& s) {
    if (!s.terminated) throw std::runtime_error("state is not terminated");
    return s.stack.front().value;
}

namespace {

void oracle_rec(const Category& c, std::vector<Action>& out) {
    if (c.is_atom()) {
        out.push_back(Action::gen(c.atom_value()));
        return;
    }
    oracle_rec(c.result(), out);
    out.push_back(Action::op(c.op()));
    oracle_rec(c.argument(), out);
    out.push_back(Action::reduce());
}

void enumerate_rec(const TransitionState& s, const std::vector<AtomicCategory>& atoms,
                   int max_actions, const std::vector<std::string>& punct,
                   std::vector<Action>& prefix,
                   std::vector<std::pair<std::vector<Action>, Category>>& out) {
    if (s.timestep >= max_actions) return;
    for (const auto& a : legal_actions(s, atoms, punct)) {
        TransitionState next = apply(s, a, max_actions, punct);
        prefix.push_back(a);
        if (next.terminated)
            out.emplace_back(prefix, result(next));
        else
            enumerate_rec(next, atoms, max_actions, punct, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<Action> oracle_actions(const Category& c) {
    std::vector<Action> out;
    oracle_rec(c, out);
    out.push_back(Action::stop());
    return out;
}

std::vector<std::pair<std::vector<Action>, Category>> enumerate_terminated(
    const std::vector<AtomicCategory>& atoms, int max_actions,
    const std::vector<std::string>& punct) {
    if (max_actions < 2) throw std::invalid_argument("max_actions must be >= 2");
    std::vector<std::pair<std::vector<Action>, Category>> out;
    std::vector<Action> prefix;
    enumerate_rec(initial_state(), atoms, max_actions, punct, prefix, out);
    return out;
}

std::string render_trace(const Category& c) {
    std::string out = "T\tstack\tbuffer\taction\n";
    TransitionState s = initial_state();
    auto actions = oracle_actions(c);
    int cap = static_cast<int>(actions.size());
    for (const auto& a : actions) {
        out += std::to_string(s.timestep);
        out += '\t';
        out += s.render_stack();
        out += '\t';
        out += s.render_buffer();
        out += '\t';
        out += a.str();
        out += '\n';
        s = apply(s, a, cap);
    }
    return out;
}

}  // namespace catgen
