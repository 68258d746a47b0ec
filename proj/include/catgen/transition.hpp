#ifndef CATGEN_TRANSITION_HPP
#define CATGEN_TRANSITION_HPP

// In-order transition system building categories through gen/op/reduce/stop
// actions. Every terminated action sequence yields a well-formed category;
// legality checking enforces stack alternation and the punctuation rules.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catgen/category.hpp"

namespace catgen {

struct Action {
    enum class Kind : unsigned char { Gen, Op, Reduce, Stop };

    Kind kind = Kind::Stop;
    AtomicCategory atom;  // Gen payload
    SlashOp slash = SlashOp::Forward;  // Op payload

    static Action gen(AtomicCategory a) { return {Kind::Gen, std::move(a), SlashOp::Forward}; }
    static Action op(SlashOp s) { return {Kind::Op, {}, s}; }
    static Action reduce() { return {Kind::Reduce, {}, SlashOp::Forward}; }
    static Action stop() { return {Kind::Stop, {}, SlashOp::Forward}; }

    // "gen(S[dcl])", "op(/)", "reduce", "stop"
    std::string str() const;

    bool operator==(const Action& o) const;
};

struct StackItem {
    bool is_operator = false;
    SlashOp op = SlashOp::Forward;  // operator item
    Category value;                 // leaf or subtree item

    std::string str() const;
};

struct TransitionState {
    std::vector<StackItem> stack;
    std::vector<AtomicCategory> buffer;  // atoms generated so far
    int timestep = 0;
    bool terminated = false;
    bool punct_generated = false;
    std::optional<Action> last_action;  // feature plumbing for scorers

    std::string render_stack() const;   // items joined with " | "
    std::string render_buffer() const;
};

class IllegalActionError : public std::runtime_error {
public:
    explicit IllegalActionError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kDefaultActionCap = 64;

TransitionState initial_state();

// The actions whose deduction-rule side conditions hold in s, in a fixed
// order: gen per atom (input order), op(/), op(\), reduce, stop. Terminated
// states admit nothing.
std::vector<Action> legal_actions(const TransitionState& s,
                                  const std::vector<AtomicCategory>& atoms,
                                  const std::vector<std::string>& punct = default_punctuation());

bool is_legal(const TransitionState& s, const Action& a,
              const std::vector<std::string>& punct = default_punctuation());

// Applies a, returning the successor state. Throws IllegalActionError naming
// the violated side condition, or when timestep would exceed max_actions.
TransitionState apply(const TransitionState& s, const Action& a,
                      int max_actions = kDefaultActionCap,
                      const std::vector<std::string>& punct = default_punctuation());

// The single stack item of a terminated state.
Category result(const TransitionState& s);

// The unique derivation of c: in-order traversal emitting gen at atoms and
// op/reduce around subtrees, followed by stop.
std::vector<Action> oracle_actions(const Category& c);

// Exhaustive DFS over legal actions up to max_actions, returning every
// terminated sequence with its category, in deterministic order.
std::vector<std::pair<std::vector<Action>, Category>> enumerate_terminated(
    const std::vector<AtomicCategory>& atoms, int max_actions,
    const std::vector<std::string>& punct = default_punctuation());

// Tab-separated trace of oracle_actions(c): timestep, stack, buffer, action.
std::string render_trace(const Category& c);

}  // namespace catgen

#endif
