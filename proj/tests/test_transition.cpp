#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "catgen/transition.hpp"
#include "test_util.hpp"

using namespace catgen;

namespace {

std::vector<std::string> action_strs(const std::vector<Action>& actions) {
    std::vector<std::string> out;
    for (const auto& a : actions) out.push_back(a.str());
    return out;
}

TransitionState replay(const std::vector<Action>& actions) {
    TransitionState s = initial_state();
    for (const auto& a : actions) s = apply(s, a);
    return s;
}

const std::vector<AtomicCategory> kAtomsNNP = {AtomicCategory("N"), AtomicCategory("NP")};

}  // namespace

TEST_CASE("initial state") {
    auto s = initial_state();
    CHECK(s.stack.empty());
    CHECK(s.buffer.empty());
    CHECK(s.timestep == 0);
    CHECK(!s.terminated);
    // only gen is legal at the axiom
    auto legal = legal_actions(s, kAtomsNNP);
    REQUIRE(legal.size() == 2);
    for (const auto& a : legal) CHECK(a.kind == Action::Kind::Gen);
}

TEST_CASE("legal action side conditions") {
    auto s = apply(initial_state(), Action::gen(AtomicCategory("S")));
    CHECK(action_strs(legal_actions(s, {AtomicCategory("S")})) ==
          std::vector<std::string>{"op(/)", "op(\\)", "stop"});

    s = apply(s, Action::op(SlashOp::Backward));
    // top is an operator: gen is back, stop and reduce are not
    CHECK(action_strs(legal_actions(s, {AtomicCategory("NP")})) ==
          std::vector<std::string>{"gen(NP)"});

    s = apply(s, Action::gen(AtomicCategory("NP")));
    CHECK(action_strs(legal_actions(s, {AtomicCategory("NP")})) ==
          std::vector<std::string>{"op(/)", "op(\\)", "reduce"});
}

TEST_CASE("punctuation rules") {
    auto s = apply(initial_state(), Action::gen(AtomicCategory(",")));
    CHECK(s.punct_generated);
    CHECK(action_strs(legal_actions(s, kAtomsNNP)) == std::vector<std::string>{"stop"});

    // punctuation cannot be generated on a nonempty stack
    auto t = apply(initial_state(), Action::gen(AtomicCategory("S")));
    t = apply(t, Action::op(SlashOp::Forward));
    CHECK_THROWS_AS((void)apply(t, Action::gen(AtomicCategory(","))), IllegalActionError);
}

TEST_CASE("the full derivation of a transitive verb category") {
    std::vector<Action> actions = {
        Action::gen(AtomicCategory("S")), Action::op(SlashOp::Backward),
        Action::gen(AtomicCategory("NP")), Action::reduce(),
        Action::op(SlashOp::Forward), Action::gen(AtomicCategory("NP")),
        Action::reduce(), Action::stop()};
    auto s = replay(actions);
    CHECK(s.terminated);
    CHECK(s.timestep == 8);
    CHECK(result(s) == parse_category("(S\\NP)/NP"));
    REQUIRE(s.buffer.size() == 3);
    CHECK(s.buffer[0].str() == "S");
    CHECK(s.buffer[1].str() == "NP");
    CHECK(s.buffer[2].str() == "NP");
}

TEST_CASE("apply rejects illegal actions with the violated condition") {
    CHECK_THROWS_WITH_AS(
        (void)apply(apply(initial_state(), Action::gen(AtomicCategory("S"))), Action::reduce()),
        doctest::Contains("reduce requires"), IllegalActionError);
    CHECK_THROWS_AS((void)apply(initial_state(), Action::stop()), IllegalActionError);
    CHECK_THROWS_AS((void)apply(initial_state(), Action::op(SlashOp::Forward)),
                    IllegalActionError);
    auto done = replay({Action::gen(AtomicCategory("N")), Action::stop()});
    CHECK(result(done) == parse_category("N"));
    CHECK(legal_actions(done, kAtomsNNP).empty());
    CHECK_THROWS_AS((void)apply(done, Action::gen(AtomicCategory("N"))), IllegalActionError);
}

TEST_CASE("apply honors the action cap") {
    TransitionState s = initial_state();
    s = apply(s, Action::gen(AtomicCategory("N")), 1);
    CHECK_THROWS_WITH_AS((void)apply(s, Action::stop(), 1), doctest::Contains("action cap"),
                         IllegalActionError);
}

TEST_CASE("result requires termination") {
    CHECK_THROWS_AS((void)result(initial_state()), std::runtime_error);
}

TEST_CASE("oracle action sequences") {
    CHECK(action_strs(oracle_actions(parse_category("(S\\NP)/NP"))) ==
          std::vector<std::string>{"gen(S)", "op(\\)", "gen(NP)", "reduce", "op(/)", "gen(NP)",
                                   "reduce", "stop"});
    CHECK(action_strs(oracle_actions(parse_category("N"))) ==
          std::vector<std::string>{"gen(N)", "stop"});
    CHECK(action_strs(oracle_actions(parse_category("(A/B)\\(C/D)"))) ==
          std::vector<std::string>{"gen(A)", "op(/)", "gen(B)", "reduce", "op(\\)", "gen(C)",
                                   "op(/)", "gen(D)", "reduce", "reduce", "stop"});
    // replay of the derived sequence reproduces the category
    Category c = parse_category("(A/B)\\(C/D)");
    CHECK(result(replay(oracle_actions(c))) == c);
}

TEST_CASE("oracle soundness and action count on fuzzed categories") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        Category c = testutil::random_category(rng, 5);
        auto actions = oracle_actions(c);
        std::size_t atoms = 0, ops = 0;
        for (const auto& a : actions) {
            if (a.kind == Action::Kind::Gen) ++atoms;
            if (a.kind == Action::Kind::Op) ++ops;
        }
        CHECK(actions.size() == atoms + 2 * ops + 1);
        TransitionState s = initial_state();
        for (const auto& a : actions) {
            s = apply(s, a, static_cast<int>(actions.size()));
            // the stack alternates operand/operator items
            for (std::size_t j = 1; j < s.stack.size(); ++j)
                CHECK(s.stack[j].is_operator != s.stack[j - 1].is_operator);
            CHECK((s.stack.empty() || !s.stack.front().is_operator));
        }
        CHECK(s.terminated);
        CHECK(result(s) == c);
        CHECK(s.buffer.size() == atoms);
    }
}

TEST_CASE("exhaustive enumeration is well-formed and covers small categories") {
    auto one = enumerate_terminated({AtomicCategory("N")}, 2);
    REQUIRE(one.size() == 1);
    CHECK(one[0].second == parse_category("N"));
    CHECK(action_strs(one[0].first) == std::vector<std::string>{"gen(N)", "stop"});

    auto six = enumerate_terminated({AtomicCategory("N")}, 6);
    std::set<std::string> cats;
    for (const auto& [seq, cat] : six) {
        // every result survives a parse/print roundtrip
        CHECK(parse_category(cat.str()) == cat);
        cats.insert(cat.str());
    }
    CHECK(cats.count("N"));
    CHECK(cats.count("N/N"));
    CHECK(cats.count("N\\N"));

    auto punct = enumerate_terminated({AtomicCategory(",")}, 6);
    REQUIRE(punct.size() == 1);
    CHECK(punct[0].second == parse_category(","));
}

TEST_CASE("punctuation never mixes with operators in terminated sequences") {
    auto all = enumerate_terminated({AtomicCategory("N"), AtomicCategory(",")}, 8);
    for (const auto& [seq, cat] : all) {
        bool has_punct = false, has_structure = false;
        for (const auto& a : seq) {
            if (a.kind == Action::Kind::Gen && a.atom.base == ",") has_punct = true;
            if (a.kind == Action::Kind::Op || a.kind == Action::Kind::Reduce)
                has_structure = true;
        }
        CHECK(!(has_punct && has_structure));
    }
}

TEST_CASE("apply is deterministic") {
    auto s = apply(initial_state(), Action::gen(AtomicCategory("S")));
    auto a = apply(s, Action::op(SlashOp::Forward));
    auto b = apply(s, Action::op(SlashOp::Forward));
    CHECK(a.render_stack() == b.render_stack());
    CHECK(a.timestep == b.timestep);
}

TEST_CASE("trace renders the figure layout") {
    std::string trace = render_trace(parse_category("(S\\NP)/NP"));
    std::vector<std::string> lines;
    std::istringstream in(trace);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 9);  // header + 8 steps
    CHECK(lines[0] == "T\tstack\tbuffer\taction");
    CHECK(lines[1] == "0\t\t\tgen(S)");
    CHECK(lines[2] == "1\tS\tS\top(\\)");
    CHECK(lines[5] == "4\tS\\NP\tS | NP\top(/)");
    CHECK(lines[8] == "7\t(S\\NP)/NP\tS | NP | NP\tstop");

    std::string tiny = render_trace(parse_category("N"));
    std::istringstream in2(tiny);
    int rows = 0;
    while (std::getline(in2, line)) ++rows;
    CHECK(rows == 3);  // header + 2 steps
}
