#include <doctest.h>

#include <cmath>

#include "catgen/rerank.hpp"
#include "test_util.hpp"

using namespace catgen;

namespace {

KBestEntry entry(const std::string& cat, double logprob, std::size_t m, bool legal = true) {
    KBestEntry e;
    e.legal = legal;
    if (legal) e.category = parse_category(cat);
    e.logprob = logprob;
    e.surfaces.assign(m, "t");
    return e;
}

ClassifierScores scores_over(const std::vector<std::pair<std::string, double>>& rows) {
    ClassifierScores s;
    s.floor_log = floored_log(0.0);
    for (const auto& [cat, lp] : rows) s.log_probs.emplace_back(parse_category(cat), lp);
    return s;
}

}  // namespace

TEST_CASE("generator confidence length normalization") {
    CHECK(generator_confidence(-2.0, 4, 0.0) == doctest::Approx(-2.0).epsilon(1e-12));
    // 4^0.15 evaluated independently: exp(0.15 * ln 4) = 1.2311444133449163
    CHECK(generator_confidence(-2.0, 4, 0.15) ==
          doctest::Approx(-2.0 / 1.2311444133449163).epsilon(1e-12));
    CHECK(generator_confidence(-3.7, 1, 0.15) == doctest::Approx(-3.7).epsilon(1e-12));
    CHECK(generator_confidence(-3.7, 1, 0.9) == doctest::Approx(-3.7).epsilon(1e-12));
    CHECK_THROWS_AS((void)generator_confidence(-1.0, 0, 0.15), std::invalid_argument);
}

TEST_CASE("defaults match the reference configuration") {
    CHECK(kDefaultLambda == 0.9);
    CHECK(kDefaultNu == 0.15);
}

TEST_CASE("lambda extremes degenerate to the pure rankings") {
    std::vector<SourceCandidates> sources = {
        {"g1", {entry("N", -1.0, 2), entry("N/N", -2.5, 4)}},
        {"g2", {entry("NP", -1.8, 2)}},
    };
    auto cls = scores_over({{"N", -3.0}, {"N/N", -0.1}, {"NP", -2.0}});

    // lambda = 1: best u wins; all u = logprob / m^nu with nu = 0
    auto best_u = rerank_position(sources, cls, 1.0, 0.0);
    CHECK(best_u.category == parse_category("N"));
    CHECK(best_u.u == doctest::Approx(-1.0));
    CHECK(!best_u.fallback);

    // lambda = 0: classifier argmax restricted to the pool
    auto best_v = rerank_position(sources, cls, 0.0, 0.0);
    CHECK(best_v.category == parse_category("N/N"));
    CHECK(best_v.v == doctest::Approx(-0.1));
}

TEST_CASE("out-of-inventory candidates score at the probability floor") {
    std::vector<SourceCandidates> sources = {
        {"g", {entry("(A\\B)/B", -0.5, 8), entry("A", -4.0, 2)}}};
    auto cls = scores_over({{"A", -0.2}});
    auto out = rerank_position(sources, cls, 1.0, 0.0);
    CHECK(out.category == parse_category("(A\\B)/B"));
    CHECK(out.v == doctest::Approx(std::log(1e-12)));
    // with lambda = 0 the unseen category cannot win
    auto cls_only = rerank_position(sources, cls, 0.0, 0.0);
    CHECK(cls_only.category == parse_category("A"));
}

TEST_CASE("duplicates across sources keep the best combined score") {
    std::vector<SourceCandidates> sources = {
        {"g1", {entry("N", -3.0, 2)}},
        {"g2", {entry("N", -1.0, 2)}},
    };
    auto cls = scores_over({{"N", -0.5}});
    auto out = rerank_position(sources, cls, 1.0, 0.0);
    CHECK(out.category == parse_category("N"));
    CHECK(out.u == doctest::Approx(-1.0));
    CHECK(out.source == "g2");
}

TEST_CASE("empty legal pool falls back to the classifier argmax flagged") {
    std::vector<SourceCandidates> sources = {{"g", {entry("", -1.0, 2, false)}}};
    auto cls = scores_over({{"N", -1.5}, {"NP", -0.4}});
    auto out = rerank_position(sources, cls, 0.9, 0.15);
    CHECK(out.fallback);
    CHECK(out.source == "classifier");
    CHECK(out.category == parse_category("NP"));
}

TEST_CASE("adding a constant to every u or v leaves the winner unchanged") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-6.0, -0.1);
    const std::vector<std::string> cats = {"N", "NP", "N/N", "NP\\NP", "S"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SourceCandidates> sources(1);
        sources[0].source = "g";
        // one tag per candidate so that a shift of the logprob is a uniform
        // shift of u
        for (const auto& c : cats) sources[0].entries.push_back(entry(c, u(rng), 1));
        std::vector<std::pair<std::string, double>> rows;
        for (const auto& c : cats) rows.emplace_back(c, u(rng));
        auto cls = scores_over(rows);

        auto base = rerank_position(sources, cls, 0.7, 0.0);
        auto shifted_sources = sources;
        for (auto& e : shifted_sources[0].entries) e.logprob += 2.5;
        auto shifted_u = rerank_position(shifted_sources, cls, 0.7, 0.0);
        CHECK(shifted_u.category == base.category);

        auto shifted_rows = rows;
        for (auto& [c, lp] : shifted_rows) lp -= 1.3;
        auto shifted_v = rerank_position(sources, scores_over(shifted_rows), 0.7, 0.0);
        CHECK(shifted_v.category == base.category);
    }
}

TEST_CASE("pooling more candidates never lowers the winning score") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-6.0, -0.1);
    const std::vector<std::string> cats = {"N", "NP", "N/N", "NP\\NP", "S", "S/NP"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<SourceCandidates> full(1);
        full[0].source = "g";
        for (const auto& c : cats)
            full[0].entries.push_back(entry(c, u(rng), 1 + static_cast<std::size_t>(rng() % 3)));
        std::vector<std::pair<std::string, double>> rows;
        for (const auto& c : cats) rows.emplace_back(c, u(rng));
        auto cls = scores_over(rows);

        auto sub = full;
        sub[0].entries.resize(3);
        auto full_win = rerank_position(full, cls, 0.8, 0.15);
        auto sub_win = rerank_position(sub, cls, 0.8, 0.15);
        CHECK(full_win.combined >= sub_win.combined - 1e-12);
    }
}

TEST_CASE("ties break on the canonical category string") {
    std::vector<SourceCandidates> sources = {
        {"g", {entry("NP", -1.0, 1), entry("N", -1.0, 1)}}};
    auto cls = scores_over({{"N", -1.0}, {"NP", -1.0}});
    auto out = rerank_position(sources, cls, 0.5, 0.0);
    CHECK(out.category == parse_category("N"));
}

TEST_CASE("lambda is validated") {
    auto cls = scores_over({{"N", -1.0}});
    CHECK_THROWS_AS((void)rerank_position({}, cls, 1.5, 0.15), std::invalid_argument);
}
