#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "catgen/oracle.hpp"
#include "test_util.hpp"

using namespace catgen;

namespace {

std::vector<std::string> surfaces_of(const std::vector<int>& seq, const TagVocabulary& v) {
    return tag_surfaces(seq, v);
}

TagVocabulary vocab_for(const std::vector<std::pair<std::string, long>>& rows, OracleSpec spec,
                        long threshold = 1) {
    return TagVocabulary::build(testutil::make_inventory(rows, threshold), spec);
}

}  // namespace

TEST_CASE("AC vocabulary is atoms plus structural tokens plus EOS") {
    auto vocab = vocab_for({{"(NP\\NP)/NP", 5}}, OracleSpec{OracleKind::AC});
    std::vector<std::string> got;
    for (const auto& t : vocab.tags()) got.push_back(t.surface);
    std::sort(got.begin(), got.end());
    std::vector<std::string> want = {"(", ")", "/", "EOS", "NP", "\\"};
    CHECK(got == want);
    CHECK(vocab.tag(vocab.eos_id()).span.empty());
}

TEST_CASE("PA keeps the top-k parenthesized expressions by corpus weight") {
    // NP\NP occurs inside a category seen 9 times, S\NP inside one seen 5 times
    auto vocab = vocab_for({{"(NP\\NP)/NP", 9}, {"(S\\NP)/NP", 5}},
                           OracleSpec{OracleKind::PA, 1});
    CHECK(vocab.find_surface("NP\\NP") >= 0);
    CHECK(vocab.find_surface("S\\NP") == -1);
    int id = vocab.find_surface("NP\\NP");
    CHECK(vocab.tag(id).span == TokenSequence{"NP", "\\", "NP"});

    // weight flipped
    auto vocab2 = vocab_for({{"(NP\\NP)/NP", 5}, {"(S\\NP)/NP", 9}},
                            OracleSpec{OracleKind::PA, 1});
    CHECK(vocab2.find_surface("S\\NP") >= 0);
    CHECK(vocab2.find_surface("NP\\NP") == -1);
}

TEST_CASE("PA enumerates nested parenthesized subcategories") {
    // ((A/B)\C)/D has parenthesized subtrees (A/B)\C and A/B
    auto vocab = vocab_for({{"((A/B)\\C)/D", 2}}, OracleSpec{OracleKind::PA, 10});
    CHECK(vocab.find_surface("A/B") >= 0);
    CHECK(vocab.find_surface("(A/B)\\C") >= 0);
    CHECK(vocab.find_surface("((A/B)\\C)/D") == -1);  // the root is not parenthesized
}

TEST_CASE("NG takes the most frequent token n-grams with deterministic ties") {
    auto inv = testutil::make_inventory({{"(S\\NP)/NP", 7}});
    // independent oracle: enumerate all bigrams of the token sequence
    TokenSequence toks = tokenize(inv.categories()[0]);
    std::map<std::string, std::pair<std::vector<std::string>, long>> counts;
    for (std::size_t i = 0; i + 2 <= toks.size(); ++i) {
        std::vector<std::string> span(toks.begin() + i, toks.begin() + i + 2);
        std::string key = span[0] + span[1];
        counts[key].first = span;
        counts[key].second += 7;
    }
    REQUIRE(counts.size() == 6);
    std::vector<std::pair<std::string, long>> ranked;
    for (const auto& [k, v] : counts) ranked.emplace_back(k, v.second);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    auto vocab = TagVocabulary::build(inv, OracleSpec{OracleKind::NG, 3, 2});
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(vocab.find_surface(ranked[i].first) >= 0);
    for (std::size_t i = 3; i < ranked.size(); ++i)
        CHECK(vocab.find_surface(ranked[i].first) == -1);
}

TEST_CASE("NG with n above every token length degenerates to AC") {
    auto ac = vocab_for({{"N/N", 3}, {"NP", 2}}, OracleSpec{OracleKind::AC});
    auto ng = vocab_for({{"N/N", 3}, {"NP", 2}}, OracleSpec{OracleKind::NG, 10, 9});
    CHECK(ac.size() == ng.size());
}

TEST_CASE("k larger than the candidate pool keeps all candidates") {
    auto vocab = vocab_for({{"(S\\NP)/NP", 7}}, OracleSpec{OracleKind::NG, 500, 2});
    CHECK(vocab.size() == 6 + 1 + 6);  // EOS + 4 structural + S,NP + 6 bigrams
}

TEST_CASE("OR adds whole categories as single tags") {
    auto vocab = vocab_for({{"(S\\NP)/NP", 5}, {"NP", 9}}, OracleSpec{OracleKind::OR});
    int id = vocab.find_surface("(S\\NP)/NP");
    REQUIRE(id >= 0);
    CHECK(vocab.tag(id).span.size() == 7);
    // atomic inventory category dedupes against its AC tag
    int np = vocab.find_surface("NP");
    REQUIRE(np >= 0);
    CHECK(vocab.tag(np).span == TokenSequence{"NP"});
}

TEST_CASE("deterministic decomposition performs longest forward match") {
    auto ac = vocab_for({{"(NP\\NP)/NP", 5}, {"N", 3}}, OracleSpec{OracleKind::AC});
    CHECK(surfaces_of(decompose_deterministic(parse_category("(NP\\NP)/NP"), ac), ac) ==
          std::vector<std::string>{"(", "NP", "\\", "NP", ")", "/", "NP", "EOS"});
    CHECK(surfaces_of(decompose_deterministic(parse_category("N"), ac), ac) ==
          std::vector<std::string>{"N", "EOS"});

    auto pa = vocab_for({{"(NP/NP)\\NP", 5}}, OracleSpec{OracleKind::PA, 10});
    REQUIRE(pa.find_surface("NP/NP") >= 0);
    CHECK(surfaces_of(decompose_deterministic(parse_category("(NP/NP)\\NP"), pa), pa) ==
          std::vector<std::string>{"(", "NP/NP", ")", "\\", "NP", "EOS"});
}

TEST_CASE("decompose_all enumerates every segmentation, deterministic first") {
    auto pa = vocab_for({{"(NP/NP)\\NP", 5}}, OracleSpec{OracleKind::PA, 10});
    auto all = decompose_all(parse_category("(NP/NP)\\NP"), pa, 100);
    REQUIRE(all.size() == 2);
    CHECK(surfaces_of(all[0], pa) ==
          std::vector<std::string>{"(", "NP/NP", ")", "\\", "NP", "EOS"});
    CHECK(surfaces_of(all[1], pa) ==
          std::vector<std::string>{"(", "NP", "/", "NP", ")", "\\", "NP", "EOS"});
    CHECK(all[0] == decompose_deterministic(parse_category("(NP/NP)\\NP"), pa));

    auto ac = vocab_for({{"N", 5}}, OracleSpec{OracleKind::AC});
    CHECK(decompose_all(parse_category("N"), ac, 100).size() == 1);

    auto orv = vocab_for({{"(S\\NP)/NP", 5}}, OracleSpec{OracleKind::OR});
    auto seqs = decompose_all(parse_category("(S\\NP)/NP"), orv, 100);
    bool has_single = false, has_full = false;
    for (const auto& s : seqs) {
        if (s.size() == 2) has_single = true;
        if (s.size() == 8) has_full = true;
    }
    CHECK(has_single);
    CHECK(has_full);

    // limit truncation
    CHECK(decompose_all(parse_category("(S\\NP)/NP"), orv, 1).size() == 1);
}

TEST_CASE("sampling is uniform over segmentations and seed-stable") {
    auto pa = vocab_for({{"(NP/NP)\\NP", 5}}, OracleSpec{OracleKind::PA, 10});
    Category c = parse_category("(NP/NP)\\NP");
    int first = 0;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
        auto seq = sample_decomposition(c, pa, static_cast<std::uint64_t>(seed));
        if (seq.size() == 6) ++first;
    }
    double frac = static_cast<double>(first) / trials;
    CHECK(frac > 0.48);
    CHECK(frac < 0.52);

    CHECK(sample_decomposition(c, pa, 42) == sample_decomposition(c, pa, 42));

    auto ac = vocab_for({{"(NP/NP)\\NP", 5}}, OracleSpec{OracleKind::AC});
    for (int seed = 0; seed < 20; ++seed)
        CHECK(sample_decomposition(c, ac, static_cast<std::uint64_t>(seed)) ==
              decompose_deterministic(c, ac));
}

TEST_CASE("reassemble inverts decomposition and flags ill-formed sequences") {
    auto ac = vocab_for({{"(NP\\NP)/NP", 5}}, OracleSpec{OracleKind::AC});
    Category c = parse_category("(NP\\NP)/NP");
    CHECK(reassemble(decompose_deterministic(c, ac), ac) == c);

    std::vector<int> np_only = {ac.find_surface("NP"), ac.eos_id()};
    CHECK(reassemble(np_only, ac) == parse_category("NP"));

    std::vector<int> bad = {ac.find_surface("/"), ac.find_surface("NP"), ac.eos_id()};
    CHECK_THROWS_AS((void)reassemble(bad, ac), IllFormedError);

    CHECK_THROWS_AS((void)reassemble({ac.find_surface("NP")}, ac), std::invalid_argument);
}

TEST_CASE("vocabulary serialization roundtrips") {
    auto vocab = vocab_for({{"(S\\NP)/NP", 7}, {"S[dcl]\\NP", 9}},
                           OracleSpec{OracleKind::NG, 4, 2});
    std::string text = vocab.serialize();
    CHECK(text.rfind("kind=NG n=2 k=4\n", 0) == 0);
    CHECK(text.find("EOS\t\n") != std::string::npos);
    std::istringstream in(text);
    auto loaded = TagVocabulary::deserialize(in);
    CHECK(loaded.serialize() == text);
    CHECK(loaded.fingerprint() == vocab.fingerprint());
    CHECK(loaded.origin().kind == OracleKind::NG);
    CHECK(loaded.origin().n == 2);
    CHECK(loaded.origin().k == 4);
}

TEST_CASE("oracle inversion properties on fuzzed categories") {
    std::mt19937_64 rng(13);
    std::vector<std::pair<Category, long>> counts;
    std::vector<std::string> seen;
    while (counts.size() < 40) {
        Category c = testutil::random_category(rng, 4);
        if (std::find(seen.begin(), seen.end(), c.str()) != seen.end()) continue;
        seen.push_back(c.str());
        counts.emplace_back(c, 10 + static_cast<long>(rng() % 100));
    }
    auto inv = LabelInventory::from_counts(counts, 1);

    std::vector<OracleSpec> specs = {
        {OracleKind::AC, 10, 2, true},
        {OracleKind::PA, 10, 2, true},
        {OracleKind::NG, 10, 2, true},
        {OracleKind::NG, 10, 3, true},
        {OracleKind::OR, 10, 2, true},
    };
    for (const auto& spec : specs) {
        auto vocab = TagVocabulary::build(inv, spec);
        for (const auto& c : inv.categories()) {
            auto det = decompose_deterministic(c, vocab);
            CHECK(reassemble(det, vocab) == c);
            auto all = decompose_all(c, vocab, 50);
            CHECK(!all.empty());
            CHECK(all.front() == det);
            for (const auto& seq : all) CHECK(reassemble(seq, vocab) == c);
            if (spec.kind == OracleKind::AC) CHECK(all.size() == 1);
            if (spec.kind == OracleKind::OR) CHECK(det.size() == 2);

            // longest-match optimality: no tag matches a strictly longer
            // prefix than the chosen one at any step
            TokenSequence toks = tokenize(c);
            std::size_t pos = 0;
            for (std::size_t j = 0; j + 1 < det.size(); ++j) {
                std::size_t chosen_len = vocab.tag(det[j]).span.size();
                for (const auto& t : vocab.tags()) {
                    if (t.span.size() <= chosen_len || t.span.size() > toks.size() - pos)
                        continue;
                    CHECK(!std::equal(t.span.begin(), t.span.end(),
                                      toks.begin() + static_cast<long>(pos)));
                }
                pos += chosen_len;
            }
        }
    }

    // monotonicity: a superset vocabulary never has fewer segmentations
    auto ac = TagVocabulary::build(inv, specs[0]);
    auto pa = TagVocabulary::build(inv, specs[1]);
    for (const auto& c : inv.categories()) {
        auto nac = decompose_all(c, ac, 2000).size();
        auto npa = decompose_all(c, pa, 2000).size();
        CHECK(nac <= npa);
    }
}
