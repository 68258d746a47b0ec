#ifndef CATGEN_RERANK_HPP
#define CATGEN_RERANK_HPP

// Combines k-best generator confidence with classifier confidence:
// combined = lambda * u + (1 - lambda) * v, where u is the length-normalized
// sum of step log-probabilities and v the classifier log-probability.

#include <string>
#include <vector>

#include "catgen/decode.hpp"

namespace catgen {

inline constexpr double kDefaultLambda = 0.9;
inline constexpr double kDefaultNu = 0.15;

struct ScoredCandidate {
    Category category;
    double u = 0.0;
    double v = 0.0;
    double combined = 0.0;
    std::string source;     // generator name, or "classifier" on fallback
    bool fallback = false;  // true when no legal generator candidate existed
};

// u = (sum of step log-probabilities) / m^nu with m = |tags| (EOS included).
double generator_confidence(double logprob_sum, std::size_t m, double nu);

// One generator's candidates for a single position.
struct SourceCandidates {
    std::string source;
    std::vector<KBestEntry> entries;
};

// Classifier log-probabilities over the inventory; categories outside it
// score at the probability floor.
struct ClassifierScores {
    std::vector<std::pair<Category, double>> log_probs;  // inventory order
    double floor_log = 0.0;                              // floored_log(0)

    static ClassifierScores from_distribution(const LabelInventory& inv,
                                              const std::vector<double>& probs);
    double score(const Category& c) const;
    ScoredCandidate argmax() const;
};

// Pools legal candidates across sources, deduplicates by category keeping the
// best combined score, and returns the argmax (ties by canonical string).
// An empty legal pool falls back to the classifier argmax, flagged.
ScoredCandidate rerank_position(const std::vector<SourceCandidates>& sources,
                                const ClassifierScores& classifier, double lambda, double nu);

}  // namespace catgen

#endif
