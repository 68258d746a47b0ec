#include "catgen/rerank.hpp"

#include <cmath>
#include <map>

namespace catgen {

double generator_confidence(double logprob_sum, std::size_t m, double nu) {
    if (m < 1) throw std::invalid_argument("tag sequence must be nonempty");
    return logprob_sum / std::pow(static_cast<double>(m), nu);
}

ClassifierScores ClassifierScores::from_distribution(const LabelInventory& inv,
                                                     const std::vector<double>& probs) {
    if (probs.size() != inv.size())
        throw std::invalid_argument("distribution does not match inventory");
    ClassifierScores out;
    out.floor_log = floored_log(0.0);
    out.log_probs.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        out.log_probs.emplace_back(inv.categories()[i], floored_log(probs[i]));
    return out;
}

double ClassifierScores::score(const Category& c) const {
    for (const auto& [cat, lp] : log_probs)
        if (cat == c) return lp;
    return floor_log;
}

ScoredCandidate ClassifierScores::argmax() const {
    if (log_probs.empty()) throw std::runtime_error("empty classifier score table");
    const std::pair<Category, double>* best = &log_probs.front();
    for (const auto& entry : log_probs)
        if (entry.second > best->second) best = &entry;
    ScoredCandidate out;
    out.category = best->first;
    out.v = best->second;
    out.combined = best->second;
    out.source = "classifier";
    out.fallback = true;
    return out;
}

ScoredCandidate rerank_position(const std::vector<SourceCandidates>& sources,
                                const ClassifierScores& classifier, double lambda, double nu) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");

    // category canonical -> best candidate so far; duplicates across sources
    // keep the higher combined score
    std::map<std::string, ScoredCandidate> pool;
    for (const auto& src : sources) {
        for (const auto& entry : src.entries) {
            if (!entry.legal) continue;
            ScoredCandidate cand;
            cand.category = entry.category;
            cand.u = generator_confidence(entry.logprob, entry.surfaces.size(), nu);
            cand.v = classifier.score(entry.category);
            cand.combined = lambda * cand.u + (1.0 - lambda) * cand.v;
            cand.source = src.source;
            auto [it, inserted] = pool.emplace(entry.category.str(), cand);
            if (!inserted && cand.combined > it->second.combined) it->second = cand;
        }
    }
    if (pool.empty()) return classifier.argmax();

    // Ties keep the lexicographically smaller canonical string, which is the
    // map iteration order.
    const ScoredCandidate* best = nullptr;
    for (const auto& [canon, cand] : pool)
        if (best == nullptr || cand.combined > best->combined) best = &cand;
    return *best;
}

}  // namespace catgen
