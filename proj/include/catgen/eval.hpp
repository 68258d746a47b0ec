#ifndef CATGEN_EVAL_HPP
#define CATGEN_EVAL_HPP

// Evaluation axes: tag accuracy, accuracy bucketed by training frequency of
// the gold category, accuracy by category length, and p@k on tokens whose
// gold category is outside the label inventory.

#include <map>
#include <string>
#include <vector>

#include "catgen/corpus.hpp"
#include "catgen/decode.hpp"

namespace catgen {

struct FrequencyBucket {
    long lo = 0;  // inclusive
    long hi = 0;  // exclusive
};

// The paper-style default: 10~100, 100~400, 400~2000.
std::vector<FrequencyBucket> default_buckets();

struct BucketRow {
    FrequencyBucket range;
    std::size_t correct = 0;
    std::size_t total = 0;
    double share = 0.0;  // total / all test tokens

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct GroupCount {
    std::size_t correct = 0;
    std::size_t total = 0;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct PAtKRow {
    int k = 0;
    std::size_t hits = 0;
    std::size_t total = 0;

    double value() const {
        return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
    }
};

struct EvalReport {
    std::size_t total_tokens = 0;
    std::size_t correct_tokens = 0;
    std::vector<BucketRow> buckets;
    GroupCount below_buckets;  // gold frequency under the lowest bucket
    GroupCount above_buckets;  // gold frequency at or above the highest bucket
    std::map<std::size_t, GroupCount> by_length;
    std::vector<PAtKRow> unseen_strict;
    std::vector<PAtKRow> unseen_stripped;
    std::size_t unseen_tokens = 0;

    double overall() const {
        return total_tokens == 0
                   ? 0.0
                   : static_cast<double>(correct_tokens) / static_cast<double>(total_tokens);
    }
};

// Fraction of positions with structurally equal categories.
double accuracy(const std::vector<Category>& pred, const std::vector<Category>& gold);

// Buckets must be disjoint; every token lands in exactly one group (a bucket,
// below the lowest, or at/above the highest). Shares are over all tokens.
std::vector<BucketRow> bucketed_accuracy(const std::vector<Category>& pred,
                                         const std::vector<Category>& gold,
                                         const LabelInventory& inv,
                                         const std::vector<FrequencyBucket>& buckets,
                                         GroupCount* below = nullptr,
                                         GroupCount* above = nullptr);

std::map<std::size_t, GroupCount> length_accuracy(const std::vector<Category>& pred,
                                                  const std::vector<Category>& gold);

// kbest[i] holds the ranked candidates for token i. Restricted to tokens
// whose gold category is not in the inventory; strip compares categories with
// features removed.
std::vector<PAtKRow> unseen_p_at_k(const std::vector<DecodeResult>& kbest,
                                   const std::vector<Category>& gold, const LabelInventory& inv,
                                   const std::vector<int>& ks, bool strip,
                                   std::size_t* unseen_total = nullptr);

EvalReport evaluate(const std::vector<Category>& pred, const std::vector<Category>& gold,
                    const LabelInventory& inv,
                    const std::vector<FrequencyBucket>& buckets = default_buckets(),
                    const std::vector<DecodeResult>* kbest = nullptr,
                    const std::vector<int>& ks = {1, 2, 4, 8});

enum class ReportFormat { Text, Tsv };

std::string render_report(const EvalReport& report, ReportFormat format);

}  // namespace catgen

#endif
