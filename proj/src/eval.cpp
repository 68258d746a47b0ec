#include "catgen/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace catgen {

std::vector<FrequencyBucket> default_buckets() {
    return {{10, 100}, {100, 400}, {400, 2000}};
}

double accuracy(const std::vector<Category>& pred, const std::vector<Category>& gold) {
    if (pred.size() != gold.size())
        throw std::invalid_argument("prediction/gold length mismatch: " +
                                    std::to_string(pred.size()) + " vs " +
                                    std::to_string(gold.size()));
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (pred[i] == gold[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::vector<BucketRow> bucketed_accuracy(const std::vector<Category>& pred,
                                         const std::vector<Category>& gold,
                                         const LabelInventory& inv,
                                         const std::vector<FrequencyBucket>& buckets,
                                         GroupCount* below, GroupCount* above) {
    if (pred.size() != gold.size())
        throw std::invalid_argument("prediction/gold length mismatch");
    for (std::size_t a = 0; a < buckets.size(); ++a) {
        if (buckets[a].lo >= buckets[a].hi)
            throw std::invalid_argument("bucket bounds must satisfy lo < hi");
        for (std::size_t b = a + 1; b < buckets.size(); ++b)
            if (buckets[a].lo < buckets[b].hi && buckets[b].lo < buckets[a].hi)
                throw std::invalid_argument("buckets must be disjoint");
    }
    long min_lo = buckets.empty() ? 0 : buckets.front().lo;
    long max_hi = buckets.empty() ? 0 : buckets.front().hi;
    for (const auto& b : buckets) {
        min_lo = std::min(min_lo, b.lo);
        max_hi = std::max(max_hi, b.hi);
    }

    std::vector<BucketRow> rows(buckets.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].range = buckets[i];
    GroupCount below_local, above_local;

    for (std::size_t i = 0; i < gold.size(); ++i) {
        long freq = inv.frequency(gold[i]);
        bool hit = pred[i] == gold[i];
        bool placed = false;
        for (auto& row : rows) {
            if (freq >= row.range.lo && freq < row.range.hi) {
                ++row.total;
                if (hit) ++row.correct;
                placed = true;
                break;
            }
        }
        if (!placed) {
            GroupCount& g = freq < min_lo ? below_local : above_local;
            ++g.total;
            if (hit) ++g.correct;
        }
    }
    for (auto& row : rows)
        row.share = gold.empty() ? 0.0
                                 : static_cast<double>(row.total) / static_cast<double>(gold.size());
    if (below) *below = below_local;
    if (above) *above = above_local;
    return rows;
}

std::map<std::size_t, GroupCount> length_accuracy(const std::vector<Category>& pred,
                                                  const std::vector<Category>& gold) {
    if (pred.size() != gold.size())
        throw std::invalid_argument("prediction/gold length mismatch");
    std::map<std::size_t, GroupCount> out;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        auto& g = out[category_length(gold[i])];
        ++g.total;
        if (pred[i] == gold[i]) ++g.correct;
    }
    return out;
}

std::vector<PAtKRow> unseen_p_at_k(const std::vector<DecodeResult>& kbest,
                                   const std::vector<Category>& gold, const LabelInventory& inv,
                                   const std::vector<int>& ks, bool strip,
                                   std::size_t* unseen_total) {
    if (kbest.size() != gold.size())
        throw std::invalid_argument("kbest/gold length mismatch");
    std::vector<PAtKRow> rows;
    for (int k : ks) rows.push_back(PAtKRow{k, 0, 0});
    std::size_t unseen = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (inv.contains(gold[i])) continue;
        ++unseen;
        Category want = strip ? strip_features(gold[i]) : gold[i];
        // rank of the first matching candidate, or -1
        int rank = -1;
        for (std::size_t r = 0; r < kbest[i].kbest.size(); ++r) {
            const auto& entry = kbest[i].kbest[r];
            if (!entry.legal) continue;
            Category got = strip ? strip_features(entry.category) : entry.category;
            if (got == want) {
                rank = static_cast<int>(r);
                break;
            }
        }
        for (auto& row : rows) {
            ++row.total;
            if (rank >= 0 && rank < row.k) ++row.hits;
        }
    }
    if (unseen_total) *unseen_total = unseen;
    return rows;
}

EvalReport evaluate(const std::vector<Category>& pred, const std::vector<Category>& gold,
                    const LabelInventory& inv, const std::vector<FrequencyBucket>& buckets,
                    const std::vector<DecodeResult>* kbest, const std::vector<int>& ks) {
    EvalReport report;
    report.total_tokens = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (pred[i] == gold[i]) ++report.correct_tokens;
    report.buckets =
        bucketed_accuracy(pred, gold, inv, buckets, &report.below_buckets, &report.above_buckets);
    report.by_length = length_accuracy(pred, gold);
    if (kbest) {
        report.unseen_strict = unseen_p_at_k(*kbest, gold, inv, ks, false, &report.unseen_tokens);
        report.unseen_stripped = unseen_p_at_k(*kbest, gold, inv, ks, true, nullptr);
    }
    return report;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
    return buf;
}

void render_p_rows(std::ostringstream& out, const std::vector<PAtKRow>& rows, const char* name,
                   bool tsv) {
    if (rows.empty()) return;
    if (tsv) {
        for (const auto& r : rows)
            out << name << "\tp@" << r.k << "\t"
                << (r.total == 0 ? "n/a" : pct(r.value())) << "\n";
        return;
    }
    out << name << ":";
    for (const auto& r : rows) {
        out << "  p@" << r.k << "=";
        if (r.total == 0)
            out << "n/a (0 tokens)";
        else
            out << pct(r.value());
    }
    out << "\n";
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    std::ostringstream out;
    bool tsv = format == ReportFormat::Tsv;
    if (tsv) {
        out << "metric\tgroup\tvalue\n";
        out << "accuracy\toverall\t" << pct(report.overall()) << "\n";
        out << "tokens\toverall\t" << report.total_tokens << "\n";
        for (const auto& b : report.buckets) {
            std::string g = std::to_string(b.range.lo) + "~" + std::to_string(b.range.hi);
            out << "accuracy\tfreq " << g << "\t" << pct(b.accuracy()) << "\n";
            out << "share\tfreq " << g << "\t" << pct(b.share) << "\n";
        }
        out << "accuracy\tfreq below\t" << pct(report.below_buckets.accuracy()) << "\n";
        out << "accuracy\tfreq above\t" << pct(report.above_buckets.accuracy()) << "\n";
        for (const auto& [len, g] : report.by_length)
            out << "accuracy\tlen " << len << "\t" << pct(g.accuracy()) << "\n";
        render_p_rows(out, report.unseen_strict, "unseen", true);
        render_p_rows(out, report.unseen_stripped, "unseen w/o feature", true);
        return out.str();
    }

    out << "overall accuracy: " << pct(report.overall()) << " (" << report.correct_tokens << "/"
        << report.total_tokens << ")\n";
    if (!report.buckets.empty()) {
        out << "by gold training frequency:\n";
        for (const auto& b : report.buckets)
            out << "  " << b.range.lo << " ~ " << b.range.hi << ": " << pct(b.accuracy())
                << "  (% in test: " << pct(b.share) << ")\n";
        if (report.below_buckets.total > 0)
            out << "  below: " << pct(report.below_buckets.accuracy()) << " ("
                << report.below_buckets.total << " tokens)\n";
        if (report.above_buckets.total > 0)
            out << "  above: " << pct(report.above_buckets.accuracy()) << " ("
                << report.above_buckets.total << " tokens)\n";
    }
    if (!report.by_length.empty()) {
        out << "by category length:\n";
        for (const auto& [len, g] : report.by_length)
            out << "  " << len << ": " << pct(g.accuracy()) << " (" << g.total << " tokens)\n";
    }
    if (!report.unseen_strict.empty()) {
        out << "unseen categories (" << report.unseen_tokens << " tokens):\n  ";
        for (const auto& r : report.unseen_strict) {
            out << "p@" << r.k << "=";
            if (r.total == 0)
                out << "n/a (0 tokens)";
            else
                out << pct(r.value());
            out << "  ";
        }
        out << "\n  w/o feature: ";
        for (const auto& r : report.unseen_stripped) {
            out << "p@" << r.k << "=";
            if (r.total == 0)
                out << "n/a (0 tokens)";
            else
                out << pct(r.value());
            out << "  ";
        }
        out << "\n";
    }
    out << "note: bucket shares use all test tokens as the denominator\n";
    return out.str();
}

}  // namespace catgen
