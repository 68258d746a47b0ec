#ifndef CATGEN_CORPUS_HPP
#define CATGEN_CORPUS_HPP

// Supertag-annotated corpus reading and the frequency-thresholded category
// label inventory with its UNK policy.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "catgen/category.hpp"

namespace catgen {

struct TaggedSentence {
    std::vector<std::string> words;
    std::vector<std::string> pos;   // may be empty (tsv input); else parallel to words
    std::vector<Category> gold;     // parallel to words

    std::size_t size() const { return words.size(); }
};

enum class CorpusFormat { Pipe, Tsv };

class CorpusError : public std::runtime_error {
public:
    CorpusError(const std::string& what, std::size_t line);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// pipe: one sentence per line, space-separated "word|POS|category" tokens.
// tsv:  one "word<TAB>category" per line, blank line between sentences.
std::vector<TaggedSentence> read_corpus(const std::string& path, CorpusFormat format);
std::vector<TaggedSentence> read_corpus(std::istream& in, CorpusFormat format);

// Write-back in pipe format ("-" when POS is absent). Used for format checks.
std::string write_corpus_pipe(const std::vector<TaggedSentence>& sents);

// Category label set kept at training frequency >= threshold. Iteration order
// is descending frequency, ties broken by canonical string.
class LabelInventory {
public:
    static LabelInventory build(const std::vector<TaggedSentence>& train, long threshold);
    // Construct directly from (category, count) pairs; counts below threshold
    // are recorded but excluded from the kept set.
    static LabelInventory from_counts(const std::vector<std::pair<Category, long>>& counts,
                                      long threshold);

    const std::vector<Category>& categories() const { return categories_; }
    std::size_t size() const { return categories_.size(); }
    long threshold() const { return threshold_; }
    const std::string& unk_marker() const { return unk_marker_; }

    bool contains(const Category& c) const;
    // Training frequency, including categories excluded by the threshold
    // (0 for categories never seen in training).
    long frequency(const Category& c) const;
    // Index in iteration order, -1 if not kept.
    int index_of(const Category& c) const;

    std::size_t distinct_in_training() const { return distinct_in_training_; }
    long total_tokens() const { return total_tokens_; }

    std::string serialize() const;
    static LabelInventory deserialize(std::istream& in);
    std::string fingerprint() const;

private:
    std::vector<Category> categories_;
    std::unordered_map<std::string, long> all_freq_;  // canonical -> training count
    std::unordered_map<std::string, int> index_;      // canonical -> kept index
    long threshold_ = 1;
    std::string unk_marker_ = "UNK";
    std::size_t distinct_in_training_ = 0;
    long total_tokens_ = 0;
};

// True at positions whose gold category is below threshold; those positions
// are skipped by training losses while their words stay in the input.
// Throws if a gold category's surface equals the reserved UNK marker.
std::vector<bool> unk_mask(const TaggedSentence& sentence, const LabelInventory& inv);

// FNV-1a 64-bit hex digest, used to fingerprint inventories and vocabularies.
std::string fingerprint_hex(std::string_view text);

}  // namespace catgen

#endif
