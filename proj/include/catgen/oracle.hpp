#ifndef CATGEN_ORACLE_HPP
#define CATGEN_ORACLE_HPP

// Atomic tag sets and category decomposition. A vocabulary maps tag surfaces
// to token-sequence fragments; decomposition segments a category's token
// sequence into vocabulary spans (deterministically by longest forward match,
// exhaustively, or sampled uniformly over valid segmentations).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "catgen/category.hpp"
#include "catgen/corpus.hpp"

namespace catgen {

struct AtomicTag {
    std::string surface;             // joined token span; "EOS" for the stop tag
    std::vector<std::string> span;   // empty only for EOS
};

enum class OracleKind { AC, PA, NG, OR };

const char* oracle_kind_name(OracleKind k);
OracleKind oracle_kind_from_name(const std::string& name);

struct OracleSpec {
    OracleKind kind = OracleKind::AC;
    int k = 10;                // top-k cutoff (PA/NG)
    int n = 2;                 // n-gram order (NG)
    bool deterministic = true;
};

class IllFormedError : public std::runtime_error {
public:
    explicit IllFormedError(const std::string& what) : std::runtime_error(what) {}
};

// Ordered tag set: EOS first, then "(" ")" "/" "\", then the inventory's
// atomic categories sorted by surface, then extension tags in rank order.
class TagVocabulary {
public:
    static TagVocabulary build(const LabelInventory& inv, const OracleSpec& spec);

    const std::vector<AtomicTag>& tags() const { return tags_; }
    std::size_t size() const { return tags_.size(); }
    const AtomicTag& tag(int id) const { return tags_[static_cast<std::size_t>(id)]; }
    int eos_id() const { return 0; }
    const OracleSpec& origin() const { return origin_; }

    // Tag ids whose span starts with the given token, ordered by span length
    // descending then surface ascending (EOS excluded).
    const std::vector<int>& candidates_for(const std::string& first_token) const;

    int find_surface(const std::string& surface) const;  // -1 when absent

    std::string serialize() const;
    static TagVocabulary deserialize(std::istream& in);
    std::string fingerprint() const;

private:
    void add_tag(AtomicTag tag);
    void index_tags();

    std::vector<AtomicTag> tags_;
    OracleSpec origin_;
    std::unordered_map<std::string, std::vector<int>> by_first_token_;
    std::unordered_map<std::string, int> by_surface_;
    std::unordered_map<std::string, int> by_span_;
};

// Greedy longest-forward-match segmentation of tokenize(c), EOS appended.
std::vector<int> decompose_deterministic(const Category& c, const TagVocabulary& vocab);

// All segmentations (each ending in EOS) in deterministic order: longer spans
// first at every branch, so the longest-match sequence comes first. Truncated
// at limit.
std::vector<std::vector<int>> decompose_all(const Category& c, const TagVocabulary& vocab,
                                            std::size_t limit);

// One segmentation drawn uniformly over all complete segmentations, via
// suffix-count weighting; reproducible for a given seed.
std::vector<int> sample_decomposition(const Category& c, const TagVocabulary& vocab,
                                      std::uint64_t rng_seed);

// Concatenates the spans of a tag sequence (which must end with EOS) and
// parses the result. Throws IllFormedError when the joined text is not a
// category.
Category reassemble(const std::vector<int>& seq, const TagVocabulary& vocab);

// Surfaces of a tag id sequence.
std::vector<std::string> tag_surfaces(const std::vector<int>& seq, const TagVocabulary& vocab);

}  // namespace catgen

#endif
