#ifndef CATGEN_DECODE_HPP
#define CATGEN_DECODE_HPP

// Per-word decoding: greedy/beam tag-wise generation, transition-based
// generation, and legality accounting over k-best outputs.

#include <string>
#include <vector>

#include "catgen/model.hpp"

namespace catgen {

struct KBestEntry {
    std::vector<std::string> surfaces;    // tag surfaces (EOS last) or action strings
    std::vector<double> step_logps;       // one per surface
    double logprob = 0.0;                 // sum of step_logps
    bool legal = false;
    Category category;                    // valid only when legal

    std::string joined() const;           // surfaces joined with spaces
};

struct DecodeResult {
    int word_index = 0;
    std::vector<KBestEntry> kbest;        // logprob descending, ties by joined surface
};

inline constexpr int kDefaultMaxSteps = 32;    // tag-wise; categories average ~4 tokens
inline constexpr int kDefaultMaxActions = 64;  // transition

// Beam search over generator steps. A hypothesis finishes on EOS; hypotheses
// alive at max_steps are finished forcibly with their actual EOS
// log-probability at that step. Ill-formed candidates are kept and flagged.
DecodeResult decode_tagwise(const std::vector<std::string>& words, int position,
                            const TagVocabulary& vocab, const ModelParameters& params,
                            int beam, int kbest, int max_steps = kDefaultMaxSteps);

// Beam search over transition actions; finishes on stop. Every candidate is
// well-formed by construction.
DecodeResult decode_transition(const std::vector<std::string>& words, int position,
                               const std::vector<AtomicCategory>& atoms,
                               const ModelParameters& params, int beam, int kbest,
                               int max_actions = kDefaultMaxActions);

// Fraction of ill-formed entries among the top-k entries across all words.
double illegal_rate(const std::vector<DecodeResult>& results, int k);

enum class TagMode { Classifier, Tagwise, Transition };

struct TagArtifacts {
    const LabelInventory* inventory = nullptr;
    const TagVocabulary* vocab = nullptr;        // tagwise
    const ModelParameters* params = nullptr;
    int beam = 4;
    int max_steps = kDefaultMaxSteps;
    int max_actions = kDefaultMaxActions;
};

// Per-word 1-best categories for a sentence. The tag-wise mode returns the
// best well-formed candidate in the beam, falling back to the most frequent
// inventory category when every candidate is ill-formed.
std::vector<Category> tag_sentence(const std::vector<std::string>& words, TagMode mode,
                                   const TagArtifacts& art);

}  // namespace catgen

#endif
