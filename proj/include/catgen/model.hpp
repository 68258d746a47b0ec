#ifndef CATGEN_MODEL_HPP
#define CATGEN_MODEL_HPP

// Pluggable probability scorers for generator steps, transition actions and
// whole-category classification. The reference implementation is a log-linear
// model over string features trained with plain SGD; neural encoders can sit
// behind the same distribution contracts.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "catgen/corpus.hpp"
#include "catgen/oracle.hpp"
#include "catgen/transition.hpp"

namespace catgen {

// Reserved previous-tag marker for the first generation step.
inline constexpr const char* kBosMarker = "<bos>";

// Per-word feature bundle, derived deterministically from the sentence.
struct ContextVector {
    std::string word;
    std::string lower;
    std::string prev, prev2, next, next2;
    int position = 0;
    int sentence_length = 0;
};

ContextVector make_context(const std::vector<std::string>& words, int i);

struct GeneratorStepQuery {
    ContextVector context;
    std::string prev_tag;  // kBosMarker at step 1
    int step_index = 1;    // 1-based
};

class ModelIoError : public std::runtime_error {
public:
    explicit ModelIoError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelParameters {
    // Weights keyed "feature<TAB>label".
    std::unordered_map<std::string, double> weights;
    std::string component;  // generator | classifier | transition
    std::string vocab_fingerprint;
    std::string inventory_fingerprint;
    double learning_rate = 0.1;
    int epochs = 10;
    std::uint64_t seed = 1;

    double weight(const std::string& feature, const std::string& label) const;
    void bump(const std::string& feature, const std::string& label, double delta);

    bool operator==(const ModelParameters& o) const;
};

// Feature templates (versioned with the model format).
std::vector<std::string> classifier_features(const ContextVector& ctx);
std::vector<std::string> generator_features(const GeneratorStepQuery& q);
std::vector<std::string> transition_features(const TransitionState& s, const ContextVector& ctx);

// Softmax over linear feature scores; strictly positive, sums to 1.
std::vector<double> score_distribution(const ModelParameters& params,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& labels);

// log(max(p, 1e-12)); keeps log scores finite.
double floored_log(double p);

// Probabilities parallel to vocab.tags() (EOS included).
std::vector<double> generator_step_distribution(const GeneratorStepQuery& q,
                                                const TagVocabulary& vocab,
                                                const ModelParameters& params);

// Probabilities parallel to inv.categories(); UNK is not an output.
std::vector<double> classifier_distribution(const ContextVector& ctx, const LabelInventory& inv,
                                            const ModelParameters& params);

// Softmax restricted to the legal actions of s; illegal actions carry no
// mass. Throws on terminated states.
std::pair<std::vector<Action>, std::vector<double>> transition_action_distribution(
    const TransitionState& s, const ContextVector& ctx,
    const std::vector<AtomicCategory>& atoms, const ModelParameters& params);

// Cross-entropy loss of one softmax decision and its gradient, accumulated
// into grad as d(loss)/d(weight) keyed like ModelParameters::weights. The
// trainers run on exactly this routine.
double loss_and_gradient(const ModelParameters& params,
                         const std::vector<std::string>& features,
                         const std::vector<std::string>& labels, std::size_t target,
                         std::unordered_map<std::string, double>& grad);

struct TrainOptions {
    double learning_rate = 0.1;
    int epochs = 10;
    std::uint64_t seed = 1;
    std::vector<double>* epoch_losses = nullptr;  // average loss per epoch, when wanted
};

ModelParameters train_classifier(const std::vector<TaggedSentence>& corpus,
                                 const LabelInventory& inv, const TrainOptions& opts);

// Deterministic oracles train on the longest-match decomposition; the
// non-deterministic setting resamples a segmentation for every category at
// every epoch.
ModelParameters train_generator(const std::vector<TaggedSentence>& corpus,
                                const LabelInventory& inv, const TagVocabulary& vocab,
                                const OracleSpec& spec, const TrainOptions& opts);

ModelParameters train_transition(const std::vector<TaggedSentence>& corpus,
                                 const LabelInventory& inv, const TrainOptions& opts);

// Distinct atomic categories of the inventory, ordered by surface.
std::vector<AtomicCategory> inventory_atoms(const LabelInventory& inv);
std::string atoms_fingerprint(const std::vector<AtomicCategory>& atoms);

void save_model(const ModelParameters& params, const std::string& path);
ModelParameters load_model(const std::string& path);

// Throws ModelIoError when the loaded model does not match the component or
// the fingerprints of the artifacts it is used with.
void require_compatible(const ModelParameters& params, const std::string& component,
                        const std::string& vocab_fp, const std::string& inventory_fp);

}  // namespace catgen

#endif
