#include "catgen/decode.hpp"

#include <algorithm>
#include <cassert>

namespace catgen {

std::string KBestEntry::joined() const {
    std::string out;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        if (i) out += ' ';
        out += surfaces[i];
    }
    return out;
}

namespace {

void check_beam_args(int beam, int kbest, int max_len) {
    if (kbest < 1) throw std::invalid_argument("kbest must be >= 1");
    if (beam < kbest) throw std::invalid_argument("beam must be >= kbest");
    if (max_len < 1) throw std::invalid_argument("decode length cap must be >= 1");
}

template <typename Hyp>
void sort_hyps(std::vector<Hyp>& hyps) {
    std::sort(hyps.begin(), hyps.end(), [](const Hyp& a, const Hyp& b) {
        if (a.logprob != b.logprob) return a.logprob > b.logprob;
        return a.sort_key < b.sort_key;
    });
}

}  // namespace

DecodeResult decode_tagwise(const std::vector<std::string>& words, int position,
                            const TagVocabulary& vocab, const ModelParameters& params,
                            int beam, int kbest, int max_steps) {
    check_beam_args(beam, kbest, max_steps);
    ContextVector ctx = make_context(words, position);
    const int eos = vocab.eos_id();

    struct Cand {
        std::vector<int> tags;
        std::vector<double> step_logps;
        double logprob = 0.0;
        std::string sort_key;  // joined surfaces, for deterministic ties
    };

    std::vector<Cand> active{Cand{}};
    std::vector<Cand> finished;

    for (int step = 1; step <= max_steps && !active.empty(); ++step) {
        std::vector<Cand> extensions;
        for (const auto& cand : active) {
            const std::string prev = cand.tags.empty()
                                         ? std::string(kBosMarker)
                                         : vocab.tag(cand.tags.back()).surface;
            GeneratorStepQuery q{ctx, prev, step};
            auto dist = generator_step_distribution(q, vocab, params);
            for (std::size_t t = 0; t < dist.size(); ++t) {
                Cand next = cand;
                next.tags.push_back(static_cast<int>(t));
                double lp = floored_log(dist[t]);
                next.step_logps.push_back(lp);
                next.logprob += lp;
                if (!next.sort_key.empty()) next.sort_key += ' ';
                next.sort_key += vocab.tag(static_cast<int>(t)).surface;
                if (static_cast<int>(t) == eos)
                    finished.push_back(std::move(next));
                else
                    extensions.push_back(std::move(next));
            }
        }
        sort_hyps(extensions);
        if (static_cast<int>(extensions.size()) > beam) extensions.resize(static_cast<std::size_t>(beam));
        active = std::move(extensions);
    }

    // Hypotheses still alive at the cap take their EOS step now.
    for (auto& cand : active) {
        GeneratorStepQuery q{ctx, vocab.tag(cand.tags.back()).surface,
                             static_cast<int>(cand.tags.size()) + 1};
        auto dist = generator_step_distribution(q, vocab, params);
        double lp = floored_log(dist[static_cast<std::size_t>(eos)]);
        cand.tags.push_back(eos);
        cand.step_logps.push_back(lp);
        cand.logprob += lp;
        cand.sort_key += ' ';
        cand.sort_key += vocab.tag(eos).surface;
        finished.push_back(std::move(cand));
    }

    sort_hyps(finished);
    if (static_cast<int>(finished.size()) > kbest) finished.resize(static_cast<std::size_t>(kbest));

    DecodeResult result;
    result.word_index = position;
    for (auto& cand : finished) {
        KBestEntry entry;
        entry.surfaces = tag_surfaces(cand.tags, vocab);
        entry.step_logps = std::move(cand.step_logps);
        entry.logprob = cand.logprob;
        try {
            entry.category = reassemble(cand.tags, vocab);
            entry.legal = true;
        } catch (const IllFormedError&) {
            entry.legal = false;
        }
        result.kbest.push_back(std::move(entry));
    }
    return result;
}

DecodeResult decode_transition(const std::vector<std::string>& words, int position,
                               const std::vector<AtomicCategory>& atoms,
                               const ModelParameters& params, int beam, int kbest,
                               int max_actions) {
    check_beam_args(beam, kbest, max_actions);
    ContextVector ctx = make_context(words, position);

    struct Cand {
        TransitionState state;
        std::vector<std::string> surfaces;
        std::vector<double> step_logps;
        double logprob = 0.0;
        std::string sort_key;
    };

    std::vector<Cand> active{Cand{initial_state(), {}, {}, 0.0, ""}};
    std::vector<Cand> finished;

    for (int step = 0; step < max_actions && !active.empty(); ++step) {
        std::vector<Cand> extensions;
        for (const auto& cand : active) {
            auto [actions, dist] = transition_action_distribution(cand.state, ctx, atoms, params);
            for (std::size_t a = 0; a < actions.size(); ++a) {
                Cand next = cand;
                next.state = apply(cand.state, actions[a], max_actions);
                double lp = floored_log(dist[a]);
                next.surfaces.push_back(actions[a].str());
                next.step_logps.push_back(lp);
                next.logprob += lp;
                if (!next.sort_key.empty()) next.sort_key += ' ';
                next.sort_key += actions[a].str();
                if (next.state.terminated)
                    finished.push_back(std::move(next));
                else
                    extensions.push_back(std::move(next));
            }
        }
        sort_hyps(extensions);
        if (static_cast<int>(extensions.size()) > beam) extensions.resize(static_cast<std::size_t>(beam));
        active = std::move(extensions);
    }
    // Hypotheses that cannot reach stop within the cap are dropped.

    sort_hyps(finished);
    if (static_cast<int>(finished.size()) > kbest) finished.resize(static_cast<std::size_t>(kbest));

    DecodeResult result;
    result.word_index = position;
    for (auto& cand : finished) {
        KBestEntry entry;
        entry.surfaces = std::move(cand.surfaces);
        entry.step_logps = std::move(cand.step_logps);
        entry.logprob = cand.logprob;
        entry.category = catgen::result(cand.state);
        entry.legal = true;  // terminated transition runs are well-formed by construction
        assert(entry.category.valid());
        result.kbest.push_back(std::move(entry));
    }
    return result;
}

double illegal_rate(const std::vector<DecodeResult>& results, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    long total = 0, bad = 0;
    for (const auto& r : results) {
        int take = std::min<int>(k, static_cast<int>(r.kbest.size()));
        for (int i = 0; i < take; ++i) {
            ++total;
            if (!r.kbest[static_cast<std::size_t>(i)].legal) ++bad;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(total);
}

std::vector<Category> tag_sentence(const std::vector<std::string>& words, TagMode mode,
                                   const TagArtifacts& art) {
    std::vector<Category> out;
    if (words.empty()) return out;
    if (art.inventory == nullptr || art.params == nullptr)
        throw std::invalid_argument("tag_sentence requires an inventory and a model");
    const LabelInventory& inv = *art.inventory;

    switch (mode) {
        case TagMode::Classifier: {
            require_compatible(*art.params, "classifier", inv.fingerprint(), inv.fingerprint());
            for (int i = 0; i < static_cast<int>(words.size()); ++i) {
                auto dist = classifier_distribution(make_context(words, i), inv, *art.params);
                std::size_t best =
                    static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                out.push_back(inv.categories()[best]);
            }
            return out;
        }
        case TagMode::Tagwise: {
            if (art.vocab == nullptr) throw std::invalid_argument("tag-wise mode needs a vocabulary");
            require_compatible(*art.params, "generator", art.vocab->fingerprint(),
                               inv.fingerprint());
            for (int i = 0; i < static_cast<int>(words.size()); ++i) {
                auto res = decode_tagwise(words, i, *art.vocab, *art.params, art.beam, art.beam,
                                          art.max_steps);
                const KBestEntry* pick = nullptr;
                for (const auto& e : res.kbest)
                    if (e.legal) {
                        pick = &e;
                        break;
                    }
                // All-ill-formed beams fall back to the most frequent label.
                out.push_back(pick ? pick->category : inv.categories().front());
            }
            return out;
        }
        case TagMode::Transition: {
            auto atoms = inventory_atoms(inv);
            require_compatible(*art.params, "transition", atoms_fingerprint(atoms),
                               inv.fingerprint());
            for (int i = 0; i < static_cast<int>(words.size()); ++i) {
                auto res = decode_transition(words, i, atoms, *art.params, art.beam, 1,
                                             art.max_actions);
                out.push_back(res.kbest.empty() ? inv.categories().front()
                                                : res.kbest.front().category);
            }
            return out;
        }
    }
    throw std::logic_error("unknown tag mode");
}

}  // namespace catgen
