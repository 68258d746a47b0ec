#include "catgen/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

namespace catgen {

namespace {

std::string wkey(const std::string& feature, const std::string& label) {
    std::string k;
    k.reserve(feature.size() + label.size() + 1);
    k += feature;
    k += '\t';
    k += label;
    return k;
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string count_bucket(std::size_t n) {
    return n < 5 ? std::to_string(n) : "5+";
}

std::string step_bucket(int step) {
    return step <= 4 ? std::to_string(step) : "5+";
}

// Round-trippable decimal rendering (shortest form that restores the bits).
std::string double_str(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const char* what) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ModelIoError(std::string("corrupt model file: bad ") + what + " \"" + s + "\"");
    return v;
}

}  // namespace

ContextVector make_context(const std::vector<std::string>& words, int i) {
    const int n = static_cast<int>(words.size());
    ContextVector ctx;
    ctx.word = words[static_cast<std::size_t>(i)];
    ctx.lower = lowercase(ctx.word);
    ctx.prev = i >= 1 ? words[static_cast<std::size_t>(i - 1)] : "<s>";
    ctx.prev2 = i >= 2 ? words[static_cast<std::size_t>(i - 2)] : "<s>";
    ctx.next = i + 1 < n ? words[static_cast<std::size_t>(i + 1)] : "</s>";
    ctx.next2 = i + 2 < n ? words[static_cast<std::size_t>(i + 2)] : "</s>";
    ctx.position = i;
    ctx.sentence_length = n;
    return ctx;
}

double ModelParameters::weight(const std::string& feature, const std::string& label) const {
    auto it = weights.find(wkey(feature, label));
    return it == weights.end() ? 0.0 : it->second;
}

void ModelParameters::bump(const std::string& feature, const std::string& label, double delta) {
    weights[wkey(feature, label)] += delta;
}

bool ModelParameters::operator==(const ModelParameters& o) const {
    return weights == o.weights && component == o.component &&
           vocab_fingerprint == o.vocab_fingerprint &&
           inventory_fingerprint == o.inventory_fingerprint &&
           learning_rate == o.learning_rate && epochs == o.epochs && seed == o.seed;
}

std::vector<std::string> classifier_features(const ContextVector& ctx) {
    return {"w=" + ctx.word,  "lc=" + ctx.lower, "p1=" + ctx.prev,
            "p2=" + ctx.prev2, "n1=" + ctx.next,  "n2=" + ctx.next2};
}

std::vector<std::string> generator_features(const GeneratorStepQuery& q) {
    auto f = classifier_features(q.context);
    f.push_back("pt=" + q.prev_tag);
    f.push_back("wpt=" + q.context.word + "|" + q.prev_tag);
    f.push_back("sb=" + step_bucket(q.step_index));
    return f;
}

std::vector<std::string> transition_features(const TransitionState& s, const ContextVector& ctx) {
    auto f = classifier_features(ctx);
    f.push_back("st=" + (s.stack.empty() ? std::string("<empty>") : s.stack.back().str()));
    f.push_back("sd=" + count_bucket(s.stack.size()));
    f.push_back("la=" + (s.last_action ? s.last_action->str() : std::string(kBosMarker)));
    f.push_back("bs=" + (s.buffer.empty() ? std::string("<empty>") : s.buffer.back().str()));
    f.push_back("bl=" + count_bucket(s.buffer.size()));
    return f;
}

std::vector<double> score_distribution(const ModelParameters& params,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& labels) {
    std::vector<double> scores(labels.size(), 0.0);
    for (std::size_t l = 0; l < labels.size(); ++l)
        for (const auto& f : features) scores[l] += params.weight(f, labels[l]);
    double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        z += s;
    }
    for (double& s : scores) s /= z;
    return scores;
}

double floored_log(double p) { return std::log(std::max(p, 1e-12)); }

std::vector<double> generator_step_distribution(const GeneratorStepQuery& q,
                                                const TagVocabulary& vocab,
                                                const ModelParameters& params) {
    std::vector<std::string> labels;
    labels.reserve(vocab.size());
    for (const auto& t : vocab.tags()) labels.push_back(t.surface);
    return score_distribution(params, generator_features(q), labels);
}

std::vector<double> classifier_distribution(const ContextVector& ctx, const LabelInventory& inv,
                                            const ModelParameters& params) {
    std::vector<std::string> labels;
    labels.reserve(inv.size());
    for (const auto& c : inv.categories()) labels.push_back(c.str());
    return score_distribution(params, classifier_features(ctx), labels);
}

std::pair<std::vector<Action>, std::vector<double>> transition_action_distribution(
    const TransitionState& s, const ContextVector& ctx,
    const std::vector<AtomicCategory>& atoms, const ModelParameters& params) {
    if (s.terminated) throw std::runtime_error("no action distribution for a terminated state");
    std::vector<Action> actions = legal_actions(s, atoms);
    std::vector<std::string> labels;
    labels.reserve(actions.size());
    for (const auto& a : actions) labels.push_back(a.str());
    return {std::move(actions), score_distribution(params, transition_features(s, ctx), labels)};
}

double loss_and_gradient(const ModelParameters& params,
                         const std::vector<std::string>& features,
                         const std::vector<std::string>& labels, std::size_t target,
                         std::unordered_map<std::string, double>& grad) {
    auto probs = score_distribution(params, features, labels);
    for (std::size_t l = 0; l < labels.size(); ++l) {
        double g = probs[l] - (l == target ? 1.0 : 0.0);
        for (const auto& f : features) grad[wkey(f, labels[l])] += g;
    }
    return -floored_log(probs[target]);
}

namespace {

// One SGD update through loss_and_gradient; returns the step loss.
double sgd_step(ModelParameters& params, const std::vector<std::string>& features,
                const std::vector<std::string>& labels, std::size_t target, double lr) {
    std::unordered_map<std::string, double> grad;
    double loss = loss_and_gradient(params, features, labels, target, grad);
    if (lr != 0.0)
        for (const auto& [key, g] : grad) params.weights[key] -= lr * g;
    return loss;
}

long count_effective_positions(const std::vector<TaggedSentence>& corpus,
                               const LabelInventory& inv) {
    long n = 0;
    for (const auto& sent : corpus) {
        auto mask = unk_mask(sent, inv);
        for (bool m : mask)
            if (!m) ++n;
    }
    if (n == 0) throw std::runtime_error("empty effective training set: every position is masked");
    return n;
}

void record_epoch(const TrainOptions& opts, double total_loss, long steps) {
    if (opts.epoch_losses)
        opts.epoch_losses->push_back(steps > 0 ? total_loss / static_cast<double>(steps) : 0.0);
}

}  // namespace

ModelParameters train_classifier(const std::vector<TaggedSentence>& corpus,
                                 const LabelInventory& inv, const TrainOptions& opts) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");
    count_effective_positions(corpus, inv);
    ModelParameters params;
    params.component = "classifier";
    params.vocab_fingerprint = inv.fingerprint();
    params.inventory_fingerprint = inv.fingerprint();
    params.learning_rate = opts.learning_rate;
    params.epochs = opts.epochs;
    params.seed = opts.seed;

    std::vector<std::string> labels;
    for (const auto& c : inv.categories()) labels.push_back(c.str());

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        double total = 0.0;
        long steps = 0;
        for (const auto& sent : corpus) {
            auto mask = unk_mask(sent, inv);
            for (std::size_t i = 0; i < sent.size(); ++i) {
                if (mask[i]) continue;
                auto target = static_cast<std::size_t>(inv.index_of(sent.gold[i]));
                auto feats = classifier_features(make_context(sent.words, static_cast<int>(i)));
                total += sgd_step(params, feats, labels, target, opts.learning_rate);
                ++steps;
            }
        }
        record_epoch(opts, total, steps);
    }
    return params;
}

ModelParameters train_generator(const std::vector<TaggedSentence>& corpus,
                                const LabelInventory& inv, const TagVocabulary& vocab,
                                const OracleSpec& spec, const TrainOptions& opts) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");
    count_effective_positions(corpus, inv);
    ModelParameters params;
    params.component = "generator";
    params.vocab_fingerprint = vocab.fingerprint();
    params.inventory_fingerprint = inv.fingerprint();
    params.learning_rate = opts.learning_rate;
    params.epochs = opts.epochs;
    params.seed = opts.seed;

    std::vector<std::string> labels;
    for (const auto& t : vocab.tags()) labels.push_back(t.surface);

    std::mt19937_64 rng(opts.seed);
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        double total = 0.0;
        long steps = 0;
        for (const auto& sent : corpus) {
            auto mask = unk_mask(sent, inv);
            for (std::size_t i = 0; i < sent.size(); ++i) {
                if (mask[i]) continue;
                std::vector<int> seq = spec.deterministic
                                           ? decompose_deterministic(sent.gold[i], vocab)
                                           : sample_decomposition(sent.gold[i], vocab, rng());
                ContextVector ctx = make_context(sent.words, static_cast<int>(i));
                std::string prev = kBosMarker;
                for (std::size_t j = 0; j < seq.size(); ++j) {
                    GeneratorStepQuery q{ctx, prev, static_cast<int>(j + 1)};
                    total += sgd_step(params, generator_features(q), labels,
                                      static_cast<std::size_t>(seq[j]), opts.learning_rate);
                    ++steps;
                    prev = vocab.tag(seq[j]).surface;
                }
            }
        }
        record_epoch(opts, total, steps);
    }
    return params;
}

ModelParameters train_transition(const std::vector<TaggedSentence>& corpus,
                                 const LabelInventory& inv, const TrainOptions& opts) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");
    count_effective_positions(corpus, inv);
    auto atoms = inventory_atoms(inv);
    ModelParameters params;
    params.component = "transition";
    params.vocab_fingerprint = atoms_fingerprint(atoms);
    params.inventory_fingerprint = inv.fingerprint();
    params.learning_rate = opts.learning_rate;
    params.epochs = opts.epochs;
    params.seed = opts.seed;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        double total = 0.0;
        long steps = 0;
        for (const auto& sent : corpus) {
            auto mask = unk_mask(sent, inv);
            for (std::size_t i = 0; i < sent.size(); ++i) {
                if (mask[i]) continue;
                ContextVector ctx = make_context(sent.words, static_cast<int>(i));
                auto gold = oracle_actions(sent.gold[i]);
                TransitionState state = initial_state();
                int cap = static_cast<int>(gold.size());
                for (const auto& action : gold) {
                    auto legal = legal_actions(state, atoms);
                    std::vector<std::string> labels;
                    std::size_t target = legal.size();
                    for (std::size_t a = 0; a < legal.size(); ++a) {
                        labels.push_back(legal[a].str());
                        if (legal[a] == action) target = a;
                    }
                    if (target == legal.size())
                        throw std::runtime_error("oracle action " + action.str() +
                                                 " is not legal for category " +
                                                 sent.gold[i].str());
                    total += sgd_step(params, transition_features(state, ctx), labels, target,
                                      opts.learning_rate);
                    ++steps;
                    state = apply(state, action, cap);
                }
            }
        }
        record_epoch(opts, total, steps);
    }
    return params;
}

std::vector<AtomicCategory> inventory_atoms(const LabelInventory& inv) {
    std::vector<AtomicCategory> atoms;
    std::vector<std::string> seen;
    auto walk = [&](const Category& c, auto&& self) -> void {
        if (c.is_atom()) {
            if (std::find(seen.begin(), seen.end(), c.atom_value().str()) == seen.end()) {
                seen.push_back(c.atom_value().str());
                atoms.push_back(c.atom_value());
            }
            return;
        }
        self(c.result(), self);
        self(c.argument(), self);
    };
    for (const auto& c : inv.categories()) walk(c, walk);
    std::sort(atoms.begin(), atoms.end(),
              [](const AtomicCategory& a, const AtomicCategory& b) { return a.str() < b.str(); });
    return atoms;
}

std::string atoms_fingerprint(const std::vector<AtomicCategory>& atoms) {
    std::string text = "atoms\n";
    for (const auto& a : atoms) {
        text += a.str();
        text += '\n';
    }
    return fingerprint_hex(text);
}

void save_model(const ModelParameters& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelIoError("cannot open model file for writing: " + path);
    out << "format=1\n";
    out << "component=" << params.component << "\n";
    out << "vocab_fingerprint=" << params.vocab_fingerprint << "\n";
    out << "inventory_fingerprint=" << params.inventory_fingerprint << "\n";
    out << "lr=" << double_str(params.learning_rate) << "\n";
    out << "epochs=" << params.epochs << "\n";
    out << "seed=" << params.seed << "\n";
    out << "entries=" << params.weights.size() << "\n";
    std::vector<std::string> keys;
    keys.reserve(params.weights.size());
    for (const auto& [key, w] : params.weights) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (const auto& key : keys)
        out << key << '\t' << double_str(params.weights.at(key)) << '\n';
    if (!out) throw ModelIoError("write failed: " + path);
}

namespace {

std::string expect_header(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line))
        throw ModelIoError("corrupt model file: missing header " + key);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(key + "=", 0) != 0)
        throw ModelIoError("corrupt model file: expected header " + key + ", got \"" + line + "\"");
    return line.substr(key.size() + 1);
}

}  // namespace

ModelParameters load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError("cannot open model file: " + path);
    std::string version = expect_header(in, "format");
    if (version != "1") throw ModelIoError("unsupported model format version: " + version);
    ModelParameters params;
    params.component = expect_header(in, "component");
    if (params.component != "generator" && params.component != "classifier" &&
        params.component != "transition")
        throw ModelIoError("corrupt model file: unknown component " + params.component);
    params.vocab_fingerprint = expect_header(in, "vocab_fingerprint");
    params.inventory_fingerprint = expect_header(in, "inventory_fingerprint");
    params.learning_rate = parse_double(expect_header(in, "lr"), "lr");
    params.epochs = std::stoi(expect_header(in, "epochs"));
    params.seed = std::stoull(expect_header(in, "seed"));
    std::size_t entries = std::stoull(expect_header(in, "entries"));
    std::string line;
    std::size_t n = 0;
    while (n < entries && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tab = line.rfind('\t');
        if (tab == std::string::npos || tab == 0)
            throw ModelIoError("corrupt model file: malformed weight line \"" + line + "\"");
        params.weights[line.substr(0, tab)] = parse_double(line.substr(tab + 1), "weight");
        ++n;
    }
    if (n < entries)
        throw ModelIoError("corrupt model file: truncated (" + std::to_string(n) + " of " +
                           std::to_string(entries) + " entries)");
    return params;
}

void require_compatible(const ModelParameters& params, const std::string& component,
                        const std::string& vocab_fp, const std::string& inventory_fp) {
    if (params.component != component)
        throw ModelIoError("model component mismatch: want " + component + ", model is " +
                           params.component);
    if (params.vocab_fingerprint != vocab_fp)
        throw ModelIoError("vocabulary fingerprint mismatch: model was trained on a different "
                           "tag domain");
    if (params.inventory_fingerprint != inventory_fp)
        throw ModelIoError("inventory fingerprint mismatch: model was trained on a different "
                           "label inventory");
}

}  // namespace catgen
