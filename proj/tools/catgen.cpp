// catgen: command-line surface for the supertagging-by-generation toolkit.
//
// Subcommands: build-vocab, train, tag, rerank, eval, trace. Every run echoes
// its resolved configuration, and free-format output files carry the same
// line as a '#' header so results are reproducible byte for byte.

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "catgen/decode.hpp"
#include "catgen/eval.hpp"
#include "catgen/rerank.hpp"

using namespace catgen;

namespace {

std::string double_str(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Config {
    std::string corpus;
    std::string format = "pipe";
    std::string oracle = "ac";
    int n = 2;
    int k = 10;
    bool nondet = false;
    long threshold = 10;
    int beam = 4;
    int kbest = 1;
    double lambda = kDefaultLambda;
    double nu = kDefaultNu;
    std::uint64_t seed = 1;
    int epochs = 10;
    double lr = 0.1;
    std::string component = "classifier";
    std::string mode = "classifier";
    std::string model;
    std::string vocab;
    std::string inventory;
    std::string out;
    std::string pred;
    std::vector<std::string> dumps;
    std::string report;
    std::string category;
    std::string ks = "1,2,4,8";
    bool tsv = false;
};

CorpusFormat parse_format(const std::string& f) {
    if (f == "pipe") return CorpusFormat::Pipe;
    if (f == "tsv") return CorpusFormat::Tsv;
    throw CLI::ValidationError("--format must be pipe or tsv");
}

// Deterministic "key=value ..." line describing the resolved run.
std::string config_line(const std::string& sub, const std::map<std::string, std::string>& kv) {
    std::string out = "catgen " + sub;
    for (const auto& [key, val] : kv) out += " " + key + "=" + val;
    return out;
}

void echo_config(const std::string& line) { std::cout << "# " << line << "\n"; }

std::ofstream open_output(const std::string& path, const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "# " << header << "\n";
    return out;
}

LabelInventory load_inventory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open inventory file: " + path);
    return LabelInventory::deserialize(in);
}

TagVocabulary load_vocab_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    return TagVocabulary::deserialize(in);
}

std::vector<int> parse_ks(const std::string& spec) {
    std::vector<int> ks;
    std::istringstream in(spec);
    std::string field;
    while (std::getline(in, field, ',')) ks.push_back(std::stoi(field));
    if (ks.empty()) throw std::runtime_error("--ks must list at least one cutoff");
    return ks;
}

void write_dump_entries(std::ofstream& out, std::size_t sent, const DecodeResult& res) {
    for (std::size_t r = 0; r < res.kbest.size(); ++r) {
        const auto& e = res.kbest[r];
        out << sent << '\t' << res.word_index << '\t' << r << '\t' << double_str(e.logprob)
            << '\t' << (e.legal ? 1 : 0) << '\t' << e.joined() << '\t'
            << (e.legal ? e.category.str() : std::string("ILLFORMED")) << '\n';
    }
}

int cmd_build_vocab(const Config& cfg) {
    auto corpus = read_corpus(cfg.corpus, parse_format(cfg.format));
    auto inv = LabelInventory::build(corpus, cfg.threshold);
    OracleSpec spec;
    spec.kind = oracle_kind_from_name(cfg.oracle);
    spec.k = cfg.k;
    spec.n = cfg.n;
    spec.deterministic = !cfg.nondet;
    auto vocab = TagVocabulary::build(inv, spec);

    std::map<std::string, std::string> kv = {
        {"corpus", cfg.corpus},   {"format", cfg.format},
        {"oracle", oracle_kind_name(spec.kind)}, {"n", std::to_string(cfg.n)},
        {"k", std::to_string(cfg.k)},            {"threshold", std::to_string(cfg.threshold)},
        {"inventory", cfg.inventory},            {"vocab", cfg.vocab}};
    echo_config(config_line("build-vocab", kv));

    {
        std::ofstream out(cfg.inventory, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + cfg.inventory);
        out << inv.serialize();
    }
    {
        std::ofstream out(cfg.vocab, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + cfg.vocab);
        out << vocab.serialize();
    }

    double total_len = 0.0;
    for (const auto& c : inv.categories())
        total_len += static_cast<double>(decompose_deterministic(c, vocab).size());
    double mean_len = inv.size() ? total_len / static_cast<double>(inv.size()) : 0.0;
    std::cout << "categories_kept=" << inv.size() << " categories_distinct="
              << inv.distinct_in_training() << " tags=" << vocab.size() << " mean_len=";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", mean_len);
    std::cout << buf << "\n";
    return 0;
}

int cmd_train(const Config& cfg) {
    auto corpus = read_corpus(cfg.corpus, parse_format(cfg.format));
    auto inv = load_inventory_file(cfg.inventory);
    TrainOptions opts;
    opts.learning_rate = cfg.lr;
    opts.epochs = cfg.epochs;
    opts.seed = cfg.seed;
    std::vector<double> losses;
    opts.epoch_losses = &losses;

    std::map<std::string, std::string> kv = {
        {"component", cfg.component}, {"corpus", cfg.corpus},
        {"format", cfg.format},       {"inventory", cfg.inventory},
        {"epochs", std::to_string(cfg.epochs)}, {"lr", double_str(cfg.lr)},
        {"seed", std::to_string(cfg.seed)},     {"model", cfg.model}};

    ModelParameters params;
    if (cfg.component == "classifier") {
        echo_config(config_line("train", kv));
        params = train_classifier(corpus, inv, opts);
    } else if (cfg.component == "generator") {
        if (cfg.vocab.empty()) throw std::runtime_error("training a generator needs --vocab");
        auto vocab = load_vocab_file(cfg.vocab);
        OracleSpec spec = vocab.origin();
        spec.deterministic = !cfg.nondet;
        kv["vocab"] = cfg.vocab;
        kv["nondet"] = cfg.nondet ? "1" : "0";
        echo_config(config_line("train", kv));
        params = train_generator(corpus, inv, vocab, spec, opts);
    } else if (cfg.component == "transition") {
        echo_config(config_line("train", kv));
        params = train_transition(corpus, inv, opts);
    } else {
        throw std::runtime_error("--component must be classifier, generator or transition");
    }

    for (std::size_t e = 0; e < losses.size(); ++e)
        std::cerr << "epoch " << (e + 1) << " loss " << losses[e] << "\n";
    save_model(params, cfg.model);
    std::cout << "model=" << cfg.model << " weights=" << params.weights.size() << "\n";
    return 0;
}

int cmd_tag(const Config& cfg) {
    auto corpus = read_corpus(cfg.corpus, parse_format(cfg.format));
    auto inv = load_inventory_file(cfg.inventory);
    auto params = load_model(cfg.model);

    TagArtifacts art;
    art.inventory = &inv;
    art.params = &params;
    art.beam = cfg.beam;

    TagVocabulary vocab;
    TagMode mode;
    if (cfg.mode == "classifier") {
        mode = TagMode::Classifier;
    } else if (cfg.mode == "tagwise") {
        if (cfg.vocab.empty()) throw std::runtime_error("tagwise mode needs --vocab");
        vocab = load_vocab_file(cfg.vocab);
        art.vocab = &vocab;
        mode = TagMode::Tagwise;
    } else if (cfg.mode == "transition") {
        mode = TagMode::Transition;
    } else {
        throw std::runtime_error("--mode must be classifier, tagwise or transition");
    }

    std::map<std::string, std::string> kv = {
        {"mode", cfg.mode},     {"corpus", cfg.corpus},  {"format", cfg.format},
        {"inventory", cfg.inventory}, {"model", cfg.model},
        {"beam", std::to_string(cfg.beam)}, {"kbest", std::to_string(cfg.kbest)},
        {"out", cfg.out}};
    if (!cfg.vocab.empty()) kv["vocab"] = cfg.vocab;
    if (!cfg.dumps.empty()) kv["dump"] = cfg.dumps.front();
    std::string header = config_line("tag", kv);
    echo_config(header);

    std::ofstream pred_out = open_output(cfg.out, header);
    std::ofstream dump_out;
    bool dumping = !cfg.dumps.empty();
    if (dumping) dump_out = open_output(cfg.dumps.front(), header);

    std::vector<DecodeResult> all_results;
    auto atoms = inventory_atoms(inv);
    for (std::size_t s = 0; s < corpus.size(); ++s) {
        const auto& sent = corpus[s];
        auto pred = tag_sentence(sent.words, mode, art);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (i) pred_out << ' ';
            pred_out << pred[i].str();
        }
        pred_out << '\n';
        if (!dumping) continue;
        for (int i = 0; i < static_cast<int>(sent.size()); ++i) {
            DecodeResult res;
            if (mode == TagMode::Tagwise) {
                res = decode_tagwise(sent.words, i, vocab, params,
                                     std::max(cfg.beam, cfg.kbest), cfg.kbest);
            } else if (mode == TagMode::Transition) {
                res = decode_transition(sent.words, i, atoms, params,
                                        std::max(cfg.beam, cfg.kbest), cfg.kbest);
            } else {
                // classifier top-k as a degenerate one-tag "sequence"
                res.word_index = i;
                auto dist = classifier_distribution(make_context(sent.words, i), inv, params);
                std::vector<std::size_t> order(dist.size());
                for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (dist[a] != dist[b]) return dist[a] > dist[b];
                    return inv.categories()[a].str() < inv.categories()[b].str();
                });
                for (std::size_t r = 0; r < order.size() && r < static_cast<std::size_t>(cfg.kbest); ++r) {
                    KBestEntry e;
                    e.legal = true;
                    e.category = inv.categories()[order[r]];
                    e.surfaces = {e.category.str()};
                    e.step_logps = {floored_log(dist[order[r]])};
                    e.logprob = e.step_logps[0];
                    res.kbest.push_back(std::move(e));
                }
            }
            write_dump_entries(dump_out, s, res);
            all_results.push_back(std::move(res));
        }
    }
    if (dumping)
        std::cout << "illegal_rate=" << double_str(illegal_rate(all_results, cfg.kbest)) << "\n";
    return 0;
}

struct DumpEntry {
    std::size_t sent = 0;
    int word = 0;
    KBestEntry entry;
};

std::vector<DumpEntry> read_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump file: " + path);
    std::vector<DumpEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            if (tab == std::string::npos) {
                cols.push_back(line.substr(start));
                break;
            }
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (cols.size() != 7)
            throw std::runtime_error(path + ": malformed dump line " + std::to_string(lineno));
        DumpEntry d;
        d.sent = std::stoull(cols[0]);
        d.word = std::stoi(cols[1]);
        d.entry.logprob = std::stod(cols[3]);
        d.entry.legal = cols[4] == "1";
        std::istringstream surf(cols[5]);
        std::string tok;
        while (surf >> tok) d.entry.surfaces.push_back(tok);
        if (d.entry.legal) d.entry.category = parse_category(cols[6]);
        out.push_back(std::move(d));
    }
    return out;
}

int cmd_rerank(const Config& cfg) {
    auto corpus = read_corpus(cfg.corpus, parse_format(cfg.format));
    auto inv = load_inventory_file(cfg.inventory);
    auto params = load_model(cfg.model);
    require_compatible(params, "classifier", inv.fingerprint(), inv.fingerprint());
    if (cfg.dumps.empty()) throw std::runtime_error("rerank needs at least one --dump");

    // position -> per-source candidates
    std::map<std::pair<std::size_t, int>, std::vector<SourceCandidates>> by_pos;
    std::vector<std::pair<std::size_t, int>> first_positions;
    for (std::size_t d = 0; d < cfg.dumps.size(); ++d) {
        auto entries = read_dump(cfg.dumps[d]);
        std::vector<std::pair<std::size_t, int>> positions;
        for (auto& e : entries) {
            auto key = std::make_pair(e.sent, e.word);
            if (positions.empty() || positions.back() != key) positions.push_back(key);
            auto& sources = by_pos[key];
            if (sources.empty() || sources.back().source != cfg.dumps[d]) {
                SourceCandidates sc;
                sc.source = cfg.dumps[d];
                sources.push_back(std::move(sc));
            }
            sources.back().entries.push_back(std::move(e.entry));
        }
        std::sort(positions.begin(), positions.end());
        if (d == 0)
            first_positions = positions;
        else if (positions != first_positions)
            throw std::runtime_error("mismatched corpora across dumps: " + cfg.dumps[d]);
    }
    // dump positions must cover the corpus exactly
    std::vector<std::pair<std::size_t, int>> corpus_positions;
    for (std::size_t s = 0; s < corpus.size(); ++s)
        for (int i = 0; i < static_cast<int>(corpus[s].size()); ++i)
            corpus_positions.emplace_back(s, i);
    if (first_positions != corpus_positions)
        throw std::runtime_error("dump positions do not match the corpus");

    std::map<std::string, std::string> kv = {
        {"corpus", cfg.corpus},       {"format", cfg.format},
        {"inventory", cfg.inventory}, {"model", cfg.model},
        {"lambda", double_str(cfg.lambda)}, {"nu", double_str(cfg.nu)},
        {"out", cfg.out}};
    for (std::size_t d = 0; d < cfg.dumps.size(); ++d)
        kv["dump" + std::to_string(d)] = cfg.dumps[d];
    std::string header = config_line("rerank", kv);
    echo_config(header);

    std::ofstream pred_out = open_output(cfg.out, header);
    std::ofstream report_out;
    if (!cfg.report.empty()) report_out = open_output(cfg.report, header);

    for (std::size_t s = 0; s < corpus.size(); ++s) {
        const auto& sent = corpus[s];
        for (int i = 0; i < static_cast<int>(sent.size()); ++i) {
            auto dist = classifier_distribution(make_context(sent.words, i), inv, params);
            auto scores = ClassifierScores::from_distribution(inv, dist);
            auto chosen = rerank_position(by_pos[{s, i}], scores, cfg.lambda, cfg.nu);
            if (i) pred_out << ' ';
            pred_out << chosen.category.str();
            if (report_out.is_open())
                report_out << sent.words[static_cast<std::size_t>(i)] << '\t'
                           << sent.gold[static_cast<std::size_t>(i)].str() << '\t'
                           << chosen.category.str() << '\t' << double_str(chosen.u) << '\t'
                           << double_str(chosen.v) << '\t' << double_str(chosen.combined) << '\t'
                           << (chosen.fallback ? "classifier-fallback" : chosen.source) << '\n';
        }
        pred_out << '\n';
    }
    return 0;
}

std::vector<std::vector<Category>> read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open predictions file: " + path);
    std::vector<std::vector<Category>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream fields(line);
        std::vector<Category> sent;
        std::string tok;
        while (fields >> tok) sent.push_back(parse_category(tok));
        out.push_back(std::move(sent));
    }
    return out;
}

int cmd_eval(const Config& cfg) {
    auto corpus = read_corpus(cfg.corpus, parse_format(cfg.format));
    auto inv = load_inventory_file(cfg.inventory);
    auto preds = read_predictions(cfg.pred);
    if (preds.size() != corpus.size())
        throw std::runtime_error("alignment mismatch: " + std::to_string(preds.size()) +
                                 " predicted sentences vs " + std::to_string(corpus.size()));
    std::vector<Category> flat_pred, flat_gold;
    for (std::size_t s = 0; s < corpus.size(); ++s) {
        if (preds[s].size() != corpus[s].size())
            throw std::runtime_error("alignment mismatch at sentence " + std::to_string(s));
        flat_pred.insert(flat_pred.end(), preds[s].begin(), preds[s].end());
        flat_gold.insert(flat_gold.end(), corpus[s].gold.begin(), corpus[s].gold.end());
    }

    std::vector<DecodeResult> kbest;
    const std::vector<DecodeResult>* kbest_ptr = nullptr;
    if (!cfg.dumps.empty()) {
        auto entries = read_dump(cfg.dumps.front());
        std::map<std::pair<std::size_t, int>, DecodeResult> grouped;
        for (auto& e : entries) {
            auto& res = grouped[{e.sent, e.word}];
            res.word_index = e.word;
            res.kbest.push_back(std::move(e.entry));
        }
        if (grouped.size() != flat_gold.size())
            throw std::runtime_error("alignment mismatch between dump and corpus");
        for (auto& [key, res] : grouped) kbest.push_back(std::move(res));
        kbest_ptr = &kbest;
    }

    std::map<std::string, std::string> kv = {{"corpus", cfg.corpus},
                                             {"format", cfg.format},
                                             {"inventory", cfg.inventory},
                                             {"pred", cfg.pred},
                                             {"ks", cfg.ks}};
    if (!cfg.dumps.empty()) kv["dump"] = cfg.dumps.front();
    std::string header = config_line("eval", kv);
    echo_config(header);

    auto report = evaluate(flat_pred, flat_gold, inv, default_buckets(), kbest_ptr,
                           parse_ks(cfg.ks));
    std::string rendered = render_report(report, cfg.tsv ? ReportFormat::Tsv : ReportFormat::Text);
    if (cfg.out.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out = open_output(cfg.out, header);
        out << rendered;
    }
    return 0;
}

int cmd_trace(const Config& cfg) {
    Category c = parse_category(cfg.category);
    echo_config(config_line("trace", {{"category", cfg.category}}));
    std::cout << render_trace(c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CCG supertagging by category generation"};
    app.require_subcommand(1);
    app.set_config("--config");
    Config cfg;

    auto add_corpus = [&](CLI::App* sub) {
        sub->add_option("--corpus", cfg.corpus, "corpus file")->required();
        sub->add_option("--format", cfg.format, "corpus format: pipe or tsv");
    };

    auto* build = app.add_subcommand("build-vocab", "build inventory and tag vocabulary");
    add_corpus(build);
    build->add_option("--oracle", cfg.oracle, "oracle kind: ac, pa, ng, or");
    build->add_option("--n", cfg.n, "n-gram order (ng)");
    build->add_option("--k", cfg.k, "top-k cutoff (pa/ng)");
    build->add_option("--threshold", cfg.threshold, "minimum training frequency");
    build->add_option("--inventory", cfg.inventory, "inventory output path")->required();
    build->add_option("--vocab", cfg.vocab, "vocabulary output path")->required();

    auto* train = app.add_subcommand("train", "train a scorer");
    add_corpus(train);
    train->add_option("--component", cfg.component, "classifier, generator or transition")
        ->required();
    train->add_option("--inventory", cfg.inventory, "inventory file")->required();
    train->add_option("--vocab", cfg.vocab, "vocabulary file (generator)");
    train->add_flag("--nondet", cfg.nondet, "resample oracle decompositions every epoch");
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--lr", cfg.lr, "learning rate");
    train->add_option("--seed", cfg.seed, "random seed");
    train->add_option("--model", cfg.model, "model output path")->required();

    auto* tag = app.add_subcommand("tag", "tag a corpus");
    add_corpus(tag);
    tag->add_option("--mode", cfg.mode, "classifier, tagwise or transition")->required();
    tag->add_option("--inventory", cfg.inventory, "inventory file")->required();
    tag->add_option("--vocab", cfg.vocab, "vocabulary file (tagwise)");
    tag->add_option("--model", cfg.model, "model file")->required();
    tag->add_option("--beam", cfg.beam, "beam width");
    tag->add_option("--kbest", cfg.kbest, "k-best size for --dump");
    tag->add_option("--out", cfg.out, "predictions output path")->required();
    tag->add_option("--dump", cfg.dumps, "k-best dump output path");

    auto* rerank = app.add_subcommand("rerank", "combine k-best dumps with a classifier");
    add_corpus(rerank);
    rerank->add_option("--inventory", cfg.inventory, "inventory file")->required();
    rerank->add_option("--model", cfg.model, "classifier model file")->required();
    rerank->add_option("--dump", cfg.dumps, "k-best dump input (repeatable)")->required();
    rerank->add_option("--lambda", cfg.lambda, "generator weight");
    rerank->add_option("--nu", cfg.nu, "length penalty exponent");
    rerank->add_option("--out", cfg.out, "predictions output path")->required();
    rerank->add_option("--report", cfg.report, "per-position report output path");

    auto* eval = app.add_subcommand("eval", "score predictions against gold");
    add_corpus(eval);
    eval->add_option("--inventory", cfg.inventory, "inventory file")->required();
    eval->add_option("--pred", cfg.pred, "predictions file")->required();
    eval->add_option("--dump", cfg.dumps, "k-best dump for unseen-category p@k");
    eval->add_option("--ks", cfg.ks, "comma-separated p@k cutoffs");
    eval->add_flag("--tsv", cfg.tsv, "render the report as TSV");
    eval->add_option("--out", cfg.out, "report output path (default stdout)");

    auto* trace = app.add_subcommand("trace", "print the oracle transition trace of a category");
    trace->add_option("--category", cfg.category, "category string")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build_vocab(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (tag->parsed()) return cmd_tag(cfg);
        if (rerank->parsed()) return cmd_rerank(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (trace->parsed()) return cmd_trace(cfg);
    } catch (const std::exception& e) {
        std::cerr << "catgen: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
