#include "catgen/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <sstream>

namespace catgen {

const char* oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::AC: return "AC";
        case OracleKind::PA: return "PA";
        case OracleKind::NG: return "NG";
        case OracleKind::OR: return "OR";
    }
    return "?";
}

OracleKind oracle_kind_from_name(const std::string& name) {
    std::string up;
    for (char c : name) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "AC") return OracleKind::AC;
    if (up == "PA") return OracleKind::PA;
    if (up == "NG") return OracleKind::NG;
    if (up == "OR") return OracleKind::OR;
    throw std::invalid_argument("unknown oracle kind: " + name);
}

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) out += t;
    return out;
}

// Collects the atom surfaces of a category tree.
void collect_atoms(const Category& c, std::vector<std::string>& out) {
    if (c.is_atom()) {
        out.push_back(c.atom_value().str());
        return;
    }
    collect_atoms(c.result(), out);
    collect_atoms(c.argument(), out);
}

// Every non-root complex subtree appears parenthesized in the canonical form.
void collect_parenthesized(const Category& c, bool is_root, std::vector<Category>& out) {
    if (c.is_atom()) return;
    if (!is_root) out.push_back(c);
    collect_parenthesized(c.result(), false, out);
    collect_parenthesized(c.argument(), false, out);
}

struct RankedSpan {
    std::vector<std::string> span;
    long weight = 0;
};

}  // namespace

void TagVocabulary::add_tag(AtomicTag tag) {
    std::string key = join(tag.span);
    if (by_span_.count(key)) return;  // dedupe by span
    by_span_[key] = static_cast<int>(tags_.size());
    tags_.push_back(std::move(tag));
}

void TagVocabulary::index_tags() {
    by_surface_.clear();
    by_first_token_.clear();
    for (std::size_t i = 0; i < tags_.size(); ++i) {
        by_surface_.emplace(tags_[i].surface, static_cast<int>(i));
        if (!tags_[i].span.empty())
            by_first_token_[tags_[i].span.front()].push_back(static_cast<int>(i));
    }
    for (auto& [tok, ids] : by_first_token_) {
        std::sort(ids.begin(), ids.end(), [this](int a, int b) {
            const auto& ta = tags_[static_cast<std::size_t>(a)];
            const auto& tb = tags_[static_cast<std::size_t>(b)];
            if (ta.span.size() != tb.span.size()) return ta.span.size() > tb.span.size();
            return ta.surface < tb.surface;
        });
    }
}

TagVocabulary TagVocabulary::build(const LabelInventory& inv, const OracleSpec& spec) {
    if (inv.size() == 0) throw std::invalid_argument("empty inventory");
    if ((spec.kind == OracleKind::PA || spec.kind == OracleKind::NG) && spec.k < 1)
        throw std::invalid_argument("k must be >= 1");
    if (spec.kind == OracleKind::NG && spec.n < 2)
        throw std::invalid_argument("n must be >= 2");

    TagVocabulary vocab;
    vocab.origin_ = spec;
    vocab.tags_.push_back(AtomicTag{"EOS", {}});
    vocab.by_span_[""] = 0;

    for (const char* s : {"(", ")", "/", "\\"})
        vocab.add_tag(AtomicTag{s, {s}});

    std::vector<std::string> atoms;
    for (const auto& c : inv.categories()) collect_atoms(c, atoms);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    for (const auto& a : atoms) vocab.add_tag(AtomicTag{a, {a}});

    // Extension tags, ranked by corpus token frequency (occurrences weighted
    // by the category's training count), ties by surface.
    std::map<std::string, RankedSpan> pool;
    auto tally = [&](std::vector<std::string> span, long weight) {
        std::string key = join(span);
        auto& entry = pool[key];
        if (entry.span.empty()) entry.span = std::move(span);
        entry.weight += weight;
    };
    if (spec.kind == OracleKind::PA) {
        for (const auto& c : inv.categories()) {
            long w = inv.frequency(c);
            std::vector<Category> subs;
            collect_parenthesized(c, true, subs);
            for (const auto& sub : subs) tally(tokenize(sub), w);
        }
    } else if (spec.kind == OracleKind::NG) {
        for (const auto& c : inv.categories()) {
            long w = inv.frequency(c);
            TokenSequence toks = tokenize(c);
            if (toks.size() < static_cast<std::size_t>(spec.n)) continue;
            for (std::size_t i = 0; i + spec.n <= toks.size(); ++i)
                tally(std::vector<std::string>(toks.begin() + i, toks.begin() + i + spec.n), w);
        }
    } else if (spec.kind == OracleKind::OR) {
        for (const auto& c : inv.categories()) tally(tokenize(c), inv.frequency(c));
    }

    if (spec.kind == OracleKind::PA || spec.kind == OracleKind::NG) {
        std::vector<std::pair<std::string, RankedSpan>> ranked(pool.begin(), pool.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second.weight != b.second.weight) return a.second.weight > b.second.weight;
            return a.first < b.first;
        });
        std::size_t take = std::min(ranked.size(), static_cast<std::size_t>(spec.k));
        for (std::size_t i = 0; i < take; ++i)
            vocab.add_tag(AtomicTag{ranked[i].first, ranked[i].second.span});
    } else if (spec.kind == OracleKind::OR) {
        for (auto& [surface, entry] : pool)
            vocab.add_tag(AtomicTag{surface, entry.span});
    }

    vocab.index_tags();
    return vocab;
}

const std::vector<int>& TagVocabulary::candidates_for(const std::string& first_token) const {
    static const std::vector<int> none;
    auto it = by_first_token_.find(first_token);
    return it == by_first_token_.end() ? none : it->second;
}

int TagVocabulary::find_surface(const std::string& surface) const {
    auto it = by_surface_.find(surface);
    return it == by_surface_.end() ? -1 : it->second;
}

std::string TagVocabulary::serialize() const {
    std::string out = "kind=";
    out += oracle_kind_name(origin_.kind);
    if (origin_.kind == OracleKind::NG) out += " n=" + std::to_string(origin_.n);
    if (origin_.kind == OracleKind::PA || origin_.kind == OracleKind::NG)
        out += " k=" + std::to_string(origin_.k);
    out += '\n';
    for (const auto& t : tags_) {
        out += t.surface;
        out += '\t';
        out += join(t.span);
        out += '\n';
    }
    return out;
}

TagVocabulary TagVocabulary::deserialize(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty vocabulary file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    OracleSpec spec;
    {
        std::istringstream hdr(line);
        std::string field;
        bool have_kind = false;
        while (hdr >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("malformed vocabulary header: " + line);
            std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            if (key == "kind") {
                spec.kind = oracle_kind_from_name(val);
                have_kind = true;
            } else if (key == "n") {
                spec.n = std::stoi(val);
            } else if (key == "k") {
                spec.k = std::stoi(val);
            } else {
                throw std::runtime_error("unknown vocabulary header field: " + key);
            }
        }
        if (!have_kind) throw std::runtime_error("vocabulary header missing kind");
    }
    TagVocabulary vocab;
    vocab.origin_ = spec;
    std::size_t lineno = 1;
    bool saw_eos = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed vocabulary line " + std::to_string(lineno));
        std::string surface = line.substr(0, tab);
        std::string joined = line.substr(tab + 1);
        if (surface == "EOS" && joined.empty()) {
            if (vocab.tags_.empty()) {
                vocab.tags_.push_back(AtomicTag{"EOS", {}});
                vocab.by_span_[""] = 0;
                saw_eos = true;
                continue;
            }
            throw std::runtime_error("EOS must be the first vocabulary entry");
        }
        if (!saw_eos) throw std::runtime_error("vocabulary must start with the EOS entry");
        vocab.add_tag(AtomicTag{surface, tokenize_surface(joined)});
    }
    if (!saw_eos) throw std::runtime_error("vocabulary missing EOS entry");
    vocab.index_tags();
    return vocab;
}

std::string TagVocabulary::fingerprint() const {
    return fingerprint_hex(serialize());
}

namespace {

// Matching tag ids at position pos of toks, longest span first.
std::vector<int> matches_at(const TokenSequence& toks, std::size_t pos,
                            const TagVocabulary& vocab) {
    std::vector<int> out;
    for (int id : vocab.candidates_for(toks[pos])) {
        const auto& span = vocab.tag(id).span;
        if (span.size() > toks.size() - pos) continue;
        if (std::equal(span.begin(), span.end(), toks.begin() + static_cast<long>(pos)))
            out.push_back(id);
    }
    return out;
}

}  // namespace

std::vector<int> decompose_deterministic(const Category& c, const TagVocabulary& vocab) {
    TokenSequence toks = tokenize(c);
    std::vector<int> seq;
    std::size_t pos = 0;
    while (pos < toks.size()) {
        auto ms = matches_at(toks, pos, vocab);
        if (ms.empty())
            throw std::logic_error("no vocabulary tag matches token " + toks[pos]);
        seq.push_back(ms.front());  // candidates are ordered longest first
        pos += vocab.tag(ms.front()).span.size();
    }
    seq.push_back(vocab.eos_id());
    return seq;
}

namespace {

void enumerate_rec(const TokenSequence& toks, std::size_t pos, const TagVocabulary& vocab,
                   std::vector<int>& prefix, std::vector<std::vector<int>>& out,
                   std::size_t limit) {
    if (out.size() >= limit) return;
    if (pos == toks.size()) {
        auto seq = prefix;
        seq.push_back(vocab.eos_id());
        out.push_back(std::move(seq));
        return;
    }
    for (int id : matches_at(toks, pos, vocab)) {
        prefix.push_back(id);
        enumerate_rec(toks, pos + vocab.tag(id).span.size(), vocab, prefix, out, limit);
        prefix.pop_back();
        if (out.size() >= limit) return;
    }
}

}  // namespace

std::vector<std::vector<int>> decompose_all(const Category& c, const TagVocabulary& vocab,
                                            std::size_t limit) {
    if (limit < 1) throw std::invalid_argument("limit must be >= 1");
    TokenSequence toks = tokenize(c);
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    enumerate_rec(toks, 0, vocab, prefix, out, limit);
    return out;
}

std::vector<int> sample_decomposition(const Category& c, const TagVocabulary& vocab,
                                      std::uint64_t rng_seed) {
    TokenSequence toks = tokenize(c);
    const std::size_t n = toks.size();
    // counts[i] = number of complete segmentations of the suffix starting at i,
    // saturating on overflow (only reachable for absurdly long categories).
    std::vector<std::uint64_t> counts(n + 1, 0);
    counts[n] = 1;
    auto sat_add = [](std::uint64_t a, std::uint64_t b) {
        return a > UINT64_MAX - b ? UINT64_MAX : a + b;
    };
    for (std::size_t i = n; i-- > 0;) {
        for (int id : matches_at(toks, i, vocab))
            counts[i] = sat_add(counts[i], counts[i + vocab.tag(id).span.size()]);
    }
    std::mt19937_64 rng(rng_seed);
    std::vector<int> seq;
    std::size_t pos = 0;
    while (pos < n) {
        auto ms = matches_at(toks, pos, vocab);
        std::uint64_t total = counts[pos];
        std::uint64_t draw = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng);
        std::uint64_t acc = 0;
        int chosen = ms.front();
        for (int id : ms) {
            acc = sat_add(acc, counts[pos + vocab.tag(id).span.size()]);
            if (draw < acc) {
                chosen = id;
                break;
            }
        }
        seq.push_back(chosen);
        pos += vocab.tag(chosen).span.size();
    }
    seq.push_back(vocab.eos_id());
    return seq;
}

Category reassemble(const std::vector<int>& seq, const TagVocabulary& vocab) {
    if (seq.empty() || seq.back() != vocab.eos_id())
        throw std::invalid_argument("tag sequence must end with EOS");
    std::string joined;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] == vocab.eos_id())
            throw IllFormedError("EOS inside tag sequence");
        for (const auto& tok : vocab.tag(seq[i]).span) joined += tok;
    }
    try {
        return parse_category(joined);
    } catch (const ParseError& e) {
        throw IllFormedError("tag sequence joins to \"" + joined + "\": " + e.what());
    }
}

std::vector<std::string> tag_surfaces(const std::vector<int>& seq, const TagVocabulary& vocab) {
    std::vector<std::string> out;
    out.reserve(seq.size());
    for (int id : seq) out.push_back(vocab.tag(id).surface);
    return out;
}

}  // namespace catgen
