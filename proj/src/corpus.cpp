#include "catgen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace catgen {

CorpusError::CorpusError(const std::string& what, std::size_t line)
    : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t at = s.find(sep, start);
        if (at == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

Category parse_gold(const std::string& text, std::size_t line) {
    try {
        return parse_category(text);
    } catch (const ParseError& e) {
        throw CorpusError(std::string("unparseable category \"") + text + "\": " + e.what(), line);
    }
}

std::vector<TaggedSentence> read_pipe(std::istream& in) {
    std::vector<TaggedSentence> sents;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        TaggedSentence sent;
        std::string tok;
        while (fields >> tok) {
            auto parts = split(tok, '|');
            if (parts.size() == 2)
                throw CorpusError("missing POS field in token \"" + tok + "\"", lineno);
            if (parts.size() != 3 || parts[0].empty() || parts[1].empty() || parts[2].empty())
                throw CorpusError("ragged token \"" + tok + "\"", lineno);
            sent.words.push_back(parts[0]);
            sent.pos.push_back(parts[1]);
            sent.gold.push_back(parse_gold(parts[2], lineno));
        }
        if (!sent.words.empty()) sents.push_back(std::move(sent));
    }
    return sents;
}

std::vector<TaggedSentence> read_tsv(std::istream& in) {
    std::vector<TaggedSentence> sents;
    TaggedSentence sent;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (!sent.words.empty()) {
            sents.push_back(std::move(sent));
            sent = TaggedSentence{};
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        auto parts = split(line, '\t');
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
            throw CorpusError("ragged token \"" + line + "\"", lineno);
        sent.words.push_back(parts[0]);
        sent.gold.push_back(parse_gold(parts[1], lineno));
    }
    flush();
    return sents;
}

}  // namespace

std::vector<TaggedSentence> read_corpus(std::istream& in, CorpusFormat format) {
    auto sents = format == CorpusFormat::Pipe ? read_pipe(in) : read_tsv(in);
    if (sents.empty()) throw CorpusError("empty corpus", 0);
    return sents;
}

std::vector<TaggedSentence> read_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return read_corpus(in, format);
}

std::string write_corpus_pipe(const std::vector<TaggedSentence>& sents) {
    std::string out;
    for (const auto& s : sents) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += ' ';
            out += s.words[i];
            out += '|';
            out += s.pos.empty() ? "-" : s.pos[i];
            out += '|';
            out += s.gold[i].str();
        }
        out += '\n';
    }
    return out;
}

LabelInventory LabelInventory::build(const std::vector<TaggedSentence>& train, long threshold) {
    if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    if (train.empty()) throw std::invalid_argument("empty training set");
    std::vector<std::pair<Category, long>> counts;
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& s : train) {
        for (const auto& g : s.gold) {
            auto it = seen.find(g.str());
            if (it == seen.end()) {
                seen.emplace(g.str(), counts.size());
                counts.emplace_back(g, 1);
            } else {
                ++counts[it->second].second;
            }
        }
    }
    return from_counts(counts, threshold);
}

LabelInventory LabelInventory::from_counts(const std::vector<std::pair<Category, long>>& counts,
                                           long threshold) {
    if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    LabelInventory inv;
    inv.threshold_ = threshold;
    std::vector<std::pair<Category, long>> kept;
    for (const auto& [cat, n] : counts) {
        if (inv.all_freq_.count(cat.str()))
            throw std::invalid_argument("duplicate category in counts: " + cat.str());
        inv.all_freq_[cat.str()] = n;
        inv.total_tokens_ += n;
        if (n >= threshold) kept.emplace_back(cat, n);
    }
    inv.distinct_in_training_ = counts.size();
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first.str() < b.first.str();
    });
    for (auto& [cat, n] : kept) {
        inv.index_[cat.str()] = static_cast<int>(inv.categories_.size());
        inv.categories_.push_back(cat);
    }
    return inv;
}

bool LabelInventory::contains(const Category& c) const {
    return index_.count(c.str()) != 0;
}

long LabelInventory::frequency(const Category& c) const {
    auto it = all_freq_.find(c.str());
    return it == all_freq_.end() ? 0 : it->second;
}

int LabelInventory::index_of(const Category& c) const {
    auto it = index_.find(c.str());
    return it == index_.end() ? -1 : it->second;
}

std::string LabelInventory::serialize() const {
    std::string out = "threshold=" + std::to_string(threshold_) + "\n";
    for (const auto& c : categories_) {
        out += c.str();
        out += '\t';
        out += std::to_string(frequency(c));
        out += '\n';
    }
    return out;
}

LabelInventory LabelInventory::deserialize(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw CorpusError("empty inventory file", 0);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("threshold=", 0) != 0)
        throw CorpusError("inventory header must be threshold=<n>", lineno);
    long threshold = std::stol(line.substr(10));
    std::vector<std::pair<Category, long>> counts;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw CorpusError("malformed inventory line", lineno);
        Category cat = parse_gold(line.substr(0, tab), lineno);
        long n = std::stol(line.substr(tab + 1));
        counts.emplace_back(cat, n);
    }
    auto inv = from_counts(counts, threshold);
    // Counts of excluded categories are not persisted.
    inv.distinct_in_training_ = inv.categories_.size();
    return inv;
}

std::string LabelInventory::fingerprint() const {
    return fingerprint_hex(serialize());
}

std::vector<bool> unk_mask(const TaggedSentence& sentence, const LabelInventory& inv) {
    std::vector<bool> mask(sentence.size());
    for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (sentence.gold[i].str() == inv.unk_marker())
            throw std::runtime_error("reserved label in corpus: " + inv.unk_marker());
        mask[i] = !inv.contains(sentence.gold[i]);
    }
    return mask;
}

std::string fingerprint_hex(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hexd = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hexd[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace catgen
