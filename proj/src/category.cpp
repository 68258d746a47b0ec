#include "catgen/category.hpp"

#include <algorithm>
#include <cctype>

namespace catgen {

namespace {

bool is_special(char c) {
    return c == '(' || c == ')' || c == '/' || c == '\\' || c == '[' || c == ']';
}

bool is_base_char(char c) {
    return !is_special(c) && !std::isspace(static_cast<unsigned char>(c));
}

void validate_atom(const AtomicCategory& a) {
    if (a.base.empty())
        throw std::invalid_argument("atomic category base must be nonempty");
    for (char c : a.base)
        if (!is_base_char(c))
            throw std::invalid_argument("atomic category base contains reserved character: " + a.base);
    for (char c : a.feature)
        if (!is_base_char(c))
            throw std::invalid_argument("atomic category feature contains reserved character: " + a.feature);
}

}  // namespace

AtomicCategory::AtomicCategory(std::string b, std::string f)
    : base(std::move(b)), feature(std::move(f)) {
    validate_atom(*this);
}

std::string AtomicCategory::str() const {
    if (feature.empty()) return base;
    return base + "[" + feature + "]";
}

struct Category::Node {
    bool leaf;
    AtomicCategory atom;     // leaf only
    Category result;         // complex only
    Category argument;
    SlashOp op = SlashOp::Forward;
    std::string canon;       // canonical printed form
    std::string canon_wrapped;  // canonical form as it appears inside a parent
};

Category Category::atom(AtomicCategory a) {
    auto n = std::make_shared<Node>();
    n->leaf = true;
    n->atom = std::move(a);
    validate_atom(n->atom);
    n->canon = n->atom.str();
    n->canon_wrapped = n->canon;
    return Category(std::move(n));
}

Category Category::atom(std::string base, std::string feature) {
    return atom(AtomicCategory(std::move(base), std::move(feature)));
}

Category Category::complex(Category result, SlashOp op, Category argument) {
    if (!result.valid() || !argument.valid())
        throw std::invalid_argument("complex category requires valid children");
    auto n = std::make_shared<Node>();
    n->leaf = false;
    n->result = std::move(result);
    n->argument = std::move(argument);
    n->op = op;
    n->canon = n->result.node_->canon_wrapped + slash_char(op) + n->argument.node_->canon_wrapped;
    n->canon_wrapped = "(" + n->canon + ")";
    return Category(std::move(n));
}

bool Category::is_atom() const { return node_->leaf; }
const AtomicCategory& Category::atom_value() const { return node_->atom; }
const Category& Category::result() const { return node_->result; }
const Category& Category::argument() const { return node_->argument; }
SlashOp Category::op() const { return node_->op; }
const std::string& Category::str() const { return node_->canon; }

bool Category::operator==(const Category& o) const {
    if (node_ == o.node_) return true;
    if (!node_ || !o.node_) return false;
    // Canonical strings determine the tree: the grammar is unambiguous.
    return node_->canon == o.node_->canon;
}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

// Recursive-descent parser over the raw text; offsets are byte positions.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Category parse() {
        if (text_.empty()) throw ParseError("empty category", 0);
        Category c = parse_cat();
        if (pos_ < text_.size()) {
            if (text_[pos_] == ')')
                throw ParseError("unbalanced parenthesis", pos_);
            throw ParseError("unexpected trailing text", pos_);
        }
        return c;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    Category parse_cat() {
        Category left = parse_term();
        while (!eof() && (peek() == '/' || peek() == '\\')) {
            std::size_t slash_at = pos_;
            SlashOp op = peek() == '/' ? SlashOp::Forward : SlashOp::Backward;
            ++pos_;
            if (eof() || peek() == ')' || peek() == '/' || peek() == '\\')
                throw ParseError("dangling slash", slash_at);
            Category right = parse_term();
            left = Category::complex(std::move(left), op, std::move(right));
        }
        return left;
    }

    Category parse_term() {
        if (eof()) throw ParseError("empty category", pos_);
        char c = peek();
        if (c == '(') {
            std::size_t open_at = pos_;
            ++pos_;
            if (!eof() && peek() == ')') throw ParseError("empty category", pos_);
            Category inner = parse_cat();
            if (eof() || peek() != ')')
                throw ParseError("unbalanced parenthesis", open_at);
            ++pos_;
            return inner;  // redundant outer parentheses are absorbed
        }
        if (c == ')') throw ParseError("empty category", pos_);
        if (c == '[' || c == ']') throw ParseError("malformed feature bracket", pos_);
        return parse_atom();
    }

    Category parse_atom() {
        std::size_t start = pos_;
        while (!eof() && is_base_char(peek())) ++pos_;
        if (pos_ == start) throw ParseError("unexpected character", pos_);
        std::string base(text_.substr(start, pos_ - start));
        std::string feature;
        if (!eof() && peek() == '[') {
            std::size_t open_at = pos_;
            ++pos_;
            std::size_t fstart = pos_;
            while (!eof() && is_base_char(peek())) ++pos_;
            if (pos_ == fstart || eof() || peek() != ']')
                throw ParseError("malformed feature bracket", open_at);
            feature.assign(text_.substr(fstart, pos_ - fstart));
            ++pos_;
        }
        if (!eof() && peek() == '[')
            throw ParseError("malformed feature bracket", pos_);
        return Category::atom(std::move(base), std::move(feature));
    }
};

}  // namespace

Category parse_category(std::string_view text) { return Parser(text).parse(); }

std::string print_category(const Category& c) { return c.str(); }

namespace {

void tokenize_rec(const Category& c, bool wrapped, TokenSequence& out) {
    if (c.is_atom()) {
        out.push_back(c.atom_value().str());
        return;
    }
    if (wrapped) out.push_back("(");
    tokenize_rec(c.result(), true, out);
    out.push_back(std::string(1, slash_char(c.op())));
    tokenize_rec(c.argument(), true, out);
    if (wrapped) out.push_back(")");
}

}  // namespace

TokenSequence tokenize(const Category& c) {
    TokenSequence out;
    tokenize_rec(c, false, out);
    return out;
}

TokenSequence tokenize_surface(std::string_view text) {
    TokenSequence out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '(' || c == ')' || c == '/' || c == '\\') {
            out.push_back(std::string(1, c));
            ++i;
            continue;
        }
        if (c == '[' || c == ']')
            throw ParseError("malformed feature bracket", i);
        std::size_t start = i;
        while (i < text.size() && is_base_char(text[i])) ++i;
        if (i == start) throw ParseError("unexpected character", i);
        if (i < text.size() && text[i] == '[') {
            std::size_t open_at = i;
            ++i;
            while (i < text.size() && text[i] != ']') {
                if (text[i] == '[') throw ParseError("malformed feature bracket", i);
                ++i;
            }
            if (i >= text.size()) throw ParseError("malformed feature bracket", open_at);
            ++i;  // consume ']'
        }
        out.push_back(std::string(text.substr(start, i - start)));
    }
    return out;
}

std::size_t category_length(const Category& c) { return tokenize(c).size(); }

Category strip_features(const Category& c) {
    if (c.is_atom()) {
        if (c.atom_value().feature.empty()) return c;
        return Category::atom(c.atom_value().base);
    }
    return Category::complex(strip_features(c.result()), c.op(), strip_features(c.argument()));
}

const std::vector<std::string>& default_punctuation() {
    static const std::vector<std::string> punct = {".", ",", ";", ":", "LRB", "RRB"};
    return punct;
}

bool is_punctuation_base(const std::string& base, const std::vector<std::string>& punct) {
    return std::find(punct.begin(), punct.end(), base) != punct.end();
}

bool is_punctuation_category(const Category& c, const std::vector<std::string>& punct) {
    return c.is_atom() && is_punctuation_base(c.atom_value().base, punct);
}

}  // namespace catgen
