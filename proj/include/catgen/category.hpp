#ifndef CATGEN_CATEGORY_HPP
#define CATGEN_CATEGORY_HPP

// CCG categories as immutable binary trees of atomic categories joined by
// forward/backward slash operators, plus the category text grammar:
//
//   Cat     := Term (Slash Term)*        (slashes fold left: S\NP/NP == (S\NP)/NP)
//   Term    := AtomTok | "(" Cat ")"
//   AtomTok := base ("[" feature "]")?
//   Slash   := "/" | "\"

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catgen {

enum class SlashOp : unsigned char { Forward, Backward };

inline char slash_char(SlashOp op) { return op == SlashOp::Forward ? '/' : '\\'; }

// Atomic category: a short base identifier plus an optional feature,
// e.g. NP, S[dcl], conj, or a punctuation symbol such as "," or LRB.
struct AtomicCategory {
    std::string base;
    std::string feature;  // empty = no feature

    AtomicCategory() = default;
    AtomicCategory(std::string b, std::string f = "");

    // Surface form: "S[dcl]" or "NP".
    std::string str() const;

    bool operator==(const AtomicCategory& o) const {
        return base == o.base && feature == o.feature;
    }
};

// Immutable category tree with value semantics; nodes are shared, never
// mutated, and safe to pass across threads. Equality is structural.
class Category {
public:
    Category() = default;  // empty handle; only valid() categories may be used

    static Category atom(AtomicCategory a);
    static Category atom(std::string base, std::string feature = "");
    static Category complex(Category result, SlashOp op, Category argument);

    bool valid() const { return node_ != nullptr; }
    bool is_atom() const;
    const AtomicCategory& atom_value() const;  // requires is_atom()
    const Category& result() const;            // requires !is_atom()
    const Category& argument() const;
    SlashOp op() const;

    // Canonical printed form, cached at construction.
    const std::string& str() const;

    bool operator==(const Category& o) const;
    bool operator!=(const Category& o) const { return !(*this == o); }

private:
    struct Node;
    explicit Category(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct CategoryHash {
    std::size_t operator()(const Category& c) const {
        return std::hash<std::string>()(c.str());
    }
};

struct CategoryLess {
    bool operator()(const Category& a, const Category& b) const {
        return a.str() < b.str();
    }
};

// Category text error with the byte offset of the offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

using TokenSequence = std::vector<std::string>;

Category parse_category(std::string_view text);

// Canonical form: every nested complex subcategory is parenthesized, the top
// level is not, features print as [feat].
std::string print_category(const Category& c);

// Token list of the canonical form, split at parentheses and slashes; a
// feature stays attached to its atom token ("S[dcl]" is one token).
TokenSequence tokenize(const Category& c);

// Splits an already-joined token string back into tokens without validating
// the grammar. Throws ParseError on stray feature brackets.
TokenSequence tokenize_surface(std::string_view text);

// Number of tokens in tokenize(c).
std::size_t category_length(const Category& c);

// Identical tree with every feature removed (S[dcl] -> S).
Category strip_features(const Category& c);

// The six CCGBank punctuation category bases.
const std::vector<std::string>& default_punctuation();

bool is_punctuation_base(const std::string& base,
                         const std::vector<std::string>& punct = default_punctuation());

// True iff c is an atom whose base is in the punctuation set.
bool is_punctuation_category(const Category& c,
                             const std::vector<std::string>& punct = default_punctuation());

}  // namespace catgen

#endif
