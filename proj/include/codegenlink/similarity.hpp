#pragma once

#include "codegenlink/model.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace codegenlink {

enum class TokenKind { Identifier, Keyword, NumberLiteral, StringLiteral, Operator, Punctuation };
std::string_view to_string(TokenKind kind) noexcept;

struct Token {
    TokenKind kind = TokenKind::Identifier;
    std::string text;  // string literals exclude their quotes and prefixes

    bool operator==(const Token&) const = default;
};

struct TokenSequence {
    std::vector<Token> tokens;
    Language language = Language::Unknown;
    bool unterminated_string = false;  // a string literal ran to end of input

    [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
    [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }

    bool operator==(const TokenSequence&) const = default;
};

/// Lexes Python or Java with language rules; anything else with a generic
/// lexer (identifier runs, quoted spans, single-character symbols).
/// Comments and whitespace never produce tokens.
TokenSequence tokenize(std::string_view content, Language language);

/// Placeholder texts used by parameter normalization.
inline constexpr std::string_view kIdentifierPlaceholder = "$P";
inline constexpr std::string_view kNumberPlaceholder = "$N";
inline constexpr std::string_view kStringPlaceholder = "$S";

/// With `p_token`, identifiers become $P, numbers $N and strings $S.
/// Without it the sequence is returned unchanged.
TokenSequence normalize(const TokenSequence& seq, bool p_token);

/// Cosine of token-text frequency vectors, in [0,1]; 0 when either side is empty.
double cosine_similarity(const TokenSequence& a, const TokenSequence& b);

/// A maximal run of identical tokens at a[a_start, a_start+length) and
/// b[b_start, b_start+length).
struct ClonePair {
    std::size_t a_start = 0;
    std::size_t a_len = 0;
    std::size_t b_start = 0;
    std::size_t b_len = 0;

    bool operator==(const ClonePair&) const = default;
    auto operator<=>(const ClonePair&) const = default;
};

/// All maximal common token substrings of length >= min_clone_tokens, sorted
/// by (a_start, b_start). Tokens compare by kind and text.
std::vector<ClonePair> detect_clones(const TokenSequence& a, const TokenSequence& b, std::size_t min_clone_tokens);

/// |union of [a_start, a_start + a_len)| / query_len. Throws ZeroLengthQuery.
double cloning_ratio(std::span<const ClonePair> pairs, std::size_t query_len);

/// Same ratio measured on side b of the pairs.
double reverse_cloning_ratio(std::span<const ClonePair> pairs, std::size_t other_len);

struct ComparisonDetail {
    SimilarityResult result;
    double reverse_cloning_ratio = 0.0;
    std::vector<ClonePair> clones;
};

/// Cosine on raw tokens; cloning ratio on p-token normalized tokens measured
/// as coverage of the query. Throws EmptyInput for blank snippets.
SimilarityResult compare(const CodeSnippet& query, const CodeSnippet& web, const AnalysisConfig& config);
ComparisonDetail compare_detailed(const CodeSnippet& query, const CodeSnippet& web, const AnalysisConfig& config);

}  // namespace codegenlink
