#include "codegenlink/similarity.hpp"

#include "codegenlink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

namespace codegenlink {

double cosine_similarity(const TokenSequence& a, const TokenSequence& b) {
    if (a.empty() || b.empty()) return 0.0;
    // Ordered maps and integer accumulation keep the result bit-identical
    // across runs and symmetric in its arguments.
    std::map<std::string_view, std::uint64_t> fa;
    std::map<std::string_view, std::uint64_t> fb;
    for (const Token& t : a.tokens) ++fa[t.text];
    for (const Token& t : b.tokens) ++fb[t.text];

    std::uint64_t dot = 0;
    std::uint64_t norm_a = 0;
    std::uint64_t norm_b = 0;
    for (const auto& [text, count] : fa) {
        norm_a += count * count;
        if (const auto it = fb.find(text); it != fb.end()) dot += count * it->second;
    }
    for (const auto& [text, count] : fb) norm_b += count * count;

    const double cos = static_cast<double>(dot) / std::sqrt(static_cast<double>(norm_a) * static_cast<double>(norm_b));
    return std::clamp(cos, 0.0, 1.0);
}

namespace {

struct TokenKey {
    TokenKind kind;
    std::string_view text;
    bool operator<(const TokenKey& o) const { return kind != o.kind ? kind < o.kind : text < o.text; }
};

// Maps both sequences onto a shared integer alphabet.
void intern(const TokenSequence& a, const TokenSequence& b, std::vector<std::uint32_t>& ia, std::vector<std::uint32_t>& ib) {
    std::map<TokenKey, std::uint32_t> ids;
    const auto id_of = [&](const Token& t) {
        const auto [it, inserted] = ids.try_emplace(TokenKey{t.kind, t.text}, static_cast<std::uint32_t>(ids.size()));
        return it->second;
    };
    ia.reserve(a.size());
    ib.reserve(b.size());
    for (const Token& t : a.tokens) ia.push_back(id_of(t));
    for (const Token& t : b.tokens) ib.push_back(id_of(t));
}

constexpr std::uint64_t kHashBase = 0x100000001B3ULL;

// Polynomial hashes (mod 2^64) of every window of length m.
std::vector<std::uint64_t> window_hashes(const std::vector<std::uint32_t>& s, std::size_t m) {
    std::vector<std::uint64_t> out;
    if (s.size() < m) return out;
    std::uint64_t top = 1;
    for (std::size_t i = 1; i < m; ++i) top *= kHashBase;
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < m; ++i) h = h * kHashBase + (s[i] + 1);
    out.push_back(h);
    for (std::size_t i = m; i < s.size(); ++i) {
        h = (h - (s[i - m] + 1) * top) * kHashBase + (s[i] + 1);
        out.push_back(h);
    }
    return out;
}

}  // namespace

std::vector<ClonePair> detect_clones(const TokenSequence& a, const TokenSequence& b, std::size_t min_clone_tokens) {
    const std::size_t m = std::max<std::size_t>(min_clone_tokens, 1);
    std::vector<ClonePair> pairs;
    if (a.size() < m || b.size() < m) return pairs;

    std::vector<std::uint32_t> sa;
    std::vector<std::uint32_t> sb;
    intern(a, b, sa, sb);

    // Seed: windows of length m with equal hashes. Extend: only seeds that
    // cannot be extended to the left start a maximal match, which is then
    // extended to the right as far as it goes.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;
    const auto hb = window_hashes(sb, m);
    for (std::size_t j = 0; j < hb.size(); ++j) index[hb[j]].push_back(j);

    const auto ha = window_hashes(sa, m);
    for (std::size_t i = 0; i < ha.size(); ++i) {
        const auto it = index.find(ha[i]);
        if (it == index.end()) continue;
        for (std::size_t j : it->second) {
            if (i > 0 && j > 0 && sa[i - 1] == sb[j - 1]) continue;
            if (!std::equal(sa.begin() + static_cast<std::ptrdiff_t>(i), sa.begin() + static_cast<std::ptrdiff_t>(i + m),
                            sb.begin() + static_cast<std::ptrdiff_t>(j))) {
                continue;
            }
            std::size_t len = m;
            while (i + len < sa.size() && j + len < sb.size() && sa[i + len] == sb[j + len]) ++len;
            pairs.push_back(ClonePair{i, len, j, len});
        }
    }
    return pairs;
}

namespace {

double covered_fraction(std::vector<std::pair<std::size_t, std::size_t>> intervals, std::size_t total) {
    std::sort(intervals.begin(), intervals.end());
    std::size_t covered = 0;
    std::size_t reach = 0;
    for (const auto& [begin, end] : intervals) {
        const std::size_t from = std::max(begin, reach);
        const std::size_t to = std::min(end, total);
        if (to > from) {
            covered += to - from;
            reach = to;
        }
    }
    return std::clamp(static_cast<double>(covered) / static_cast<double>(total), 0.0, 1.0);
}

}  // namespace

double cloning_ratio(std::span<const ClonePair> pairs, std::size_t query_len) {
    if (query_len == 0) throw Error(ErrorCode::ZeroLengthQuery, "cloning ratio of an empty query");
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    intervals.reserve(pairs.size());
    for (const ClonePair& p : pairs) intervals.emplace_back(p.a_start, p.a_start + p.a_len);
    return covered_fraction(std::move(intervals), query_len);
}

double reverse_cloning_ratio(std::span<const ClonePair> pairs, std::size_t other_len) {
    if (other_len == 0) return 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    intervals.reserve(pairs.size());
    for (const ClonePair& p : pairs) intervals.emplace_back(p.b_start, p.b_start + p.b_len);
    return covered_fraction(std::move(intervals), other_len);
}

ComparisonDetail compare_detailed(const CodeSnippet& query, const CodeSnippet& web, const AnalysisConfig& config) {
    if (!query.admissible()) throw Error(ErrorCode::EmptyInput, "query snippet is blank");
    if (!web.admissible()) throw Error(ErrorCode::EmptyInput, "web snippet is blank");

    const TokenSequence q = tokenize(query.content, query.language);
    const TokenSequence w = tokenize(web.content, web.language);
    if (q.empty()) throw Error(ErrorCode::EmptyInput, "query snippet has no tokens");

    ComparisonDetail detail;
    detail.result.cosine = cosine_similarity(q, w);
    detail.clones = detect_clones(normalize(q, true), normalize(w, true), static_cast<std::size_t>(config.min_clone_tokens));
    detail.result.cloning_ratio = cloning_ratio(detail.clones, q.size());
    detail.reverse_cloning_ratio = reverse_cloning_ratio(detail.clones, w.size());
    return detail;
}

SimilarityResult compare(const CodeSnippet& query, const CodeSnippet& web, const AnalysisConfig& config) {
    return compare_detailed(query, web, config).result;
}

}  // namespace codegenlink
