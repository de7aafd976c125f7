#pragma once

// Independent reference implementations. Deliberately naive: they share no
// code with the library beyond the public data types.

#include "codegenlink/similarity.hpp"

#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace oracle {

using codegenlink::ClonePair;
using codegenlink::Token;
using codegenlink::TokenSequence;

inline bool same(const Token& x, const Token& y) { return x.kind == y.kind && x.text == y.text; }

/// Every pair of start positions (i, j), extended right as far as tokens
/// agree, kept when it cannot be extended left and reaches `min` tokens.
inline std::vector<ClonePair> clones(const TokenSequence& a, const TokenSequence& b, std::size_t min) {
    if (min == 0) min = 1;
    std::vector<ClonePair> out;
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
        for (std::size_t j = 0; j < b.tokens.size(); ++j) {
            if (i > 0 && j > 0 && same(a.tokens[i - 1], b.tokens[j - 1])) continue;
            std::size_t len = 0;
            while (i + len < a.tokens.size() && j + len < b.tokens.size() && same(a.tokens[i + len], b.tokens[j + len])) {
                ++len;
            }
            if (len >= min) out.push_back(ClonePair{i, len, j, len});
        }
    }
    return out;  // (i, j) loop order is already (a_start, b_start) order
}

/// Marks covered query positions one by one.
inline double coverage(const std::vector<ClonePair>& pairs, std::size_t query_len) {
    std::vector<bool> covered(query_len, false);
    for (const ClonePair& p : pairs) {
        for (std::size_t k = p.a_start; k < p.a_start + p.a_len && k < query_len; ++k) covered[k] = true;
    }
    std::size_t n = 0;
    for (bool c : covered) n += c ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(query_len);
}

/// Dot product over a hash map of double counts.
inline double cosine(const TokenSequence& a, const TokenSequence& b) {
    std::unordered_map<std::string, double> fa;
    std::unordered_map<std::string, double> fb;
    for (const Token& t : a.tokens) fa[t.text] += 1.0;
    for (const Token& t : b.tokens) fb[t.text] += 1.0;
    if (fa.empty() || fb.empty()) return 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [k, v] : fa) {
        na += v * v;
        if (auto it = fb.find(k); it != fb.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : fb) nb += v * v;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Token-set Jaccard over lowercase alphanumeric words.
inline double jaccard(const std::string& x, const std::string& y) {
    const auto words = [](const std::string& s) {
        std::set<std::string> out;
        std::string w;
        for (char c : s) {
            const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
            if (alnum) {
                w.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
            } else if (!w.empty()) {
                out.insert(w);
                w.clear();
            }
        }
        if (!w.empty()) out.insert(w);
        return out;
    };
    const auto a = words(x);
    const auto b = words(y);
    std::size_t common = 0;
    for (const auto& w : a) common += b.count(w);
    const std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline std::string base64(const std::string& in) {
    static const char* kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    std::size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        const unsigned v = (static_cast<unsigned char>(in[i]) << 16) | (static_cast<unsigned char>(in[i + 1]) << 8) |
                           static_cast<unsigned char>(in[i + 2]);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
        if (out.size() % 61 == 60) out += '\n';  // GitHub wraps its base64 at 60 columns
    }
    if (i < in.size()) {
        unsigned v = static_cast<unsigned char>(in[i]) << 16;
        if (i + 1 < in.size()) v |= static_cast<unsigned char>(in[i + 1]) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += i + 1 < in.size() ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

}  // namespace oracle
