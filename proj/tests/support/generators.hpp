#pragma once

// Seeded generators for property tests.

#include "codegenlink/similarity.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    bool chance(double p) { return unit() < p; }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Random sequence over `alphabet` symbols. Kind alternates with the symbol
/// so equal text always implies equal kind.
codegenlink::TokenSequence token_sequence(Rng& rng, std::size_t length, std::size_t alphabet);

/// A pair where `b` reuses chunks of `a` some of the time, so long clones
/// actually occur.
std::pair<codegenlink::TokenSequence, codegenlink::TokenSequence> related_pair(Rng& rng, std::size_t max_len,
                                                                               std::size_t alphabet);

/// A program as lines of pieces; identifiers refer to a slot so the same
/// program can be rendered under different namings.
struct Piece {
    enum class Kind { Name, Fixed };
    Kind kind = Kind::Fixed;
    std::size_t slot = 0;  // for Name
    std::string text;      // for Fixed
};

struct Line {
    std::size_t indent = 0;
    std::vector<Piece> pieces;
};

struct Program {
    codegenlink::Language language = codegenlink::Language::Python;
    std::vector<Line> lines;
    std::size_t slots = 0;
};

Program python_program(Rng& rng, std::size_t statements);
Program java_program(Rng& rng, std::size_t statements);

/// Names for every slot: v0, v1, ... by default.
std::vector<std::string> default_names(const Program& p);
/// A bijective renaming to fresh random identifiers (never keywords).
std::vector<std::string> random_names(Rng& rng, const Program& p);

struct Noise {
    bool enabled = false;
    Rng* rng = nullptr;
};

/// Source text. With noise, inserts extra spaces between tokens, trailing
/// and full-line comments, and blank lines.
std::string render(const Program& p, const std::vector<std::string>& names, Noise noise = {});

}  // namespace gen
