#pragma once

// Synthetic replay corpora: a planted-origin web and labeled eval corpora.

#include "fixture_web.hpp"

#include <string>
#include <vector>

namespace corpora {

/// Hand-written Python functions with no shared origin.
const std::vector<std::string>& unrelated_python();

/// The query snippet used by the planted-origin web.
const std::string& planted_query();

/// `planted_query` with every identifier consistently renamed.
std::string planted_query_renamed(int variant);

struct PlantedWeb {
    fixtures::fs::path fixtures;   // replay root
    fixtures::fs::path query_file;
    std::vector<std::string> planted_urls;
    std::vector<std::string> unrelated_urls;
};

/// 20 pages: 10 with the query verbatim or renamed (Stack Overflow, GitHub
/// blobs, blogs), 10 with unrelated Python.
PlantedWeb build_planted_web(const fixtures::fs::path& root);

struct DemoWeb {
    fixtures::fs::path fixtures;
    fixtures::fs::path query_file;
    std::string mit_blob;          // API reports MIT
    std::string noassertion_blob;  // API says NOASSERTION, LICENSE holds Apache-2.0
    std::string stack_overflow;
    std::string blog;              // no license text anywhere
};

/// One query with origins covering every license strategy.
DemoWeb build_demo_web(const fixtures::fs::path& root);

struct Corpus {
    fixtures::fs::path dir;  // tasks/, fixtures/, labels.tsv
    std::size_t tasks = 0;
};

/// 20 generated tasks, each with verbatim, renamed, truncated and unrelated
/// candidates plus a page without code and a failing link.
Corpus build_sweep_corpus(const fixtures::fs::path& root);

/// 4 tasks, one near-copy per task (first two thirds of the lines) labeled
/// relevant for tasks a and b and irrelevant for c and d, plus an unrelated
/// page per task labeled irrelevant.
Corpus build_small_corpus(const fixtures::fs::path& root);

}  // namespace corpora
