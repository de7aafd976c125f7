#pragma once

// Builds replay fixture directories (prompts/ and http/index.json) on disk.

#include "codegenlink/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

class FixtureWeb {
public:
    explicit FixtureWeb(fs::path root);

    void prompt(const std::string& prompt_text, const std::string& response);
    /// Registers a response listing `urls` for the selection prompt of `code`.
    void links_for(const codegenlink::CodeSnippet& code, const std::vector<std::string>& urls);

    void page(const std::string& url, const std::string& body, int status = 200);
    void redirect(const std::string& url, const std::string& location, int status = 301);
    void error(const std::string& url, bool timeout);

    /// GET /repos/{owner}/{repo}; `spdx_id` empty means "license": null.
    void repo_license(const std::string& owner, const std::string& repo, const std::string& spdx_id);
    /// Root listing plus one contents entry per file.
    void repo_files(const std::string& owner, const std::string& repo,
                    const std::vector<std::pair<std::string, std::string>>& files);

    /// Writes http/index.json.
    void save() const;

    [[nodiscard]] const fs::path& root() const noexcept { return root_; }

private:
    fs::path root_;
    nlohmann::ordered_json index_ = nlohmann::ordered_json::object();
};

/// A page in Stack Overflow markup: each block becomes <pre><code>.
std::string stack_overflow_page(const std::vector<std::string>& blocks, const std::string& prose = "");
/// A plain article with one <pre> block and arbitrary prose.
std::string blog_page(const std::string& code, const std::string& prose);
std::string html_escape(const std::string& text);

void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

}  // namespace fixtures
