#include "codegenlink/licensing.hpp"

#include "codegenlink/errors.hpp"
#include "codegenlink/html.hpp"
#include "embedded_data.hpp"
#include "text_util.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>

namespace codegenlink {

std::string normalize_license_text(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    bool pending_space = false;
    for (unsigned char c : in) {
        const char l = text::lower(static_cast<char>(c));
        const bool keep = text::is_alnum(c) || l == '.' || l == '+' || l == '-';
        if (!keep) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(l);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Catalog

SpdxCatalog SpdxCatalog::parse(std::string_view tsv) {
    SpdxCatalog catalog;
    for (std::string_view line : text::split_lines(tsv)) {
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw Error(ErrorCode::ParseError, "catalog line without tab: " + std::string(line));
        SpdxEntry entry;
        entry.id = std::string(text::trim(line.substr(0, tab)));
        for (std::string_view phrase : text::split(line.substr(tab + 1), '|')) {
            std::string normalized = normalize_license_text(phrase);
            if (!normalized.empty()) entry.names.push_back(std::move(normalized));
        }
        if (entry.id.empty() || entry.names.empty()) {
            throw Error(ErrorCode::ParseError, "catalog entry needs an id and a phrase: " + std::string(line));
        }
        if (catalog.by_id_.contains(entry.id)) throw Error(ErrorCode::ParseError, "duplicate catalog id " + entry.id);
        catalog.by_id_.emplace(entry.id, catalog.entries_.size());
        catalog.entries_.push_back(std::move(entry));
    }
    return catalog;
}

const SpdxCatalog& SpdxCatalog::bundled() {
    static const SpdxCatalog catalog = parse(embedded::find("spdx_catalog.tsv").value());
    return catalog;
}

bool SpdxCatalog::contains(std::string_view id) const { return by_id_.contains(std::string(id)); }

namespace {

bool boundary_before(std::string_view s, std::size_t pos) { return pos == 0 || s[pos - 1] == ' '; }

// The phrase must not continue into a longer token: "gpl-3.0" does not match
// inside "gpl-3.0-or-later", "version 2" does not match inside "version 2.1".
bool boundary_after(std::string_view s, std::size_t end) {
    if (end >= s.size() || s[end] == ' ') return true;
    const char c = s[end];
    if (c == '.' || c == '-') return end + 1 >= s.size() || s[end + 1] == ' ';
    return false;
}

}  // namespace

std::vector<SpdxCatalog::PhraseMatch> SpdxCatalog::find_phrases(std::string_view normalized) const {
    std::vector<PhraseMatch> matches;
    for (const SpdxEntry& entry : entries_) {
        for (const std::string& phrase : entry.names) {
            for (auto pos = normalized.find(phrase); pos != std::string_view::npos;
                 pos = normalized.find(phrase, pos + 1)) {
                if (boundary_before(normalized, pos) && boundary_after(normalized, pos + phrase.size())) {
                    matches.push_back(PhraseMatch{entry.id, phrase, pos});
                    break;
                }
            }
        }
    }
    return matches;
}

std::string canonical_spdx_id(std::string_view id) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 16> kAliases{{
        {"GPL-1.0", "GPL-1.0-only"},       {"GPL-1.0+", "GPL-1.0-or-later"},
        {"GPL-2.0", "GPL-2.0-only"},       {"GPL-2.0+", "GPL-2.0-or-later"},
        {"GPL-3.0", "GPL-3.0-only"},       {"GPL-3.0+", "GPL-3.0-or-later"},
        {"LGPL-2.0", "LGPL-2.0-only"},     {"LGPL-2.0+", "LGPL-2.0-or-later"},
        {"LGPL-2.1", "LGPL-2.1-only"},     {"LGPL-2.1+", "LGPL-2.1-or-later"},
        {"LGPL-3.0", "LGPL-3.0-only"},     {"LGPL-3.0+", "LGPL-3.0-or-later"},
        {"AGPL-1.0", "AGPL-1.0-only"},     {"AGPL-3.0", "AGPL-3.0-only"},
        {"GFDL-1.3", "GFDL-1.3-only"},     {"GFDL-1.2", "GFDL-1.2-only"},
    }};
    for (const auto& [from, to] : kAliases) {
        if (from == id) return std::string(to);
    }
    return std::string(id);
}

// ---------------------------------------------------------------------------
// Classifier

std::span<const CanonicalLicense> canonical_licenses() {
    static const std::array<CanonicalLicense, 10> kBodies = [] {
        constexpr std::array<std::string_view, 10> ids{"MIT",     "Apache-2.0",    "GPL-3.0-only", "GPL-2.0-only",
                                                       "BSD-3-Clause", "BSD-2-Clause", "MPL-2.0", "LGPL-3.0-only",
                                                       "CC-BY-SA-4.0", "Unlicense"};
        std::array<CanonicalLicense, 10> bodies{};
        for (std::size_t i = 0; i < ids.size(); ++i) {
            bodies[i] = CanonicalLicense{ids[i], embedded::find("licenses/" + std::string(ids[i]) + ".txt").value()};
        }
        return bodies;
    }();
    return kBodies;
}

std::set<std::string> license_token_set(std::string_view in) {
    std::set<std::string> out;
    std::string word;
    for (unsigned char c : in) {
        if (text::is_alnum(c)) {
            word.push_back(text::lower(static_cast<char>(c)));
        } else if (!word.empty()) {
            out.insert(std::move(word));
            word.clear();
        }
    }
    if (!word.empty()) out.insert(std::move(word));
    return out;
}

double token_set_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

namespace {

const std::vector<std::set<std::string>>& canonical_token_sets() {
    static const std::vector<std::set<std::string>> sets = [] {
        std::vector<std::set<std::string>> out;
        for (const CanonicalLicense& body : canonical_licenses()) out.push_back(license_token_set(body.text));
        return out;
    }();
    return sets;
}

}  // namespace

FingerprintMatch best_fingerprint_match(std::string_view text) {
    const auto tokens = license_token_set(text);
    const auto& sets = canonical_token_sets();
    const auto bodies = canonical_licenses();
    FingerprintMatch best{std::string(bodies[0].spdx_id), -1.0};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const double score = token_set_jaccard(tokens, sets[i]);
        if (score > best.jaccard) best = FingerprintMatch{std::string(bodies[i].spdx_id), score};
    }
    return best;
}

std::optional<LicenseFinding> classify_license_text(std::string_view raw) {
    const std::string normalized = normalize_license_text(raw);
    if (normalized.empty()) return std::nullopt;

    // License files open with their title; references to other licenses
    // (e.g. "use the GNU Lesser General Public License instead") come later.
    auto matches = SpdxCatalog::bundled().find_phrases(normalized);
    if (!matches.empty()) {
        const auto best = std::min_element(matches.begin(), matches.end(), [](const auto& x, const auto& y) {
            if (x.position != y.position) return x.position < y.position;
            return x.phrase.size() > y.phrase.size();
        });
        return LicenseFinding{canonical_spdx_id(best->spdx_id), LicenseMethod::LicenseFileClassifier};
    }

    if (const FingerprintMatch match = best_fingerprint_match(raw); match.jaccard >= kFingerprintThreshold) {
        return LicenseFinding{match.spdx_id, LicenseMethod::LicenseFileClassifier};
    }

    if (raw.size() > kNonSpdxMinChars &&
        (normalized.find("license") != std::string::npos || normalized.find("licence") != std::string::npos ||
         normalized.find("copyright") != std::string::npos)) {
        return LicenseFinding{std::string(kNonSpdxText), LicenseMethod::LicenseFileClassifier};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Domain policies and page scanning

const DomainPolicyTable& DomainPolicyTable::defaults() {
    static const DomainPolicyTable table = [] {
        DomainPolicyTable t;
        // Stack Exchange network: user contributions are CC BY-SA 4.0.
        for (const char* host : {"stackoverflow.com", "stackexchange.com", "superuser.com", "serverfault.com",
                                 "askubuntu.com", "mathoverflow.net", "stackapps.com"}) {
            t.add(host, "CC-BY-SA-4.0");
        }
        return t;
    }();
    return table;
}

void DomainPolicyTable::add(std::string host_suffix, std::string spdx_id) {
    entries_.emplace_back(text::to_lower(host_suffix), std::move(spdx_id));
}

std::optional<std::string> DomainPolicyTable::lookup(std::string_view host) const {
    for (const auto& [suffix, id] : entries_) {
        if (host_matches(host, suffix)) return id;
    }
    return std::nullopt;
}

std::optional<LicenseFinding> domain_policy_license(std::string_view host, const DomainPolicyTable& table) {
    if (auto id = table.lookup(host)) return LicenseFinding{std::move(*id), LicenseMethod::DomainPolicy};
    return std::nullopt;
}

std::optional<LicenseFinding> scan_html_for_spdx(std::string_view page_text) {
    const std::string normalized = normalize_license_text(page_text);
    auto matches = SpdxCatalog::bundled().find_phrases(normalized);
    if (matches.empty()) return std::nullopt;
    const auto best = std::min_element(matches.begin(), matches.end(), [](const auto& x, const auto& y) {
        if (x.phrase.size() != y.phrase.size()) return x.phrase.size() > y.phrase.size();
        return x.position < y.position;
    });
    return LicenseFinding{canonical_spdx_id(best->spdx_id), LicenseMethod::HtmlKeywordScan};
}

std::string visible_page_text(std::string_view markup) {
    try {
        return html::Document::parse(markup).page_text();
    } catch (const Error&) {
        return {};
    }
}

// ---------------------------------------------------------------------------
// GitHub

std::optional<GitHubRepo> github_repo_from_url(std::string_view url) {
    ParsedUrl parsed;
    try {
        parsed = parse_url(url);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (parsed.host != "github.com" && parsed.host != "www.github.com" && parsed.host != "raw.githubusercontent.com") {
        return std::nullopt;
    }
    const auto parts = text::split(std::string_view(parsed.path).substr(1), '/');
    if (parts.size() < 2 || parts[0].empty() || parts[1].empty()) return std::nullopt;
    std::string repo(parts[1]);
    if (repo.size() > 4 && repo.ends_with(".git")) repo.resize(repo.size() - 4);
    return GitHubRepo{std::string(parts[0]), std::move(repo)};
}

GitHubClient::GitHubClient(HttpClient& http, RateLimiter& limiter, Options options)
    : http_(http), limiter_(limiter), options_(std::move(options)) {}

HttpResponse GitHubClient::get(const std::string& path) {
    HttpRequest request;
    request.url = options_.api_base + path;
    request.timeout = options_.timeout;
    request.headers = {
        {"Accept", "application/vnd.github+json"},
        {"X-GitHub-Api-Version", "2022-11-28"},
        {"User-Agent", std::string(kUserAgent)},
    };
    if (!options_.token.empty()) request.headers.emplace_back("Authorization", "Bearer " + options_.token);

    try {
        limiter_.acquire(parse_url(request.url).host);
        HttpResponse response = http_.send(request);
        if (response.status == 404) throw Error(ErrorCode::RepoNotFound, request.url);
        if (response.status != 200) {
            throw Error(ErrorCode::ApiUnavailable, request.url + ": HTTP " + std::to_string(response.status),
                        response.status);
        }
        return response;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::RepoNotFound || e.code() == ErrorCode::ApiUnavailable) throw;
        throw Error(ErrorCode::ApiUnavailable, e.what());
    }
}

std::optional<LicenseFinding> GitHubClient::license_via_api(const std::string& owner, const std::string& repo) {
    const HttpResponse response = get("/repos/" + owner + "/" + repo);
    try {
        const auto doc = nlohmann::json::parse(response.body);
        const auto license = doc.find("license");
        if (license == doc.end() || !license->is_object()) return std::nullopt;
        const auto spdx = license->find("spdx_id");
        if (spdx == license->end() || !spdx->is_string()) return std::nullopt;
        const std::string id = canonical_spdx_id(spdx->get<std::string>());
        if (id.empty() || id == "NOASSERTION") return std::nullopt;
        const std::string recorded = SpdxCatalog::bundled().contains(id) ? id : std::string(kNonSpdxText);
        return LicenseFinding{recorded, LicenseMethod::GitHubApi};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ApiUnavailable, std::string("malformed repository metadata: ") + e.what());
    }
}

namespace {

std::string decode_base64(std::string_view encoded) {
    std::string compact;
    compact.reserve(encoded.size());
    for (char c : encoded) {
        if (!text::is_space(static_cast<unsigned char>(c))) compact.push_back(c);
    }
    if (compact.size() % 4 != 0) throw Error(ErrorCode::ApiUnavailable, "base64 content has invalid length");
    std::string out(compact.size() / 4 * 3, '\0');
    const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                        reinterpret_cast<const unsigned char*>(compact.data()),
                                        static_cast<int>(compact.size()));
    if (written < 0) throw Error(ErrorCode::ApiUnavailable, "invalid base64 content");
    // EVP_DecodeBlock counts padding bytes as output.
    std::size_t size = static_cast<std::size_t>(written);
    if (!compact.empty() && compact.back() == '=') --size;
    if (compact.size() >= 2 && compact[compact.size() - 2] == '=') --size;
    out.resize(size);
    return out;
}

}  // namespace

std::optional<std::string> GitHubClient::find_license_file(const std::string& owner, const std::string& repo) {
    const HttpResponse listing = get("/repos/" + owner + "/" + repo + "/contents/");
    std::string path;
    try {
        const auto doc = nlohmann::json::parse(listing.body);
        if (!doc.is_array()) return std::nullopt;
        for (std::string_view wanted : kLicenseFileNames) {
            for (const auto& item : doc) {
                if (item.value("type", std::string("file")) != "file") continue;
                const std::string name = item.value("name", std::string{});
                if (text::iequals(name, wanted)) {
                    path = item.value("path", name);
                    break;
                }
            }
            if (!path.empty()) break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ApiUnavailable, std::string("malformed contents listing: ") + e.what());
    }
    if (path.empty()) return std::nullopt;

    const HttpResponse file = get("/repos/" + owner + "/" + repo + "/contents/" + path);
    try {
        const auto doc = nlohmann::json::parse(file.body);
        const std::string content = doc.value("content", std::string{});
        if (doc.value("encoding", std::string("base64")) != "base64") return content;
        return decode_base64(content);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ApiUnavailable, std::string("malformed file content: ") + e.what());
    }
}

LicenseIdentifier::LicenseIdentifier(GitHubClient* github, const DomainPolicyTable& policies)
    : github_(github), policies_(policies) {}

std::optional<LicenseFinding> LicenseIdentifier::identify(const CandidateLink& link, const PageCapture* capture) {
    ParsedUrl parsed;
    try {
        parsed = parse_url(link.url);
    } catch (const Error&) {
        return std::nullopt;
    }

    if (link.domain_kind == DomainKind::GitHub) {
        const auto repo = github_repo_from_url(link.url);
        if (!repo || github_ == nullptr) return std::nullopt;
        try {
            if (auto finding = github_->license_via_api(repo->owner, repo->repo)) return finding;
        } catch (const Error&) {
            // Fall through to the license file.
        }
        try {
            if (const auto file = github_->find_license_file(repo->owner, repo->repo)) {
                return classify_license_text(*file);
            }
        } catch (const Error&) {
        }
        return std::nullopt;
    }

    if (auto finding = domain_policy_license(parsed.host, policies_)) return finding;
    if (capture != nullptr && capture->status == 200) {
        const std::string page = capture->content_kind == ContentKind::Html ? visible_page_text(capture->body)
                                                                            : capture->body;
        return scan_html_for_spdx(page);
    }
    return std::nullopt;
}

}  // namespace codegenlink
