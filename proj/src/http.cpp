#include "codegenlink/http.hpp"

#include "codegenlink/errors.hpp"
#include "text_util.hpp"

#include <curl/curl.h>
#include <json.hpp>

#include <algorithm>
#include <thread>

namespace codegenlink {

std::optional<std::string> HttpResponse::header(std::string_view name) const {
    const auto it = headers.find(text::to_lower(name));
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// libcurl

namespace {

std::once_flag g_curl_init;

struct CurlEasyDeleter {
    void operator()(CURL* handle) const noexcept { curl_easy_cleanup(handle); }
};
struct CurlListDeleter {
    void operator()(curl_slist* list) const noexcept { curl_slist_free_all(list); }
};

std::size_t write_body(char* data, std::size_t size, std::size_t count, void* user) {
    static_cast<std::string*>(user)->append(data, size * count);
    return size * count;
}

std::size_t write_header(char* data, std::size_t size, std::size_t count, void* user) {
    auto* headers = static_cast<std::map<std::string, std::string>*>(user);
    const std::string_view line(data, size * count);
    // A new status line starts a new header block (e.g. after 100 Continue).
    if (line.rfind("HTTP/", 0) == 0) {
        headers->clear();
    } else if (const auto colon = line.find(':'); colon != std::string_view::npos) {
        (*headers)[text::to_lower(text::trim(line.substr(0, colon)))] = std::string(text::trim(line.substr(colon + 1)));
    }
    return size * count;
}

}  // namespace

CurlHttpClient::CurlHttpClient() {
    std::call_once(g_curl_init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

HttpResponse CurlHttpClient::send(const HttpRequest& request) {
    std::unique_ptr<CURL, CurlEasyDeleter> handle(curl_easy_init());
    if (!handle) throw Error(ErrorCode::NetworkError, "curl_easy_init failed");
    CURL* curl = handle.get();

    HttpResponse response;
    std::unique_ptr<curl_slist, CurlListDeleter> header_list;
    curl_slist* raw_list = nullptr;
    bool has_user_agent = false;
    for (const auto& [name, value] : request.headers) {
        if (text::iequals(name, "user-agent")) has_user_agent = true;
        raw_list = curl_slist_append(raw_list, (name + ": " + value).c_str());
    }
    header_list.reset(raw_list);

    curl_easy_setopt(curl, CURLOPT_URL, request.url.c_str());
    curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 0L);
    curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(curl, CURLOPT_TIMEOUT, static_cast<long>(request.timeout.count()));
    curl_easy_setopt(curl, CURLOPT_ACCEPT_ENCODING, "");
    if (!has_user_agent) curl_easy_setopt(curl, CURLOPT_USERAGENT, std::string(kUserAgent).c_str());
    if (raw_list) curl_easy_setopt(curl, CURLOPT_HTTPHEADER, raw_list);
    if (request.method == "POST") {
        curl_easy_setopt(curl, CURLOPT_POST, 1L);
        curl_easy_setopt(curl, CURLOPT_POSTFIELDS, request.body.c_str());
        curl_easy_setopt(curl, CURLOPT_POSTFIELDSIZE, static_cast<long>(request.body.size()));
    } else if (request.method != "GET") {
        curl_easy_setopt(curl, CURLOPT_CUSTOMREQUEST, request.method.c_str());
    }
    curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_body);
    curl_easy_setopt(curl, CURLOPT_WRITEDATA, &response.body);
    curl_easy_setopt(curl, CURLOPT_HEADERFUNCTION, write_header);
    curl_easy_setopt(curl, CURLOPT_HEADERDATA, &response.headers);

    const CURLcode rc = curl_easy_perform(curl);
    if (rc == CURLE_OPERATION_TIMEDOUT) {
        throw Error(ErrorCode::FetchTimeout, request.url);
    }
    if (rc != CURLE_OK) {
        throw Error(ErrorCode::NetworkError, request.url + ": " + curl_easy_strerror(rc));
    }
    long status = 0;
    curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
    response.status = static_cast<int>(status);
    return response;
}

// ---------------------------------------------------------------------------
// Fixtures

FixtureHttpClient::FixtureHttpClient(const std::filesystem::path& directory) {
    const auto index_path = directory / "index.json";
    if (!std::filesystem::exists(index_path)) return;
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(text::read_file(index_path.string()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, index_path.string() + ": " + e.what());
    }
    for (const auto& [url, spec] : index.items()) {
        if (spec.contains("error")) {
            add_error(url, spec.at("error").get<std::string>() == "timeout");
            continue;
        }
        HttpResponse response;
        response.status = spec.value("status", 200);
        if (spec.contains("body_file")) {
            response.body = text::read_file((directory / spec.at("body_file").get<std::string>()).string());
        } else {
            response.body = spec.value("body", std::string{});
        }
        if (spec.contains("headers")) {
            for (const auto& [name, value] : spec.at("headers").items()) {
                response.headers[text::to_lower(name)] = value.get<std::string>();
            }
        }
        add(url, std::move(response));
    }
}

void FixtureHttpClient::add(std::string url, HttpResponse response) {
    std::lock_guard lock(mutex_);
    entries_[std::move(url)] = Entry{std::move(response), std::nullopt};
}

void FixtureHttpClient::add_error(std::string url, bool timeout) {
    std::lock_guard lock(mutex_);
    entries_[std::move(url)] = Entry{HttpResponse{}, timeout};
}

HttpResponse FixtureHttpClient::send(const HttpRequest& request) {
    std::lock_guard lock(mutex_);
    log_.push_back(request.url);
    const auto it = entries_.find(request.url);
    if (it == entries_.end()) return HttpResponse{404, {}, {}};
    if (it->second.error_is_timeout) {
        if (*it->second.error_is_timeout) throw Error(ErrorCode::FetchTimeout, request.url);
        throw Error(ErrorCode::NetworkError, request.url + ": fixture network failure");
    }
    return it->second.response;
}

std::vector<std::string> FixtureHttpClient::requested_urls() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::size_t FixtureHttpClient::request_count(std::string_view url) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count(log_.begin(), log_.end(), url));
}

// ---------------------------------------------------------------------------
// Clocks and rate limiting

void SystemClock::sleep_until(time_point deadline) { std::this_thread::sleep_until(deadline); }

Clock::time_point VirtualClock::now() const {
    std::lock_guard lock(mutex_);
    return now_;
}

void VirtualClock::sleep_until(time_point deadline) {
    std::lock_guard lock(mutex_);
    if (deadline > now_) now_ = deadline;
}

void VirtualClock::advance(duration d) {
    std::lock_guard lock(mutex_);
    now_ += d;
}

RateLimiter::RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock) : clock_(std::move(clock)) {
    if (requests_per_second > 0.0) {
        interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / requests_per_second));
    }
}

Clock::time_point RateLimiter::acquire(std::string_view host) {
    Clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = clock_->now();
        auto [it, inserted] = next_slot_.try_emplace(std::string(host), now);
        slot = std::max(now, it->second);
        it->second = slot + interval_;
    }
    clock_->sleep_until(slot);
    return slot;
}

}  // namespace codegenlink
