#include "synthlab/ingest.hpp"

#include <thread>
#include <unordered_set>

#include "httplib.h"

namespace synthlab {

namespace {

struct Endpoint {
    std::string scheme_host_port;
    std::string path_prefix;
};

Endpoint split_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "api_base_url lacks a scheme: " + url);
    auto path_begin = url.find('/', scheme_end + 3);
    Endpoint e;
    e.scheme_host_port = url.substr(0, path_begin);
    e.path_prefix = path_begin == std::string::npos ? "" : url.substr(path_begin);
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    return e;
}

}  // namespace

std::vector<Annotation> fetch_annotations(const IngestConfig& config, std::string_view source_uri) {
    config.validate();
    auto endpoint = split_base_url(config.api_base_url);

    httplib::Client client(endpoint.scheme_host_port);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());

    httplib::Headers headers{{"Accept", "application/json"}};
    if (!config.api_token.empty()) headers.emplace("Authorization", "Bearer " + config.api_token);

    const std::string path = endpoint.path_prefix + "/search";
    std::vector<Annotation> out;
    std::unordered_set<std::string> seen;
    std::string cursor;

    for (;;) {
        httplib::Params params{{"uri", std::string(source_uri)},
                               {"limit", std::to_string(config.page_size)},
                               {"sort", "created"},
                               {"order", "asc"}};
        if (!config.api_group_id.empty()) params.emplace("group", config.api_group_id);
        if (!cursor.empty()) params.emplace("search_after", cursor);

        httplib::Result response;
        for (int attempt = 0;; ++attempt) {
            response = client.Get(path, params, headers);
            bool retryable = !response || response->status >= 500 || response->status == 429;
            if (!retryable) break;
            if (attempt >= config.max_retries) {
                throw Error(ErrorCode::TransportError,
                            "upstream unreachable after " + std::to_string(attempt + 1) + " attempts: " +
                                (response ? "HTTP " + std::to_string(response->status)
                                          : httplib::to_string(response.error())));
            }
            std::this_thread::sleep_for(config.backoff_base * (1LL << attempt));
        }

        if (response->status == 401 || response->status == 403) {
            throw Error(ErrorCode::AuthError, "upstream rejected credentials (HTTP " +
                                                  std::to_string(response->status) + ")");
        }
        if (response->status != 200) {
            throw Error(ErrorCode::TransportError, "upstream answered HTTP " + std::to_string(response->status));
        }

        nlohmann::json page;
        try {
            page = nlohmann::json::parse(response->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaError, std::string("search page is not JSON: ") + e.what());
        }
        if (!page.is_object() || !page.contains("rows") || !page["rows"].is_array()) {
            throw Error(ErrorCode::SchemaError, "search page lacks a 'rows' array");
        }

        // The cursor is the latest creation time on the page, whatever order
        // the rows arrived in.
        const auto& rows = page["rows"];
        std::size_t fresh = 0;
        std::optional<Timestamp> latest;
        for (const auto& row : rows) {
            auto wire = wire_from_json(row);
            auto annotation = parse_annotation(wire);
            if (!wire.created.empty() && (!latest || annotation.created_at > *latest)) {
                latest = annotation.created_at;
                cursor = wire.created;
            }
            if (seen.insert(annotation.id).second) {
                out.push_back(std::move(annotation));
                ++fresh;
            }
        }
        if (rows.size() < static_cast<std::size_t>(config.page_size) || fresh == 0 || cursor.empty()) break;
    }

    sort_annotations(out);
    return out;
}

}  // namespace synthlab
