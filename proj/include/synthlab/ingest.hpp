#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthlab/domain.hpp"
#include "synthlab/session.hpp"

namespace synthlab {

/// Connection settings for a Hypothesis-compatible search API.
struct IngestConfig {
    std::string api_base_url;
    std::string api_token;
    std::string api_group_id;
    int page_size = 100;
    std::chrono::milliseconds timeout{30'000};
    int max_retries = 3;
    /// First retry delay; each further retry doubles it.
    std::chrono::milliseconds backoff_base{1'000};

    /// Throws Error{ConfigError}.
    void validate() const;

    /// Reads SYNTHLAB_API_BASE_URL, SYNTHLAB_API_TOKEN and SYNTHLAB_API_GROUP.
    static IngestConfig from_env();
};

/// Raw upstream record, as served by the search endpoint.
struct WireAnnotation {
    std::string id;
    std::string user;
    std::string uri;
    std::string text;
    std::vector<std::string> tags;
    std::string created;
    std::string updated;
    std::vector<std::string> references;
    std::optional<std::string> document_title;
    std::optional<std::string> exact_quote;
};

/// Extracts the fields we use from an upstream JSON object. Unknown and
/// absent optional fields are tolerated; a non-object, a missing id or uri,
/// or a wrongly typed field raises Error{SchemaError}.
WireAnnotation wire_from_json(const nlohmann::json& j);

/// Throws Error{SchemaError} when id or uri is empty or a timestamp is malformed.
Annotation parse_annotation(const WireAnnotation& raw);

/// "acct:jdoe@hypothes.is" -> "jdoe". Plain usernames pass through.
std::string normalize_username(std::string_view user);

/// Maps a JSON array of wire records; errors name the record index.
std::vector<Annotation> parse_fixture(const nlohmann::json& records);

/// Throws Error{FileError} if unreadable, Error{SchemaError} on bad content.
std::vector<Annotation> load_fixture(const std::filesystem::path& path);

/// Created-at ascending, then id.
void sort_annotations(std::vector<Annotation>& annotations);

/// Pages through the search endpoint for `source_uri` with a search_after
/// cursor and returns every visible annotation, deduplicated and sorted.
/// Throws Error{AuthError | TransportError | SchemaError}.
std::vector<Annotation> fetch_annotations(const IngestConfig& config, std::string_view source_uri);

struct IngestResult {
    std::size_t received = 0;
    std::size_t added = 0;
};

/// Appends one annotations_ingested event carrying only annotations that
/// are new to the session.
IngestResult ingest_annotations(Session& session, std::string origin, std::vector<Annotation> annotations);

}  // namespace synthlab
