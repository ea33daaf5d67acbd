#include "synthlab/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace synthlab {

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : fallback;
}

[[noreturn]] void schema_error(const std::string& what) {
    throw Error(ErrorCode::SchemaError, what);
}

std::string string_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_string()) schema_error(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_array()) schema_error(std::string("field '") + key + "' is not an array");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) schema_error(std::string("field '") + key + "' holds a non-string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::optional<std::string> document_title(const nlohmann::json& j) {
    auto doc = j.find("document");
    if (doc == j.end() || !doc->is_object()) return std::nullopt;
    auto title = doc->find("title");
    if (title == doc->end()) return std::nullopt;
    if (title->is_string()) return title->get<std::string>();
    if (title->is_array() && !title->empty() && title->front().is_string()) return title->front().get<std::string>();
    return std::nullopt;
}

std::optional<std::string> exact_quote(const nlohmann::json& j) {
    auto targets = j.find("target");
    if (targets == j.end() || !targets->is_array()) return std::nullopt;
    for (const auto& target : *targets) {
        if (!target.is_object()) continue;
        auto selectors = target.find("selector");
        if (selectors == target.end() || !selectors->is_array()) continue;
        for (const auto& sel : *selectors) {
            if (sel.is_object() && sel.value("type", "") == "TextQuoteSelector" && sel.contains("exact") &&
                sel["exact"].is_string()) {
                return sel["exact"].get<std::string>();
            }
        }
    }
    return std::nullopt;
}

}  // namespace

void IngestConfig::validate() const {
    if (page_size < 1 || page_size > 200) {
        throw Error(ErrorCode::ConfigError, "page_size must be within 1..200, got " + std::to_string(page_size));
    }
    if (max_retries < 0) throw Error(ErrorCode::ConfigError, "max_retries must be >= 0");
    if (timeout.count() <= 0) throw Error(ErrorCode::ConfigError, "timeout must be positive");
}

IngestConfig IngestConfig::from_env() {
    IngestConfig config;
    config.api_base_url = env_or("SYNTHLAB_API_BASE_URL", "https://api.hypothes.is/api");
    config.api_token = env_or("SYNTHLAB_API_TOKEN");
    config.api_group_id = env_or("SYNTHLAB_API_GROUP");
    return config;
}

WireAnnotation wire_from_json(const nlohmann::json& j) {
    if (!j.is_object()) schema_error("record is not an object");
    WireAnnotation w;
    w.id = string_field(j, "id");
    try {
        w.user = string_field(j, "user");
        w.uri = string_field(j, "uri");
        w.text = string_field(j, "text");
        w.tags = string_list(j, "tags");
        w.created = string_field(j, "created");
        w.updated = string_field(j, "updated");
        w.references = string_list(j, "references");
        w.document_title = document_title(j);
        w.exact_quote = exact_quote(j);
    } catch (const Error& e) {
        schema_error("record " + w.id + ": " + e.what());
    }
    return w;
}

std::string normalize_username(std::string_view user) {
    if (user.substr(0, 5) == "acct:") user.remove_prefix(5);
    if (auto at = user.find('@'); at != std::string_view::npos) user = user.substr(0, at);
    return std::string(user);
}

Annotation parse_annotation(const WireAnnotation& raw) {
    if (raw.id.empty()) schema_error("record has no id");
    if (raw.uri.empty()) schema_error("record " + raw.id + " has no uri");

    Annotation a;
    a.id = raw.id;
    a.source_uri = raw.uri;
    a.source_title = raw.document_title.value_or("");
    a.author = normalize_username(raw.user);
    a.quote = raw.exact_quote.value_or("");
    a.body = raw.text;
    a.tags = dedupe_case_insensitive(raw.tags);
    a.reply_to = raw.references;
    try {
        if (!raw.created.empty()) a.created_at = parse_timestamp(raw.created);
        a.updated_at = raw.updated.empty() ? a.created_at : parse_timestamp(raw.updated);
    } catch (const std::invalid_argument& e) {
        schema_error("record " + raw.id + ": " + e.what());
    }
    return a;
}

void sort_annotations(std::vector<Annotation>& annotations) {
    std::stable_sort(annotations.begin(), annotations.end(), [](const Annotation& x, const Annotation& y) {
        return std::tie(x.created_at, x.id) < std::tie(y.created_at, y.id);
    });
}

std::vector<Annotation> parse_fixture(const nlohmann::json& records) {
    if (!records.is_array()) schema_error("fixture is not a JSON array");
    std::vector<Annotation> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            auto a = parse_annotation(wire_from_json(records[i]));
            if (seen.insert(a.id).second) out.push_back(std::move(a));
        } catch (const Error& e) {
            schema_error("fixture record at index " + std::to_string(i) + ": " + e.what());
        }
    }
    sort_annotations(out);
    return out;
}

std::vector<Annotation> load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileError, "cannot open fixture " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json records;
    try {
        records = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        schema_error("fixture " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_fixture(records);
}

IngestResult ingest_annotations(Session& session, std::string origin, std::vector<Annotation> annotations) {
    IngestResult result;
    result.received = annotations.size();
    std::vector<Annotation> fresh;
    std::unordered_set<std::string> batch;
    for (auto& a : annotations) {
        if (session.state().annotations.contains(a.id) || !batch.insert(a.id).second) continue;
        a.missing_ancestors.clear();
        fresh.push_back(std::move(a));
    }
    result.added = fresh.size();
    session.append(events::AnnotationsIngested{std::move(origin), std::move(fresh)});
    return result;
}

}  // namespace synthlab
