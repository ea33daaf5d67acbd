#include "synthlab/domain.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace synthlab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyLabel: return "EmptyLabel";
        case ErrorCode::EmptyNote: return "EmptyNote";
        case ErrorCode::EmptyOwner: return "EmptyOwner";
        case ErrorCode::NeedTwoGroups: return "NeedTwoGroups";
        case ErrorCode::DuplicateGroup: return "DuplicateGroup";
        case ErrorCode::MissingSource: return "MissingSource";
        case ErrorCode::UnknownSource: return "UnknownSource";
        case ErrorCode::DanglingReference: return "DanglingReference";
        case ErrorCode::ScopeViolation: return "ScopeViolation";
        case ErrorCode::InvalidRequest: return "InvalidRequest";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownAnnotation: return "UnknownAnnotation";
        case ErrorCode::UnknownGroup: return "UnknownGroup";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::UnknownDocument: return "UnknownDocument";
        case ErrorCode::NotAMember: return "NotAMember";
        case ErrorCode::GroupArchived: return "GroupArchived";
        case ErrorCode::SameGroup: return "SameGroup";
        case ErrorCode::AuthError: return "AuthError";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::FileError: return "FileError";
        case ErrorCode::MalformedLog: return "MalformedLog";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::DataDirError: return "DataDirError";
        case ErrorCode::BindError: return "BindError";
    }
    return "Unknown";
}

bool AnnotationGroup::has_member(std::string_view annotation_id) const {
    return std::find(member_ids.begin(), member_ids.end(), annotation_id) != member_ids.end();
}

std::string_view to_string(DocumentLevel level) {
    switch (level) {
        case DocumentLevel::per_source_summary: return "per_source_summary";
        case DocumentLevel::cross_source_synthesis: return "cross_source_synthesis";
    }
    return "";
}

std::optional<DocumentLevel> parse_document_level(std::string_view text) {
    if (text == "per_source_summary") return DocumentLevel::per_source_summary;
    if (text == "cross_source_synthesis") return DocumentLevel::cross_source_synthesis;
    return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 12> kEventKindNames = {
    "session_created",    "annotations_ingested", "filter_applied",         "group_created",
    "annotation_assigned", "annotation_removed",  "annotation_transferred", "groups_merged",
    "note_created",       "note_linked",          "document_created",       "document_edited",
};

static_assert(kEventKindNames.size() == std::variant_size_v<EventPayload>);

}  // namespace

std::string_view to_string(EventKind kind) {
    return kEventKindNames.at(static_cast<std::size_t>(kind));
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (std::size_t i = 0; i < kEventKindNames.size(); ++i) {
        if (kEventKindNames[i] == text) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

// =================================================================================================
//      Text helpers
// =================================================================================================

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool iequals_ascii(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
        if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
        if (x != y) return false;
    }
    return true;
}

std::vector<std::string> dedupe_case_insensitive(const std::vector<std::string>& values) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& v : values) {
        if (seen.insert(to_lower_ascii(v)).second) out.push_back(v);
    }
    return out;
}

std::vector<ReferenceToken> find_reference_tokens(std::string_view body) {
    static constexpr std::string_view kOpen = "((ref:";
    std::vector<ReferenceToken> tokens;
    std::size_t pos = 0;
    while ((pos = body.find(kOpen, pos)) != std::string_view::npos) {
        std::size_t id_begin = pos + kOpen.size();
        std::size_t id_end = id_begin;
        while (id_end < body.size()) {
            char c = body[id_end];
            if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r') break;
            ++id_end;
        }
        if (id_end > id_begin && body.substr(id_end, 2) == "))") {
            tokens.push_back({pos, id_end + 2 - pos, std::string(body.substr(id_begin, id_end - id_begin))});
            pos = id_end + 2;
        } else {
            pos = id_begin;
        }
    }
    return tokens;
}

std::vector<std::string> referenced_ids(std::string_view body) {
    std::vector<std::string> ids;
    for (auto& token : find_reference_tokens(body)) {
        if (std::find(ids.begin(), ids.end(), token.entity_id) == ids.end()) ids.push_back(token.entity_id);
    }
    return ids;
}

// =================================================================================================
//      JSON
// =================================================================================================

namespace {

Timestamp timestamp_at(const Json& j, const char* key) {
    try {
        return parse_timestamp(j.at(key).get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw Json::other_error::create(501, std::string("bad timestamp in '") + key + "': " + e.what(), &j);
    }
}

template <class T>
T value_or(const Json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->template get<T>();
}

}  // namespace

void to_json(Json& j, const Annotation& a) {
    j = Json{{"id", a.id},
             {"source_uri", a.source_uri},
             {"source_title", a.source_title},
             {"author", a.author},
             {"quote", a.quote},
             {"body", a.body},
             {"tags", a.tags},
             {"created_at", format_timestamp(a.created_at)},
             {"updated_at", format_timestamp(a.updated_at)},
             {"reply_to", a.reply_to},
             {"missing_ancestors", a.missing_ancestors}};
}

void from_json(const Json& j, Annotation& a) {
    a.id = j.at("id").get<std::string>();
    a.source_uri = j.at("source_uri").get<std::string>();
    a.source_title = value_or<std::string>(j, "source_title", "");
    a.author = value_or<std::string>(j, "author", "");
    a.quote = value_or<std::string>(j, "quote", "");
    a.body = value_or<std::string>(j, "body", "");
    a.tags = value_or<std::vector<std::string>>(j, "tags", {});
    a.created_at = timestamp_at(j, "created_at");
    a.updated_at = timestamp_at(j, "updated_at");
    a.reply_to = value_or<std::vector<std::string>>(j, "reply_to", {});
    a.missing_ancestors = value_or<std::vector<std::string>>(j, "missing_ancestors", {});
}

void to_json(Json& j, const AnnotationGroup& g) {
    j = Json{{"id", g.id},
             {"label", g.label},
             {"description", g.description},
             {"member_ids", g.member_ids},
             {"parent_group_ids", g.parent_group_ids},
             {"archived", g.archived},
             {"created_at", format_timestamp(g.created_at)}};
}

void from_json(const Json& j, AnnotationGroup& g) {
    g.id = j.at("id").get<std::string>();
    g.label = j.at("label").get<std::string>();
    g.description = value_or<std::string>(j, "description", "");
    g.member_ids = j.at("member_ids").get<std::vector<std::string>>();
    g.parent_group_ids = value_or<std::vector<std::string>>(j, "parent_group_ids", {});
    g.archived = value_or(j, "archived", false);
    g.created_at = timestamp_at(j, "created_at");
}

void to_json(Json& j, const InTheMomentNote& n) {
    j = Json{{"id", n.id},
             {"text", n.text},
             {"created_at", format_timestamp(n.created_at)},
             {"created_seq", n.created_seq},
             {"linked_annotation_ids", n.linked_annotation_ids},
             {"linked_group_ids", n.linked_group_ids}};
}

void from_json(const Json& j, InTheMomentNote& n) {
    n.id = j.at("id").get<std::string>();
    n.text = j.at("text").get<std::string>();
    n.created_at = timestamp_at(j, "created_at");
    n.created_seq = j.at("created_seq").get<std::uint64_t>();
    n.linked_annotation_ids = value_or<std::vector<std::string>>(j, "linked_annotation_ids", {});
    n.linked_group_ids = value_or<std::vector<std::string>>(j, "linked_group_ids", {});
}

void to_json(Json& j, const SynthesisDocument& d) {
    j = Json{{"id", d.id},
             {"level", to_string(d.level)},
             {"source_uri", d.source_uri ? Json(*d.source_uri) : Json(nullptr)},
             {"body", d.body},
             {"created_at", format_timestamp(d.created_at)},
             {"updated_at", format_timestamp(d.updated_at)},
             {"created_seq", d.created_seq}};
}

namespace {

DocumentLevel level_at(const Json& j) {
    auto text = j.at("level").get<std::string>();
    auto level = parse_document_level(text);
    if (!level) throw Json::other_error::create(501, "unknown document level '" + text + "'", &j);
    return *level;
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

void from_json(const Json& j, SynthesisDocument& d) {
    d.id = j.at("id").get<std::string>();
    d.level = level_at(j);
    d.source_uri = optional_string(j, "source_uri");
    d.body = value_or<std::string>(j, "body", "");
    d.created_at = timestamp_at(j, "created_at");
    d.updated_at = timestamp_at(j, "updated_at");
    d.created_seq = j.at("created_seq").get<std::uint64_t>();
}

void to_json(Json& j, const FilterQuery& q) {
    j = Json{{"keywords", q.keywords},
             {"authors", q.authors},
             {"tags", q.tags},
             {"include_replies", q.include_replies}};
}

void from_json(const Json& j, FilterQuery& q) {
    q.keywords = value_or<std::vector<std::string>>(j, "keywords", {});
    q.authors = value_or<std::vector<std::string>>(j, "authors", {});
    q.tags = value_or<std::vector<std::string>>(j, "tags", {});
    q.include_replies = value_or(j, "include_replies", true);
}

namespace {

Json payload_json(const EventPayload& payload) {
    using namespace events;
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SessionCreated>) {
                return {{"session_id", p.session_id}, {"owner", p.owner}, {"source_uris", p.source_uris}};
            } else if constexpr (std::is_same_v<T, AnnotationsIngested>) {
                return {{"origin", p.origin}, {"annotations", p.annotations}};
            } else if constexpr (std::is_same_v<T, FilterApplied>) {
                return {{"query", p.query}};
            } else if constexpr (std::is_same_v<T, GroupCreated>) {
                return {{"group_id", p.group_id}, {"label", p.label}, {"description", p.description}};
            } else if constexpr (std::is_same_v<T, AnnotationAssigned> || std::is_same_v<T, AnnotationRemoved>) {
                return {{"annotation_id", p.annotation_id}, {"group_id", p.group_id}};
            } else if constexpr (std::is_same_v<T, AnnotationTransferred>) {
                return {{"annotation_id", p.annotation_id},
                        {"from_group_id", p.from_group_id},
                        {"to_group_id", p.to_group_id}};
            } else if constexpr (std::is_same_v<T, GroupsMerged>) {
                return {{"group_id", p.group_id},
                        {"label", p.label},
                        {"description", p.description},
                        {"parent_group_ids", p.parent_group_ids}};
            } else if constexpr (std::is_same_v<T, NoteCreated>) {
                return {{"note_id", p.note_id},
                        {"text", p.text},
                        {"linked_annotation_ids", p.linked_annotation_ids},
                        {"linked_group_ids", p.linked_group_ids}};
            } else if constexpr (std::is_same_v<T, NoteLinked>) {
                return {{"note_id", p.note_id}, {"annotation_ids", p.annotation_ids}, {"group_ids", p.group_ids}};
            } else if constexpr (std::is_same_v<T, DocumentCreated>) {
                return {{"document_id", p.document_id},
                        {"level", to_string(p.level)},
                        {"source_uri", p.source_uri ? Json(*p.source_uri) : Json(nullptr)}};
            } else {
                static_assert(std::is_same_v<T, DocumentEdited>);
                return {{"document_id", p.document_id}, {"body", p.body}};
            }
        },
        payload);
}

using Strings = std::vector<std::string>;

EventPayload payload_from_json(EventKind kind, const Json& j) {
    using namespace events;
    switch (kind) {
        case EventKind::session_created:
            return SessionCreated{j.at("session_id").get<std::string>(), j.at("owner").get<std::string>(),
                                  j.at("source_uris").get<Strings>()};
        case EventKind::annotations_ingested:
            return AnnotationsIngested{j.at("origin").get<std::string>(),
                                       j.at("annotations").get<std::vector<Annotation>>()};
        case EventKind::filter_applied:
            return FilterApplied{j.at("query").get<FilterQuery>()};
        case EventKind::group_created:
            return GroupCreated{j.at("group_id").get<std::string>(), j.at("label").get<std::string>(),
                                j.at("description").get<std::string>()};
        case EventKind::annotation_assigned:
            return AnnotationAssigned{j.at("annotation_id").get<std::string>(), j.at("group_id").get<std::string>()};
        case EventKind::annotation_removed:
            return AnnotationRemoved{j.at("annotation_id").get<std::string>(), j.at("group_id").get<std::string>()};
        case EventKind::annotation_transferred:
            return AnnotationTransferred{j.at("annotation_id").get<std::string>(),
                                         j.at("from_group_id").get<std::string>(),
                                         j.at("to_group_id").get<std::string>()};
        case EventKind::groups_merged:
            return GroupsMerged{j.at("group_id").get<std::string>(), j.at("label").get<std::string>(),
                                j.at("description").get<std::string>(), j.at("parent_group_ids").get<Strings>()};
        case EventKind::note_created:
            return NoteCreated{j.at("note_id").get<std::string>(), j.at("text").get<std::string>(),
                               j.at("linked_annotation_ids").get<Strings>(), j.at("linked_group_ids").get<Strings>()};
        case EventKind::note_linked:
            return NoteLinked{j.at("note_id").get<std::string>(), j.at("annotation_ids").get<Strings>(),
                              j.at("group_ids").get<Strings>()};
        case EventKind::document_created:
            return DocumentCreated{j.at("document_id").get<std::string>(), level_at(j),
                                   optional_string(j, "source_uri")};
        case EventKind::document_edited:
            return DocumentEdited{j.at("document_id").get<std::string>(), j.at("body").get<std::string>()};
    }
    throw Json::other_error::create(501, "unhandled event kind", &j);
}

}  // namespace

void to_json(Json& j, const EventRecord& e) {
    j = Json{{"seq", e.seq},
             {"at", format_timestamp(e.at)},
             {"kind", to_string(e.kind())},
             {"payload", payload_json(e.payload)}};
}

void from_json(const Json& j, EventRecord& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.at = timestamp_at(j, "at");
    auto kind_text = j.at("kind").get<std::string>();
    auto kind = parse_event_kind(kind_text);
    if (!kind) throw Json::other_error::create(501, "unknown event kind '" + kind_text + "'", &j);
    e.payload = payload_from_json(*kind, j.at("payload"));
}

std::string serialize_event(const EventRecord& event) {
    return Json(event).dump();
}

EventRecord parse_event(std::string_view line) {
    try {
        return Json::parse(line).get<EventRecord>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedLog, std::string("malformed event record: ") + e.what());
    }
}

}  // namespace synthlab
