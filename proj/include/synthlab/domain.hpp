#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "synthlab/error.hpp"
#include "synthlab/time.hpp"

namespace synthlab {

/// Keys serialize in insertion order.
using Json = nlohmann::ordered_json;

// =================================================================================================
//      Entities
// =================================================================================================

struct Annotation {
    std::string id;
    std::string source_uri;
    std::string source_title;
    std::string author;
    std::string quote;
    std::string body;
    std::vector<std::string> tags;
    Timestamp created_at{};
    Timestamp updated_at{};
    /// Ancestor ids, root first. Empty for top-level annotations.
    std::vector<std::string> reply_to;
    /// Subset of reply_to that does not resolve inside the session.
    std::vector<std::string> missing_ancestors;

    bool is_reply() const { return !reply_to.empty(); }
    bool operator==(const Annotation&) const = default;
};

/// A conceptual building block: a named category of annotations.
struct AnnotationGroup {
    std::string id;
    std::string label;
    std::string description;
    std::vector<std::string> member_ids;
    /// Non-empty exactly when the group was produced by a merge.
    std::vector<std::string> parent_group_ids;
    bool archived = false;
    Timestamp created_at{};

    bool has_member(std::string_view annotation_id) const;
    bool operator==(const AnnotationGroup&) const = default;
};

struct InTheMomentNote {
    std::string id;
    std::string text;
    Timestamp created_at{};
    std::uint64_t created_seq = 0;
    std::vector<std::string> linked_annotation_ids;
    std::vector<std::string> linked_group_ids;

    bool operator==(const InTheMomentNote&) const = default;
};

enum class DocumentLevel { per_source_summary, cross_source_synthesis };

std::string_view to_string(DocumentLevel level);
std::optional<DocumentLevel> parse_document_level(std::string_view text);

struct SynthesisDocument {
    std::string id;
    DocumentLevel level = DocumentLevel::cross_source_synthesis;
    std::optional<std::string> source_uri;
    std::string body;
    Timestamp created_at{};
    Timestamp updated_at{};
    std::uint64_t created_seq = 0;

    bool operator==(const SynthesisDocument&) const = default;
};

/// Distill-workspace query. Lists are OR-ed internally and the three clauses
/// are AND-ed together; an empty list is vacuously true.
struct FilterQuery {
    std::vector<std::string> keywords;
    std::vector<std::string> authors;
    std::vector<std::string> tags;
    bool include_replies = true;

    bool operator==(const FilterQuery&) const = default;
};

// =================================================================================================
//      Text helpers
// =================================================================================================

std::string to_lower_ascii(std::string_view text);
bool iequals_ascii(std::string_view a, std::string_view b);

/// Removes case-insensitive duplicates, keeping the first spelling and order.
std::vector<std::string> dedupe_case_insensitive(const std::vector<std::string>& values);

/// Inline citation of the form ((ref:ENTITY_ID)).
struct ReferenceToken {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string entity_id;
};

std::vector<ReferenceToken> find_reference_tokens(std::string_view body);

/// Distinct entity ids cited by `body`, in order of first appearance.
std::vector<std::string> referenced_ids(std::string_view body);

// =================================================================================================
//      Entity stores
// =================================================================================================

/// Insertion-ordered store with id lookup. Entities are never erased.
template <class T>
class EntityStore {
public:
    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

    const T* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &items_[it->second];
    }

    T* find(std::string_view id) {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &items_[it->second];
    }

    /// Returns false (and leaves the store unchanged) on a duplicate id.
    bool insert(T item) {
        auto [it, inserted] = index_.emplace(item.id, items_.size());
        if (!inserted) return false;
        items_.push_back(std::move(item));
        return true;
    }

    const std::vector<T>& items() const { return items_; }
    std::vector<T>& items() { return items_; }
    std::size_t size() const { return items_.size(); }

    bool operator==(const EntityStore& other) const { return items_ == other.items_; }

private:
    std::vector<T> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

// =================================================================================================
//      Events
// =================================================================================================

enum class EventKind {
    session_created,
    annotations_ingested,
    filter_applied,
    group_created,
    annotation_assigned,
    annotation_removed,
    annotation_transferred,
    groups_merged,
    note_created,
    note_linked,
    document_created,
    document_edited,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

namespace events {

struct SessionCreated {
    std::string session_id;
    std::string owner;
    std::vector<std::string> source_uris;
    bool operator==(const SessionCreated&) const = default;
};

struct AnnotationsIngested {
    /// The source URI that was fetched, or "fixture" for uploaded exports.
    std::string origin;
    /// Only annotations that were new to the session at ingest time.
    std::vector<Annotation> annotations;
    bool operator==(const AnnotationsIngested&) const = default;
};

struct FilterApplied {
    FilterQuery query;
    bool operator==(const FilterApplied&) const = default;
};

struct GroupCreated {
    std::string group_id;
    std::string label;
    std::string description;
    bool operator==(const GroupCreated&) const = default;
};

struct AnnotationAssigned {
    std::string annotation_id;
    std::string group_id;
    bool operator==(const AnnotationAssigned&) const = default;
};

struct AnnotationRemoved {
    std::string annotation_id;
    std::string group_id;
    bool operator==(const AnnotationRemoved&) const = default;
};

struct AnnotationTransferred {
    std::string annotation_id;
    std::string from_group_id;
    std::string to_group_id;
    bool operator==(const AnnotationTransferred&) const = default;
};

struct GroupsMerged {
    std::string group_id;
    std::string label;
    std::string description;
    std::vector<std::string> parent_group_ids;
    bool operator==(const GroupsMerged&) const = default;
};

struct NoteCreated {
    std::string note_id;
    std::string text;
    std::vector<std::string> linked_annotation_ids;
    std::vector<std::string> linked_group_ids;
    bool operator==(const NoteCreated&) const = default;
};

/// Adds links to an existing note. The note text itself never changes.
struct NoteLinked {
    std::string note_id;
    std::vector<std::string> annotation_ids;
    std::vector<std::string> group_ids;
    bool operator==(const NoteLinked&) const = default;
};

struct DocumentCreated {
    std::string document_id;
    DocumentLevel level = DocumentLevel::cross_source_synthesis;
    std::optional<std::string> source_uri;
    bool operator==(const DocumentCreated&) const = default;
};

struct DocumentEdited {
    std::string document_id;
    std::string body;
    bool operator==(const DocumentEdited&) const = default;
};

}  // namespace events

/// Alternatives are listed in EventKind order, so the payload type alone
/// determines the kind.
using EventPayload = std::variant<events::SessionCreated, events::AnnotationsIngested, events::FilterApplied,
                                  events::GroupCreated, events::AnnotationAssigned, events::AnnotationRemoved,
                                  events::AnnotationTransferred, events::GroupsMerged, events::NoteCreated,
                                  events::NoteLinked, events::DocumentCreated, events::DocumentEdited>;

struct EventRecord {
    std::uint64_t seq = 0;
    Timestamp at{};
    EventPayload payload;

    EventKind kind() const { return static_cast<EventKind>(payload.index()); }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&payload);
    }

    bool operator==(const EventRecord&) const = default;
};

// =================================================================================================
//      JSON
// =================================================================================================

void to_json(Json& j, const Annotation& a);
void from_json(const Json& j, Annotation& a);
void to_json(Json& j, const AnnotationGroup& g);
void from_json(const Json& j, AnnotationGroup& g);
void to_json(Json& j, const InTheMomentNote& n);
void from_json(const Json& j, InTheMomentNote& n);
void to_json(Json& j, const SynthesisDocument& d);
void from_json(const Json& j, SynthesisDocument& d);
void to_json(Json& j, const FilterQuery& q);
void from_json(const Json& j, FilterQuery& q);
void to_json(Json& j, const EventRecord& e);
void from_json(const Json& j, EventRecord& e);

/// One JSON Lines record, no trailing newline.
std::string serialize_event(const EventRecord& event);

/// Throws Error{MalformedLog} when the line is not a well-formed event.
EventRecord parse_event(std::string_view line);

}  // namespace synthlab
