#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "synthlab/backlinks.hpp"
#include "synthlab/domain.hpp"

namespace synthlab {

enum class EntityKind { annotation, group, note, document };

std::string_view to_string(EntityKind kind);

/// Materialized state of one synthesis session. Always the fold of its event
/// log; never mutated except through apply_event.
struct SessionState {
    std::string id;
    std::string owner;
    std::vector<std::string> source_uris;
    Timestamp created_at{};
    std::uint64_t last_seq = 0;

    EntityStore<Annotation> annotations;
    EntityStore<AnnotationGroup> groups;
    EntityStore<InTheMomentNote> notes;
    EntityStore<SynthesisDocument> documents;

    /// Derived from notes and documents; not part of the serialized form.
    BacklinkIndex backlinks;

    /// Lookup order is annotation, group, note, document.
    std::optional<EntityKind> entity_kind(const std::string& id) const;
    bool has_source(std::string_view uri) const;
};

/// Folds one event into the state. Rejects anything a well-formed log could
/// not contain (sequence gaps, unknown ids, archived targets) with
/// Error{MalformedLog}; the state is unspecified after a throw.
void apply_event(SessionState& state, const EventRecord& event);

/// Computes the backlink index from the forward links alone.
BacklinkIndex rebuild_backlinks(const SessionState& state);

std::string next_group_id(const SessionState& state);
std::string next_note_id(const SessionState& state);
std::string next_document_id(const SessionState& state);
std::string format_session_id(std::uint64_t n);

/// Canonical session document (schema in docs/formats.md).
Json state_to_json(const SessionState& state);
/// Throws Error{CorruptLog} when the document does not match the schema.
SessionState state_from_json(const Json& j);
std::string serialize_state(const SessionState& state);

/// Event-sourced session: the only way to change state is append().
class Session {
public:
    using Sink = std::function<void(const EventRecord&)>;

    static Session create(std::string id, std::string owner, std::vector<std::string> source_uris,
                          Clock clock = system_clock(), Sink sink = {});

    /// Rebuilds a session from its full log. Throws Error{MalformedLog}.
    static Session replay(std::vector<EventRecord> log, Clock clock = system_clock());

    /// Starts from a snapshot and applies every log event past its last_seq.
    static Session restore(SessionState snapshot, std::vector<EventRecord> log, Clock clock = system_clock());

    const SessionState& state() const { return state_; }
    const std::vector<EventRecord>& events() const { return log_; }

    /// Stamps seq and time, hands the record to the sink, then commits it.
    /// If the sink or the reducer throws, nothing is committed.
    const EventRecord& append(EventPayload payload);

    void set_sink(Sink sink) { sink_ = std::move(sink); }

private:
    explicit Session(Clock clock) : clock_(std::move(clock)) {}

    Clock clock_;
    Sink sink_;
    SessionState state_;
    std::vector<EventRecord> log_;
};

/// Structural invariants that can be checked on the state alone.
std::vector<std::string> validate_state(const SessionState& state);

/// validate_state plus the log invariants: gapless sequence, archived groups
/// untouched after archival, and the log replaying to the current state.
/// Returns one message per violation, each naming the entity involved.
std::vector<std::string> validate_session(const Session& session);

}  // namespace synthlab
