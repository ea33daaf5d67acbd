#include "synthlab/session.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace synthlab {

namespace {

constexpr const char* kSessionFormat = "synthlab.session/1";

[[noreturn]] void malformed(const EventRecord& event, const std::string& what) {
    throw Error(ErrorCode::MalformedLog,
                "event " + std::to_string(event.seq) + " (" + std::string(to_string(event.kind())) + "): " + what);
}

std::string prefixed_id(const char* prefix, std::size_t n) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, n);
    return buf;
}

void recompute_missing_ancestors(SessionState& state) {
    for (auto& a : state.annotations.items()) {
        a.missing_ancestors.clear();
        for (const auto& parent : a.reply_to) {
            if (!state.annotations.contains(parent)) a.missing_ancestors.push_back(parent);
        }
    }
}

Referrer note_referrer(const InTheMomentNote& n) {
    return {ReferrerKind::note, n.id, n.created_at, n.created_seq};
}

Referrer document_referrer(const SynthesisDocument& d) {
    return {ReferrerKind::document, d.id, d.created_at, d.created_seq};
}

AnnotationGroup& mutable_group(SessionState& state, const EventRecord& event, const std::string& id) {
    auto* g = state.groups.find(id);
    if (!g) malformed(event, "unknown group " + id);
    if (g->archived) malformed(event, "group " + id + " is archived");
    return *g;
}

void require_annotation(const SessionState& state, const EventRecord& event, const std::string& id) {
    if (!state.annotations.contains(id)) malformed(event, "unknown annotation " + id);
}

void check_document_body(const SessionState& state, const EventRecord& event, const SynthesisDocument& doc,
                         const std::string& body) {
    for (const auto& id : referenced_ids(body)) {
        auto kind = state.entity_kind(id);
        if (!kind || *kind == EntityKind::document) malformed(event, "dangling reference " + id);
        if (*kind == EntityKind::annotation && doc.level == DocumentLevel::per_source_summary &&
            state.annotations.find(id)->source_uri != doc.source_uri) {
            malformed(event, "annotation " + id + " is outside the document's source");
        }
    }
}

struct Reducer {
    SessionState& state;
    const EventRecord& event;

    void operator()(const events::SessionCreated& p) {
        if (event.seq != 1 || !state.id.empty()) malformed(event, "session_created must be the first event");
        state.id = p.session_id;
        state.owner = p.owner;
        state.source_uris = p.source_uris;
        state.created_at = event.at;
    }

    void operator()(const events::AnnotationsIngested& p) {
        for (const auto& a : p.annotations) {
            if (!state.annotations.insert(a)) malformed(event, "duplicate annotation " + a.id);
            if (!state.has_source(a.source_uri)) state.source_uris.push_back(a.source_uri);
        }
        recompute_missing_ancestors(state);
    }

    void operator()(const events::FilterApplied&) {}

    void operator()(const events::GroupCreated& p) {
        if (p.label.empty()) malformed(event, "empty group label");
        AnnotationGroup g;
        g.id = p.group_id;
        g.label = p.label;
        g.description = p.description;
        g.created_at = event.at;
        if (!state.groups.insert(std::move(g))) malformed(event, "duplicate group " + p.group_id);
    }

    void operator()(const events::AnnotationAssigned& p) {
        require_annotation(state, event, p.annotation_id);
        auto& g = mutable_group(state, event, p.group_id);
        if (g.has_member(p.annotation_id)) malformed(event, p.annotation_id + " already in " + p.group_id);
        g.member_ids.push_back(p.annotation_id);
    }

    void operator()(const events::AnnotationRemoved& p) {
        auto& g = mutable_group(state, event, p.group_id);
        auto it = std::find(g.member_ids.begin(), g.member_ids.end(), p.annotation_id);
        if (it == g.member_ids.end()) malformed(event, p.annotation_id + " not in " + p.group_id);
        g.member_ids.erase(it);
    }

    void operator()(const events::AnnotationTransferred& p) {
        if (p.from_group_id == p.to_group_id) malformed(event, "transfer within one group");
        auto& to = mutable_group(state, event, p.to_group_id);
        auto& from = mutable_group(state, event, p.from_group_id);
        auto it = std::find(from.member_ids.begin(), from.member_ids.end(), p.annotation_id);
        if (it == from.member_ids.end()) malformed(event, p.annotation_id + " not in " + p.from_group_id);
        from.member_ids.erase(it);
        if (!to.has_member(p.annotation_id)) to.member_ids.push_back(p.annotation_id);
    }

    void operator()(const events::GroupsMerged& p) {
        if (p.label.empty()) malformed(event, "empty group label");
        if (p.parent_group_ids.size() < 2) malformed(event, "merge needs at least two groups");
        std::set<std::string> distinct(p.parent_group_ids.begin(), p.parent_group_ids.end());
        if (distinct.size() != p.parent_group_ids.size()) malformed(event, "repeated parent group");

        AnnotationGroup merged;
        merged.id = p.group_id;
        merged.label = p.label;
        merged.description = p.description;
        merged.parent_group_ids = p.parent_group_ids;
        merged.created_at = event.at;
        for (const auto& parent_id : p.parent_group_ids) {
            auto& parent = mutable_group(state, event, parent_id);
            for (const auto& m : parent.member_ids) {
                if (!merged.has_member(m)) merged.member_ids.push_back(m);
            }
        }
        for (const auto& parent_id : p.parent_group_ids) state.groups.find(parent_id)->archived = true;
        if (!state.groups.insert(std::move(merged))) malformed(event, "duplicate group " + p.group_id);
    }

    void operator()(const events::NoteCreated& p) {
        if (p.text.empty()) malformed(event, "empty note");
        for (const auto& id : p.linked_annotation_ids) require_annotation(state, event, id);
        for (const auto& id : p.linked_group_ids) {
            if (!state.groups.contains(id)) malformed(event, "unknown group " + id);
        }
        InTheMomentNote note;
        note.id = p.note_id;
        note.text = p.text;
        note.created_at = event.at;
        note.created_seq = event.seq;
        note.linked_annotation_ids = p.linked_annotation_ids;
        note.linked_group_ids = p.linked_group_ids;
        auto ref = note_referrer(note);
        if (!state.notes.insert(std::move(note))) malformed(event, "duplicate note " + p.note_id);
        for (const auto& id : p.linked_annotation_ids) state.backlinks.add(id, ref);
        for (const auto& id : p.linked_group_ids) state.backlinks.add(id, ref);
    }

    void operator()(const events::NoteLinked& p) {
        auto* note = state.notes.find(p.note_id);
        if (!note) malformed(event, "unknown note " + p.note_id);
        for (const auto& id : p.annotation_ids) require_annotation(state, event, id);
        for (const auto& id : p.group_ids) {
            if (!state.groups.contains(id)) malformed(event, "unknown group " + id);
        }
        auto ref = note_referrer(*note);
        auto link = [&](std::vector<std::string>& links, const std::string& id) {
            if (std::find(links.begin(), links.end(), id) == links.end()) links.push_back(id);
            state.backlinks.add(id, ref);
        };
        for (const auto& id : p.annotation_ids) link(note->linked_annotation_ids, id);
        for (const auto& id : p.group_ids) link(note->linked_group_ids, id);
    }

    void operator()(const events::DocumentCreated& p) {
        bool per_source = p.level == DocumentLevel::per_source_summary;
        if (per_source != p.source_uri.has_value()) malformed(event, "source_uri must accompany per-source level");
        if (p.source_uri && !state.has_source(*p.source_uri)) malformed(event, "unknown source " + *p.source_uri);
        SynthesisDocument doc;
        doc.id = p.document_id;
        doc.level = p.level;
        doc.source_uri = p.source_uri;
        doc.created_at = event.at;
        doc.updated_at = event.at;
        doc.created_seq = event.seq;
        if (!state.documents.insert(std::move(doc))) malformed(event, "duplicate document " + p.document_id);
    }

    void operator()(const events::DocumentEdited& p) {
        auto* doc = state.documents.find(p.document_id);
        if (!doc) malformed(event, "unknown document " + p.document_id);
        check_document_body(state, event, *doc, p.body);
        for (const auto& id : referenced_ids(doc->body)) state.backlinks.remove(id, doc->id);
        doc->body = p.body;
        doc->updated_at = event.at;
        auto ref = document_referrer(*doc);
        for (const auto& id : referenced_ids(doc->body)) state.backlinks.add(id, ref);
    }
};

}  // namespace

std::string_view to_string(EntityKind kind) {
    switch (kind) {
        case EntityKind::annotation: return "annotation";
        case EntityKind::group: return "group";
        case EntityKind::note: return "note";
        case EntityKind::document: return "document";
    }
    return "";
}

std::optional<EntityKind> SessionState::entity_kind(const std::string& id) const {
    if (annotations.contains(id)) return EntityKind::annotation;
    if (groups.contains(id)) return EntityKind::group;
    if (notes.contains(id)) return EntityKind::note;
    if (documents.contains(id)) return EntityKind::document;
    return std::nullopt;
}

bool SessionState::has_source(std::string_view uri) const {
    return std::find(source_uris.begin(), source_uris.end(), uri) != source_uris.end();
}

void apply_event(SessionState& state, const EventRecord& event) {
    if (event.seq != state.last_seq + 1) {
        throw Error(ErrorCode::MalformedLog, "sequence gap: expected " + std::to_string(state.last_seq + 1) +
                                                 ", found " + std::to_string(event.seq));
    }
    if (state.id.empty() && event.kind() != EventKind::session_created) {
        malformed(event, "log does not start with session_created");
    }
    std::visit(Reducer{state, event}, event.payload);
    state.last_seq = event.seq;
}

BacklinkIndex rebuild_backlinks(const SessionState& state) {
    BacklinkIndex index;
    for (const auto& n : state.notes.items()) {
        auto ref = note_referrer(n);
        for (const auto& id : n.linked_annotation_ids) index.add(id, ref);
        for (const auto& id : n.linked_group_ids) index.add(id, ref);
    }
    for (const auto& d : state.documents.items()) {
        auto ref = document_referrer(d);
        for (const auto& id : referenced_ids(d.body)) index.add(id, ref);
    }
    return index;
}

std::string next_group_id(const SessionState& state) { return prefixed_id("grp", state.groups.size() + 1); }
std::string next_note_id(const SessionState& state) { return prefixed_id("note", state.notes.size() + 1); }
std::string next_document_id(const SessionState& state) { return prefixed_id("doc", state.documents.size() + 1); }
std::string format_session_id(std::uint64_t n) { return prefixed_id("ses", n); }

// =================================================================================================
//      Serialization
// =================================================================================================

Json state_to_json(const SessionState& state) {
    return Json{{"format", kSessionFormat},
                {"id", state.id},
                {"owner", state.owner},
                {"created_at", format_timestamp(state.created_at)},
                {"source_uris", state.source_uris},
                {"last_seq", state.last_seq},
                {"annotations", state.annotations.items()},
                {"groups", state.groups.items()},
                {"notes", state.notes.items()},
                {"documents", state.documents.items()}};
}

SessionState state_from_json(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != kSessionFormat) {
            throw Error(ErrorCode::CorruptLog, "unsupported session format");
        }
        SessionState state;
        state.id = j.at("id").get<std::string>();
        state.owner = j.at("owner").get<std::string>();
        state.created_at = parse_timestamp(j.at("created_at").get<std::string>());
        state.source_uris = j.at("source_uris").get<std::vector<std::string>>();
        state.last_seq = j.at("last_seq").get<std::uint64_t>();
        auto fill = [](auto& store, const Json& array) {
            using T = std::decay_t<decltype(store.items().front())>;
            for (const auto& item : array) {
                if (!store.insert(item.get<T>())) throw Error(ErrorCode::CorruptLog, "duplicate id in snapshot");
            }
        };
        fill(state.annotations, j.at("annotations"));
        fill(state.groups, j.at("groups"));
        fill(state.notes, j.at("notes"));
        fill(state.documents, j.at("documents"));
        state.backlinks = rebuild_backlinks(state);
        return state;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("bad session document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::CorruptLog, std::string("bad session document: ") + e.what());
    }
}

std::string serialize_state(const SessionState& state) {
    return state_to_json(state).dump(2) + "\n";
}

// =================================================================================================
//      Session
// =================================================================================================

Session Session::create(std::string id, std::string owner, std::vector<std::string> source_uris, Clock clock,
                        Sink sink) {
    if (owner.empty()) throw Error(ErrorCode::EmptyOwner, "session owner must be non-empty");
    Session session(std::move(clock));
    session.sink_ = std::move(sink);
    session.append(events::SessionCreated{std::move(id), std::move(owner), std::move(source_uris)});
    return session;
}

Session Session::replay(std::vector<EventRecord> log, Clock clock) {
    Session session(std::move(clock));
    for (const auto& event : log) apply_event(session.state_, event);
    session.log_ = std::move(log);
    return session;
}

Session Session::restore(SessionState snapshot, std::vector<EventRecord> log, Clock clock) {
    if (log.size() < snapshot.last_seq) {
        throw Error(ErrorCode::MalformedLog, "log is shorter than the snapshot");
    }
    Session session(std::move(clock));
    session.state_ = std::move(snapshot);
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i + 1) throw Error(ErrorCode::MalformedLog, "sequence gap at " + std::to_string(i + 1));
        if (log[i].seq > session.state_.last_seq) apply_event(session.state_, log[i]);
    }
    session.log_ = std::move(log);
    return session;
}

const EventRecord& Session::append(EventPayload payload) {
    EventRecord record{state_.last_seq + 1, clock_(), std::move(payload)};
    SessionState next = state_;
    apply_event(next, record);
    if (sink_) sink_(record);
    state_ = std::move(next);
    log_.push_back(std::move(record));
    return log_.back();
}

// =================================================================================================
//      Validation
// =================================================================================================

std::vector<std::string> validate_state(const SessionState& s) {
    std::vector<std::string> out;

    std::unordered_set<std::string> annotation_ids;
    for (const auto& a : s.annotations.items()) {
        if (!annotation_ids.insert(a.id).second) out.push_back("annotation " + a.id + ": duplicate id");
        for (const auto& parent : a.reply_to) {
            bool flagged = std::find(a.missing_ancestors.begin(), a.missing_ancestors.end(), parent) !=
                           a.missing_ancestors.end();
            if (!s.annotations.contains(parent) && !flagged) {
                out.push_back("annotation " + a.id + ": ancestor " + parent + " neither present nor flagged missing");
            }
        }
        if (dedupe_case_insensitive(a.tags).size() != a.tags.size()) {
            out.push_back("annotation " + a.id + ": duplicate tags");
        }
    }

    for (const auto& g : s.groups.items()) {
        std::unordered_set<std::string> members;
        if (g.label.empty()) out.push_back("group " + g.id + ": empty label");
        for (const auto& m : g.member_ids) {
            if (!members.insert(m).second) out.push_back("group " + g.id + ": duplicate member " + m);
            if (!s.annotations.contains(m)) out.push_back("group " + g.id + ": member " + m + " does not resolve");
        }
        for (const auto& p : g.parent_group_ids) {
            const auto* parent = s.groups.find(p);
            if (!parent) {
                out.push_back("group " + g.id + ": parent " + p + " does not resolve");
            } else if (!parent->archived) {
                out.push_back("group " + g.id + ": parent " + p + " is not archived");
            }
        }
    }

    // Lineage must be a DAG: every parent was created before its child.
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < s.groups.size(); ++i) position[s.groups.items()[i].id] = i;
    for (std::size_t i = 0; i < s.groups.size(); ++i) {
        for (const auto& p : s.groups.items()[i].parent_group_ids) {
            auto it = position.find(p);
            if (it != position.end() && it->second >= i) {
                out.push_back("group " + s.groups.items()[i].id + ": lineage cycle through " + p);
            }
        }
    }

    for (const auto& n : s.notes.items()) {
        if (n.text.empty()) out.push_back("note " + n.id + ": empty text");
        for (const auto& id : n.linked_annotation_ids) {
            if (!s.annotations.contains(id)) out.push_back("note " + n.id + ": link " + id + " does not resolve");
        }
        for (const auto& id : n.linked_group_ids) {
            if (!s.groups.contains(id)) out.push_back("note " + n.id + ": link " + id + " does not resolve");
        }
    }

    for (const auto& d : s.documents.items()) {
        bool per_source = d.level == DocumentLevel::per_source_summary;
        if (per_source != d.source_uri.has_value()) {
            out.push_back("document " + d.id + ": source_uri inconsistent with level");
        }
        for (const auto& id : referenced_ids(d.body)) {
            auto kind = s.entity_kind(id);
            if (!kind || *kind == EntityKind::document) {
                out.push_back("document " + d.id + ": reference " + id + " does not resolve");
            } else if (*kind == EntityKind::annotation && per_source &&
                       s.annotations.find(id)->source_uri != d.source_uri) {
                out.push_back("document " + d.id + ": reference " + id + " outside source scope");
            }
        }
    }

    if (rebuild_backlinks(s) != s.backlinks) out.push_back("backlink index: not symmetric with forward links");
    return out;
}

std::vector<std::string> validate_session(const Session& session) {
    const auto& s = session.state();
    auto out = validate_state(s);

    const auto& log = session.events();
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i + 1) {
            out.push_back("event log: sequence gap at position " + std::to_string(i + 1));
            break;
        }
    }
    if (!log.empty() && log.back().seq != s.last_seq) out.push_back("event log: last seq differs from state");

    // Archived groups never change after the merge that archived them.
    std::unordered_set<std::string> archived;
    for (const auto& e : log) {
        auto touch = [&](const std::string& gid) {
            if (archived.count(gid)) {
                out.push_back("group " + gid + ": modified by event " + std::to_string(e.seq) + " after archival");
            }
        };
        if (auto* p = e.as<events::AnnotationAssigned>()) touch(p->group_id);
        if (auto* p = e.as<events::AnnotationRemoved>()) touch(p->group_id);
        if (auto* p = e.as<events::AnnotationTransferred>()) {
            touch(p->from_group_id);
            touch(p->to_group_id);
        }
        if (auto* p = e.as<events::GroupsMerged>()) {
            for (const auto& gid : p->parent_group_ids) {
                touch(gid);
                archived.insert(gid);
            }
        }
    }

    try {
        auto replayed = Session::replay(log);
        if (serialize_state(replayed.state()) != serialize_state(s)) {
            out.push_back("session " + s.id + ": state differs from replay of its event log");
        }
    } catch (const Error& e) {
        out.push_back("session " + s.id + ": event log does not replay: " + e.what());
    }
    return out;
}

}  // namespace synthlab
