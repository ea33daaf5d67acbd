#include "synthlab/analyze.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

namespace synthlab {

namespace {

const AnnotationGroup& find_group(const SessionState& state, const std::string& id) {
    const auto* g = state.groups.find(id);
    if (!g) throw Error(ErrorCode::UnknownGroup, "unknown group " + id);
    return *g;
}

const AnnotationGroup& writable_group(const SessionState& state, const std::string& id) {
    const auto& g = find_group(state, id);
    if (g.archived) throw Error(ErrorCode::GroupArchived, "group " + id + " is archived");
    return g;
}

void require_annotation(const SessionState& state, const std::string& id) {
    if (!state.annotations.contains(id)) throw Error(ErrorCode::UnknownAnnotation, "unknown annotation " + id);
}

std::vector<std::string> unique(const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

void require_links(const SessionState& state, const std::vector<std::string>& annotation_ids,
                   const std::vector<std::string>& group_ids) {
    for (const auto& id : annotation_ids) {
        if (!state.annotations.contains(id)) throw Error(ErrorCode::UnknownEntity, "unknown annotation " + id);
    }
    for (const auto& id : group_ids) {
        if (!state.groups.contains(id)) throw Error(ErrorCode::UnknownEntity, "unknown group " + id);
    }
}

}  // namespace

AnnotationGroup create_group(Session& session, const std::string& label, const std::string& description) {
    if (label.empty()) throw Error(ErrorCode::EmptyLabel, "group label must be non-empty");
    auto id = next_group_id(session.state());
    session.append(events::GroupCreated{id, label, description});
    return *session.state().groups.find(id);
}

AnnotationGroup assign(Session& session, const std::string& annotation_id, const std::string& group_id) {
    const auto& state = session.state();
    require_annotation(state, annotation_id);
    const auto& g = writable_group(state, group_id);
    if (g.has_member(annotation_id)) return g;
    session.append(events::AnnotationAssigned{annotation_id, group_id});
    return *session.state().groups.find(group_id);
}

AnnotationGroup remove(Session& session, const std::string& annotation_id, const std::string& group_id) {
    const auto& g = writable_group(session.state(), group_id);
    if (!g.has_member(annotation_id)) {
        throw Error(ErrorCode::NotAMember, annotation_id + " is not a member of " + group_id);
    }
    session.append(events::AnnotationRemoved{annotation_id, group_id});
    return *session.state().groups.find(group_id);
}

std::pair<AnnotationGroup, AnnotationGroup> transfer(Session& session, const std::string& annotation_id,
                                                     const std::string& from_group, const std::string& to_group) {
    if (from_group == to_group) throw Error(ErrorCode::SameGroup, "cannot transfer within " + from_group);
    const auto& state = session.state();
    const auto& from = writable_group(state, from_group);
    writable_group(state, to_group);
    if (!from.has_member(annotation_id)) {
        throw Error(ErrorCode::NotAMember, annotation_id + " is not a member of " + from_group);
    }
    session.append(events::AnnotationTransferred{annotation_id, from_group, to_group});
    const auto& after = session.state();
    return {*after.groups.find(from_group), *after.groups.find(to_group)};
}

AnnotationGroup merge(Session& session, const std::vector<std::string>& group_ids, const std::string& new_label,
                      const std::string& description) {
    if (group_ids.size() < 2) throw Error(ErrorCode::NeedTwoGroups, "merge needs at least two groups");
    if (std::set<std::string>(group_ids.begin(), group_ids.end()).size() != group_ids.size()) {
        throw Error(ErrorCode::DuplicateGroup, "merge lists a group more than once");
    }
    for (const auto& id : group_ids) writable_group(session.state(), id);
    if (new_label.empty()) throw Error(ErrorCode::EmptyLabel, "group label must be non-empty");
    auto id = next_group_id(session.state());
    session.append(events::GroupsMerged{id, new_label, description, group_ids});
    return *session.state().groups.find(id);
}

InTheMomentNote add_note(Session& session, const std::string& text,
                         const std::vector<std::string>& linked_annotation_ids,
                         const std::vector<std::string>& linked_group_ids) {
    if (text.empty()) throw Error(ErrorCode::EmptyNote, "note text must be non-empty");
    auto annotations = unique(linked_annotation_ids);
    auto groups = unique(linked_group_ids);
    require_links(session.state(), annotations, groups);
    auto id = next_note_id(session.state());
    session.append(events::NoteCreated{id, text, std::move(annotations), std::move(groups)});
    return *session.state().notes.find(id);
}

InTheMomentNote link_note(Session& session, const std::string& note_id, const std::vector<std::string>& annotation_ids,
                          const std::vector<std::string>& group_ids) {
    const auto* note = session.state().notes.find(note_id);
    if (!note) throw Error(ErrorCode::UnknownEntity, "unknown note " + note_id);
    auto annotations = unique(annotation_ids);
    auto groups = unique(group_ids);
    require_links(session.state(), annotations, groups);
    auto already = [](const std::vector<std::string>& have, const std::vector<std::string>& want) {
        return std::all_of(want.begin(), want.end(),
                           [&](const auto& id) { return std::find(have.begin(), have.end(), id) != have.end(); });
    };
    if (already(note->linked_annotation_ids, annotations) && already(note->linked_group_ids, groups)) return *note;
    session.append(events::NoteLinked{note_id, std::move(annotations), std::move(groups)});
    return *session.state().notes.find(note_id);
}

std::vector<Referrer> backlinks(const SessionState& state, const std::string& entity_id) {
    if (!state.entity_kind(entity_id)) throw Error(ErrorCode::UnknownEntity, "unknown entity " + entity_id);
    return state.backlinks.referrers(entity_id);
}

std::vector<std::string> lineage(const SessionState& state, const std::string& group_id) {
    find_group(state, group_id);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen{group_id};
    std::deque<std::string> queue{group_id};
    while (!queue.empty()) {
        const auto& g = find_group(state, queue.front());
        queue.pop_front();
        for (const auto& parent : g.parent_group_ids) {
            if (seen.insert(parent).second) {
                out.push_back(parent);
                queue.push_back(parent);
            }
        }
    }
    return out;
}

}  // namespace synthlab
