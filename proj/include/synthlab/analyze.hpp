#pragma once

#include <string>
#include <utility>
#include <vector>

#include "synthlab/session.hpp"

namespace synthlab {

// Analyze workspace. Every mutating call validates against the current state,
// appends exactly one event (or none for a no-op), and returns the result as
// a value copy.

AnnotationGroup create_group(Session& session, const std::string& label, const std::string& description = {});

/// Assigning an existing member is a no-op and appends nothing.
AnnotationGroup assign(Session& session, const std::string& annotation_id, const std::string& group_id);

AnnotationGroup remove(Session& session, const std::string& annotation_id, const std::string& group_id);

/// Moves the annotation atomically. If it already belongs to `to_group`, the
/// net effect is removal from `from_group` only.
std::pair<AnnotationGroup, AnnotationGroup> transfer(Session& session, const std::string& annotation_id,
                                                     const std::string& from_group, const std::string& to_group);

/// Creates a group holding the ordered union of the parents' members and
/// archives the parents.
AnnotationGroup merge(Session& session, const std::vector<std::string>& group_ids, const std::string& new_label,
                      const std::string& description = {});

/// Links may target archived groups.
InTheMomentNote add_note(Session& session, const std::string& text,
                         const std::vector<std::string>& linked_annotation_ids = {},
                         const std::vector<std::string>& linked_group_ids = {});

/// Adds links to an existing note; its text stays unchanged.
InTheMomentNote link_note(Session& session, const std::string& note_id,
                          const std::vector<std::string>& annotation_ids,
                          const std::vector<std::string>& group_ids);

/// Notes and documents referencing the entity, oldest first.
/// Throws Error{UnknownEntity}.
std::vector<Referrer> backlinks(const SessionState& state, const std::string& entity_id);

/// Follows parent_group_ids transitively; returns ancestors breadth-first.
std::vector<std::string> lineage(const SessionState& state, const std::string& group_id);

}  // namespace synthlab
