#pragma once

#include <map>
#include <string>
#include <vector>

#include "synthlab/domain.hpp"
#include "synthlab/session.hpp"

namespace synthlab {

/// Case-insensitive de-duplication of every list; first spelling wins.
FilterQuery normalize_query(const FilterQuery& query);

bool matches(const Annotation& annotation, const FilterQuery& query);

/// Annotations passing the query, in input order. Never mutates anything.
std::vector<Annotation> apply_filter(const std::vector<Annotation>& annotations, const FilterQuery& query);

/// Appends a filter_applied event carrying the normalized query.
const EventRecord& record_filter(Session& session, const FilterQuery& query);

/// Builds a query from URL parameters. Each of keywords/authors/tags may be
/// repeated and each value may hold a comma-separated list; include_replies
/// accepts true/false/1/0. Throws Error{InvalidRequest}.
FilterQuery query_from_params(const std::multimap<std::string, std::string>& params);

}  // namespace synthlab
