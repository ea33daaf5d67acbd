#include "synthlab/distill.hpp"

#include <algorithm>

namespace synthlab {

namespace {

bool contains_ci(const std::string& haystack_lower, const std::string& needle) {
    return haystack_lower.find(to_lower_ascii(needle)) != std::string::npos;
}

bool any_equal_ci(const std::vector<std::string>& values, const std::string& candidate) {
    return std::any_of(values.begin(), values.end(), [&](const std::string& v) { return iequals_ascii(v, candidate); });
}

}  // namespace

FilterQuery normalize_query(const FilterQuery& query) {
    return {dedupe_case_insensitive(query.keywords), dedupe_case_insensitive(query.authors),
            dedupe_case_insensitive(query.tags), query.include_replies};
}

bool matches(const Annotation& a, const FilterQuery& q) {
    if (!q.include_replies && a.is_reply()) return false;

    if (!q.keywords.empty()) {
        auto body = to_lower_ascii(a.body);
        auto quote = to_lower_ascii(a.quote);
        bool hit = std::any_of(q.keywords.begin(), q.keywords.end(), [&](const std::string& k) {
            return contains_ci(body, k) || contains_ci(quote, k);
        });
        if (!hit) return false;
    }
    if (!q.authors.empty() && !any_equal_ci(q.authors, a.author)) return false;
    if (!q.tags.empty()) {
        bool hit = std::any_of(a.tags.begin(), a.tags.end(), [&](const std::string& t) { return any_equal_ci(q.tags, t); });
        if (!hit) return false;
    }
    return true;
}

std::vector<Annotation> apply_filter(const std::vector<Annotation>& annotations, const FilterQuery& query) {
    std::vector<Annotation> out;
    std::copy_if(annotations.begin(), annotations.end(), std::back_inserter(out),
                 [&](const Annotation& a) { return matches(a, query); });
    return out;
}

const EventRecord& record_filter(Session& session, const FilterQuery& query) {
    return session.append(events::FilterApplied{normalize_query(query)});
}

FilterQuery query_from_params(const std::multimap<std::string, std::string>& params) {
    FilterQuery q;
    auto split_into = [](std::vector<std::string>& out, const std::string& value) {
        std::size_t start = 0;
        while (start <= value.size()) {
            auto comma = value.find(',', start);
            auto item = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) out.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    };
    for (const auto& [key, value] : params) {
        if (key == "keywords") {
            split_into(q.keywords, value);
        } else if (key == "authors") {
            split_into(q.authors, value);
        } else if (key == "tags") {
            split_into(q.tags, value);
        } else if (key == "include_replies") {
            if (value == "true" || value == "1" || value.empty()) {
                q.include_replies = true;
            } else if (value == "false" || value == "0") {
                q.include_replies = false;
            } else {
                throw Error(ErrorCode::InvalidRequest, "include_replies must be true or false, got '" + value + "'");
            }
        }
    }
    return normalize_query(q);
}

}  // namespace synthlab
