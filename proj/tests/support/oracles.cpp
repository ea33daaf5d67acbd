#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <tuple>

namespace synthlab::testing {

namespace {

std::string lower(const std::string& s) {
    std::string out;
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

bool contains(const std::string& haystack, const std::string& needle) {
    std::string h = lower(haystack), n = lower(needle);
    if (n.size() > h.size()) return false;
    for (std::size_t i = 0; i + n.size() <= h.size(); ++i) {
        if (h.compare(i, n.size(), n) == 0) return true;
    }
    return false;
}

const std::vector<std::string> kAuthors = {"alice", "Bob", "chen", "dpatel", "Eve"};
const std::vector<std::string> kTags = {"methodology", "Methodology", "applications", "theory", "assessment", "Theory"};
const std::vector<std::string> kWords = {"synthesis", "Rise", "above", "idea", "annotation", "group",
                                         "METHOD",    "apply", "note",  "frame", "build"};

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& values) {
    return values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
}

std::string words(std::mt19937_64& rng, int max_words) {
    int n = std::uniform_int_distribution<int>(0, max_words)(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += pick(rng, kWords);
    }
    return out;
}

}  // namespace

bool oracle_filter_match(const Annotation& a, const FilterQuery& q) {
    if (!q.include_replies && !a.reply_to.empty()) return false;

    bool keyword_clause = q.keywords.empty();
    for (const auto& k : q.keywords) {
        if (contains(a.body, k) || contains(a.quote, k)) keyword_clause = true;
    }

    bool author_clause = q.authors.empty();
    for (const auto& name : q.authors) {
        if (lower(name) == lower(a.author)) author_clause = true;
    }

    bool tag_clause = q.tags.empty();
    for (const auto& qt : q.tags) {
        for (const auto& at : a.tags) {
            if (lower(qt) == lower(at)) tag_clause = true;
        }
    }
    return keyword_clause && author_clause && tag_clause;
}

std::vector<std::string> oracle_backlink_ids(const SessionState& state, const std::string& entity_id) {
    struct Hit {
        Timestamp at;
        std::uint64_t seq;
        std::string id;
    };
    std::vector<Hit> hits;
    for (const auto& n : state.notes.items()) {
        bool linked = std::count(n.linked_annotation_ids.begin(), n.linked_annotation_ids.end(), entity_id) +
                          std::count(n.linked_group_ids.begin(), n.linked_group_ids.end(), entity_id) >
                      0;
        if (linked) hits.push_back({n.created_at, n.created_seq, n.id});
    }
    static const std::regex token(R"(\(\(ref:([^()\s]+)\)\))");
    for (const auto& d : state.documents.items()) {
        bool cited = false;
        for (auto it = std::sregex_iterator(d.body.begin(), d.body.end(), token); it != std::sregex_iterator(); ++it) {
            if ((*it)[1].str() == entity_id) cited = true;
        }
        if (cited) hits.push_back({d.created_at, d.created_seq, d.id});
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& x, const Hit& y) { return std::tie(x.at, x.seq) < std::tie(y.at, y.seq); });
    std::vector<std::string> ids;
    for (const auto& h : hits) ids.push_back(h.id);
    return ids;
}

IterationMetrics oracle_iteration_metrics(const std::vector<EventRecord>& log) {
    std::size_t first_edit = log.size();
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].kind() == EventKind::document_edited) {
            first_edit = i;
            break;
        }
    }
    IterationMetrics m;
    for (std::size_t i = first_edit + 1; i < log.size(); ++i) {
        auto k = log[i].kind();
        m.transfers_after_first_edit += k == EventKind::annotation_transferred;
        m.filters_after_first_edit += k == EventKind::filter_applied;
        m.merges_after_first_edit += k == EventKind::groups_merged;
    }
    return m;
}

Annotation random_annotation(std::mt19937_64& rng, std::size_t index, const std::vector<std::string>& earlier_ids) {
    Annotation a;
    a.id = "syn-" + std::to_string(index);
    a.source_uri = std::bernoulli_distribution(0.7)(rng) ? "https://example.org/a" : "https://example.org/b";
    a.source_title = "Synthetic";
    a.author = pick(rng, kAuthors);
    a.body = words(rng, 6);
    a.quote = words(rng, 3);
    int tag_count = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < tag_count; ++i) a.tags.push_back(pick(rng, kTags));
    a.tags = dedupe_case_insensitive(a.tags);
    a.created_at = test_epoch() + std::chrono::seconds(static_cast<long>(index));
    a.updated_at = a.created_at;
    if (!earlier_ids.empty() && std::bernoulli_distribution(0.25)(rng)) a.reply_to.push_back(pick(rng, earlier_ids));
    return a;
}

FilterQuery random_query(std::mt19937_64& rng) {
    FilterQuery q;
    auto fill = [&](std::vector<std::string>& out, const std::vector<std::string>& vocab, double p_empty) {
        if (std::bernoulli_distribution(p_empty)(rng)) return;
        int n = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < n; ++i) {
            auto v = pick(rng, vocab);
            if (std::bernoulli_distribution(0.3)(rng)) v = lower(v);
            if (std::bernoulli_distribution(0.2)(rng) && v.size() > 3) v = v.substr(1, v.size() - 2);
            out.push_back(v);
        }
    };
    fill(q.keywords, kWords, 0.4);
    fill(q.authors, kAuthors, 0.6);
    fill(q.tags, kTags, 0.5);
    q.include_replies = std::bernoulli_distribution(0.7)(rng);
    return q;
}

Timestamp test_epoch() {
    return parse_timestamp("2023-03-01T09:00:00Z");
}

}  // namespace synthlab::testing
