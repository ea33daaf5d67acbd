#include "synthlab/analytics.hpp"

namespace synthlab {

namespace {

void require_gapless(const std::vector<EventRecord>& log) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i + 1) {
            throw Error(ErrorCode::MalformedLog, "sequence gap: expected " + std::to_string(i + 1) + ", found " +
                                                     std::to_string(log[i].seq));
        }
    }
}

}  // namespace

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::deductive: return "deductive";
        case Strategy::inductive: return "inductive";
        case Strategy::mixed: return "mixed";
        case Strategy::insufficient_data: return "insufficient_data";
    }
    return "";
}

void StrategyThresholds::validate() const {
    if (!(0.0 <= inductive && inductive <= deductive && deductive <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "strategy thresholds must satisfy 0 <= inductive <= deductive <= 1");
    }
}

StrategyReport analyze_log(const std::vector<EventRecord>& log, const StrategyThresholds& thresholds) {
    require_gapless(log);

    StrategyReport report;
    auto& c = report.counts;
    std::size_t groups_before_first_assignment = 0;
    std::size_t alternations = 0;
    std::optional<EventKind> previous;  // last group_created / annotation_assigned seen

    for (const auto& event : log) {
        auto kind = event.kind();
        switch (kind) {
            case EventKind::group_created:
                ++c.groups_created;
                if (c.assignments == 0) ++groups_before_first_assignment;
                break;
            case EventKind::annotation_assigned: ++c.assignments; break;
            case EventKind::annotation_transferred: ++c.transfers; break;
            case EventKind::groups_merged: ++c.merges; break;
            case EventKind::note_created: ++c.notes; break;
            case EventKind::filter_applied: ++c.filters; break;
            case EventKind::document_edited: ++c.document_edits; break;
            default: break;
        }
        if (kind == EventKind::group_created || kind == EventKind::annotation_assigned) {
            if (previous && *previous != kind) ++alternations;
            previous = kind;
        }
    }

    if (c.groups_created > 0) {
        report.deductive_fraction =
            static_cast<double>(groups_before_first_assignment) / static_cast<double>(c.groups_created);
    }
    std::size_t steps = c.groups_created + c.assignments;
    report.interleaving_score = steps > 1 ? static_cast<double>(alternations) / static_cast<double>(steps - 1) : 0.0;

    if (c.groups_created == 0 || c.assignments == 0) {
        report.classification = Strategy::insufficient_data;
    } else if (*report.deductive_fraction >= thresholds.deductive) {
        report.classification = Strategy::deductive;
    } else if (*report.deductive_fraction <= thresholds.inductive) {
        report.classification = Strategy::inductive;
    } else {
        report.classification = Strategy::mixed;
    }
    return report;
}

IterationMetrics iteration_metrics(const std::vector<EventRecord>& log) {
    require_gapless(log);
    IterationMetrics m;
    bool edited = false;
    for (const auto& event : log) {
        if (!edited) {
            edited = event.kind() == EventKind::document_edited;
            continue;
        }
        switch (event.kind()) {
            case EventKind::annotation_transferred: ++m.transfers_after_first_edit; break;
            case EventKind::filter_applied: ++m.filters_after_first_edit; break;
            case EventKind::groups_merged: ++m.merges_after_first_edit; break;
            default: break;
        }
    }
    return m;
}

Json to_json(const StrategyReport& r) {
    const auto& c = r.counts;
    return Json{{"classification", to_string(r.classification)},
                {"deductive_fraction", r.deductive_fraction ? Json(*r.deductive_fraction) : Json(nullptr)},
                {"counts",
                 {{"groups_created", c.groups_created},
                  {"assignments", c.assignments},
                  {"transfers", c.transfers},
                  {"merges", c.merges},
                  {"notes", c.notes},
                  {"filters", c.filters},
                  {"document_edits", c.document_edits}}},
                {"interleaving_score", r.interleaving_score}};
}

Json to_json(const IterationMetrics& m) {
    return Json{{"transfers_after_first_edit", m.transfers_after_first_edit},
                {"filters_after_first_edit", m.filters_after_first_edit},
                {"merges_after_first_edit", m.merges_after_first_edit}};
}

}  // namespace synthlab
