#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "synthlab/domain.hpp"

namespace synthlab {

enum class Strategy { deductive, inductive, mixed, insufficient_data };

std::string_view to_string(Strategy strategy);

/// Cut-offs on the deductive fraction. Defaults: >= 0.8 deductive, <= 0.2 inductive.
struct StrategyThresholds {
    double deductive = 0.8;
    double inductive = 0.2;

    /// Throws Error{ConfigError} unless 0 <= inductive <= deductive <= 1.
    void validate() const;
};

struct ProcessCounts {
    std::size_t groups_created = 0;
    std::size_t assignments = 0;
    std::size_t transfers = 0;
    std::size_t merges = 0;
    std::size_t notes = 0;
    std::size_t filters = 0;
    std::size_t document_edits = 0;

    bool operator==(const ProcessCounts&) const = default;
};

struct StrategyReport {
    Strategy classification = Strategy::insufficient_data;
    /// Share of group_created events that precede the first assignment.
    /// Absent when no group was created.
    std::optional<double> deductive_fraction;
    ProcessCounts counts;
    double interleaving_score = 0.0;

    bool operator==(const StrategyReport&) const = default;
};

struct IterationMetrics {
    std::size_t transfers_after_first_edit = 0;
    std::size_t filters_after_first_edit = 0;
    std::size_t merges_after_first_edit = 0;

    bool operator==(const IterationMetrics&) const = default;
};

/// Throws Error{MalformedLog} on a sequence gap.
StrategyReport analyze_log(const std::vector<EventRecord>& log, const StrategyThresholds& thresholds = {});

/// Mutations after the first document_edited event. Throws Error{MalformedLog}.
IterationMetrics iteration_metrics(const std::vector<EventRecord>& log);

Json to_json(const StrategyReport& report);
Json to_json(const IterationMetrics& metrics);

}  // namespace synthlab
