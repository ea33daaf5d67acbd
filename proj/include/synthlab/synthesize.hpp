#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synthlab/session.hpp"

namespace synthlab {

enum class ExportFormat { markdown, html };

std::optional<ExportFormat> parse_export_format(std::string_view text);

SynthesisDocument create_document(Session& session, DocumentLevel level,
                                  const std::optional<std::string>& source_uri = std::nullopt);

/// Replaces the whole body. Every ((ref:ID)) token must name an annotation,
/// group or note; per-source summaries may cite only annotations from their
/// own source.
SynthesisDocument edit_document(Session& session, const std::string& document_id, const std::string& new_body);

/// One entry of the provenance appendix.
struct Citation {
    int number = 0;
    EntityKind kind = EntityKind::annotation;
    std::string entity_id;
    /// Author for annotations, label for groups, empty for notes.
    std::string label;
    std::string quote;
    std::size_t member_count = 0;
    std::string text;
};

/// Body text split at reference tokens. A segment is either literal text or
/// a citation number (text empty).
struct BodySegment {
    std::string text;
    int citation = 0;
};

/// Format-independent export model: both renderers consume this.
struct ExportModel {
    std::string document_id;
    DocumentLevel level = DocumentLevel::cross_source_synthesis;
    std::optional<std::string> source_uri;
    std::vector<BodySegment> segments;
    std::vector<Citation> citations;
};

/// Numbers citations by first appearance; repeated references share a number.
ExportModel build_export_model(const SessionState& state, const std::string& document_id);

std::string render_markdown(const ExportModel& model);
std::string render_html(const ExportModel& model);

std::string export_document(const SessionState& state, const std::string& document_id, ExportFormat format);

}  // namespace synthlab
