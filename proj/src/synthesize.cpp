#include "synthlab/synthesize.hpp"

#include <map>
#include <sstream>

namespace synthlab {

namespace {

const SynthesisDocument& find_document(const SessionState& state, const std::string& id) {
    const auto* d = state.documents.find(id);
    if (!d) throw Error(ErrorCode::UnknownDocument, "unknown document " + id);
    return *d;
}

std::string single_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return text;
}

std::string describe(const Citation& c) {
    std::string out;
    switch (c.kind) {
        case EntityKind::annotation:
            out = "Annotation " + c.entity_id + " by " + c.label + ", quote: ";
            out += c.quote.empty() ? std::string("(none)") : "\"" + single_line(c.quote) + "\"";
            break;
        case EntityKind::group:
            out = "Group " + c.entity_id + " \"" + single_line(c.label) + "\", " + std::to_string(c.member_count) +
                  (c.member_count == 1 ? " member" : " members");
            break;
        case EntityKind::note:
            out = "Note " + c.entity_id + ": " + single_line(c.text);
            break;
        case EntityKind::document:
            break;
    }
    return out;
}

std::string escape_html(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

bool blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

}  // namespace

std::optional<ExportFormat> parse_export_format(std::string_view text) {
    if (text == "markdown" || text == "md") return ExportFormat::markdown;
    if (text == "html") return ExportFormat::html;
    return std::nullopt;
}

SynthesisDocument create_document(Session& session, DocumentLevel level, const std::optional<std::string>& source_uri) {
    const auto& state = session.state();
    if (level == DocumentLevel::per_source_summary) {
        if (!source_uri || source_uri->empty()) {
            throw Error(ErrorCode::MissingSource, "a per-source summary needs a source_uri");
        }
        if (!state.has_source(*source_uri)) {
            throw Error(ErrorCode::UnknownSource, "source " + *source_uri + " is not selected in this session");
        }
    } else if (source_uri) {
        throw Error(ErrorCode::InvalidRequest, "a cross-source synthesis takes no source_uri");
    }
    auto id = next_document_id(state);
    session.append(events::DocumentCreated{id, level, level == DocumentLevel::per_source_summary ? source_uri
                                                                                                  : std::nullopt});
    return *session.state().documents.find(id);
}

SynthesisDocument edit_document(Session& session, const std::string& document_id, const std::string& new_body) {
    const auto& state = session.state();
    const auto& doc = find_document(state, document_id);
    for (const auto& id : referenced_ids(new_body)) {
        auto kind = state.entity_kind(id);
        if (!kind || *kind == EntityKind::document) {
            throw Error(ErrorCode::DanglingReference, id);
        }
        if (*kind == EntityKind::annotation && doc.level == DocumentLevel::per_source_summary) {
            const auto& uri = state.annotations.find(id)->source_uri;
            if (uri != doc.source_uri) {
                throw Error(ErrorCode::ScopeViolation,
                            "annotation " + id + " belongs to " + uri + ", not " + doc.source_uri.value_or(""));
            }
        }
    }
    session.append(events::DocumentEdited{document_id, new_body});
    return *session.state().documents.find(document_id);
}

ExportModel build_export_model(const SessionState& state, const std::string& document_id) {
    const auto& doc = find_document(state, document_id);
    ExportModel model;
    model.document_id = doc.id;
    model.level = doc.level;
    model.source_uri = doc.source_uri;

    std::map<std::string, int> numbers;
    std::size_t cursor = 0;
    for (const auto& token : find_reference_tokens(doc.body)) {
        if (token.offset > cursor) model.segments.push_back({doc.body.substr(cursor, token.offset - cursor), 0});
        cursor = token.offset + token.length;

        auto [it, inserted] = numbers.emplace(token.entity_id, static_cast<int>(numbers.size()) + 1);
        if (inserted) {
            Citation c;
            c.number = it->second;
            c.entity_id = token.entity_id;
            if (const auto* a = state.annotations.find(token.entity_id)) {
                c.kind = EntityKind::annotation;
                c.label = a->author;
                c.quote = a->quote;
            } else if (const auto* g = state.groups.find(token.entity_id)) {
                c.kind = EntityKind::group;
                c.label = g->label;
                c.member_count = g->member_ids.size();
            } else if (const auto* n = state.notes.find(token.entity_id)) {
                c.kind = EntityKind::note;
                c.text = n->text;
            } else {
                throw Error(ErrorCode::DanglingReference, token.entity_id);
            }
            model.citations.push_back(std::move(c));
        }
        model.segments.push_back({{}, it->second});
    }
    if (cursor < doc.body.size()) model.segments.push_back({doc.body.substr(cursor), 0});
    return model;
}

std::string render_markdown(const ExportModel& model) {
    std::ostringstream out;
    for (const auto& s : model.segments) {
        if (s.citation) {
            out << '[' << s.citation << ']';
        } else {
            out << s.text;
        }
    }
    out << "\n\n## References\n";
    if (!model.citations.empty()) out << '\n';
    for (const auto& c : model.citations) out << "- [" << c.number << "] " << describe(c) << '\n';
    return out.str();
}

std::string render_html(const ExportModel& model) {
    std::string inline_body;
    for (const auto& s : model.segments) {
        if (s.citation) {
            auto n = std::to_string(s.citation);
            inline_body += "<a class=\"citation\" href=\"#ref-" + n + "\">[" + n + "]</a>";
        } else {
            inline_body += escape_html(replace_all(s.text, "\r\n", "\n"));
        }
    }

    std::ostringstream out;
    out << "<!DOCTYPE html>\n"
        << "<html lang=\"en\">\n"
        << "<head>\n"
        << "<meta charset=\"utf-8\">\n"
        << "<title>" << escape_html(model.document_id) << "</title>\n"
        << "</head>\n"
        << "<body>\n"
        << "<article id=\"" << escape_html(model.document_id) << "\" class=\"" << to_string(model.level) << "\"";
    if (model.source_uri) out << " data-source=\"" << escape_html(*model.source_uri) << "\"";
    out << ">\n";

    std::size_t start = 0;
    while (start <= inline_body.size()) {
        auto end = inline_body.find("\n\n", start);
        auto para = inline_body.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!blank(para)) {
            while (!para.empty() && para.front() == '\n') para.erase(para.begin());
            while (!para.empty() && para.back() == '\n') para.pop_back();
            out << "<p>" << replace_all(para, "\n", "<br>\n") << "</p>\n";
        }
        if (end == std::string::npos) break;
        start = end + 2;
    }

    out << "</article>\n"
        << "<section class=\"references\">\n"
        << "<h2>References</h2>\n"
        << "<ol>\n";
    for (const auto& c : model.citations) {
        out << "<li id=\"ref-" << c.number << "\" data-kind=\"" << to_string(c.kind) << "\">" << escape_html(describe(c))
            << "</li>\n";
    }
    out << "</ol>\n"
        << "</section>\n"
        << "</body>\n"
        << "</html>\n";
    return out.str();
}

std::string export_document(const SessionState& state, const std::string& document_id, ExportFormat format) {
    auto model = build_export_model(state, document_id);
    return format == ExportFormat::markdown ? render_markdown(model) : render_html(model);
}

}  // namespace synthlab
