#pragma once

// Fixed end-to-end workflow over the sample corpus, shared by the HTTP
// acceptance run and the in-process export test so both must agree with the
// same goldens.

#include <filesystem>
#include <string>
#include <vector>

namespace synthlab::testing {
class TestClient;
}

namespace synthlab::testing::scenario {

inline constexpr const char* kOwner = "jdoe";
inline constexpr const char* kUriA = "https://example.edu/readings/knowledge-building.html";
inline constexpr const char* kUriB = "https://example.edu/readings/social-annotation.html";

inline constexpr const char* kFilterTag = "methodology";

inline constexpr const char* kMethodLabel = "methodology";
inline constexpr const char* kMethodDescription = "How ideas are studied and improved";
inline constexpr const char* kApplicationsLabel = "applications";
inline constexpr const char* kAssessmentLabel = "assessment";
inline constexpr const char* kMergedLabel = "knowledge building in practice";

inline constexpr const char* kNoteText = "Methods and applications kept overlapping, so I merged them.";

inline constexpr const char* kSummaryBody =
    "Knowledge building centres on rise above ((ref:hyp-a01)). Assessment stays open ((ref:hyp-a04)).";

inline constexpr const char* kSynthesisBody =
    "# Knowledge building meets social annotation\n"
    "\n"
    "Both readings treat ideas as improvable objects ((ref:grp-000004)). Rise above ((ref:hyp-a01)) "
    "connects to visible, shared reading ((ref:hyp-b01)).\n"
    "\n"
    "Assessment remains the open question ((ref:grp-000003)); see my note ((ref:note-000001)) and the "
    "original quote ((ref:hyp-a01)).\n"
    "Page notes like ((ref:hyp-a07)) matter too & <deserve> \"credit\".";

inline std::filesystem::path sample_corpus() {
    return std::filesystem::path(SYNTHLAB_SOURCE_DIR) / "data" / "sample_annotations.json";
}

inline std::filesystem::path golden(const std::string& name) {
    return std::filesystem::path(SYNTHLAB_SOURCE_DIR) / "tests" / "golden" / name;
}

struct HttpRun {
    /// One entry per step that did not answer with its expected status.
    std::vector<std::string> failures;
    int steps = 0;
    std::string session_id;
    std::string markdown;
    std::string html;
};

/// Drives the workflow through the HTTP API and exports the synthesis.
HttpRun run_over_http(TestClient& client);

}  // namespace synthlab::testing::scenario
