#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include "builders.hpp"
#include "fixture_server.hpp"
#include "synthlab/error.hpp"
#include "synthlab/ingest.hpp"

using namespace synthlab;
using namespace synthlab::testing;
namespace fs = std::filesystem;

namespace {

const std::string kWireUri = "https://example.edu/readings/canned.html";

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidRequest;
}

IngestConfig config_for(const FixtureServer& server, int page_size = 100) {
    IngestConfig config;
    config.api_base_url = server.base_url();
    config.page_size = page_size;
    config.timeout = std::chrono::seconds(5);
    config.backoff_base = std::chrono::milliseconds(1);
    return config;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    auto path = fs::temp_directory_path() / ("synthlab-ingest-" + name);
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

}  // namespace

TEST_SUITE("ingest") {
    TEST_CASE("account-style user and no selectors") {
        nlohmann::json record = {{"id", "h1"},
                                 {"user", "acct:jdoe@hypothes.is"},
                                 {"uri", "https://example.org/a"},
                                 {"created", "2023-02-06T14:02:11.120000+00:00"}};
        auto a = parse_annotation(wire_from_json(record));
        CHECK(a.author == "jdoe");
        CHECK(a.quote == "");
        CHECK(a.source_uri == "https://example.org/a");
        CHECK(a.updated_at == a.created_at);
    }

    TEST_CASE("duplicate tags keep first casing") {
        nlohmann::json record = {{"id", "h1"}, {"uri", "u"}, {"tags", {"method", "Method"}}};
        CHECK(parse_annotation(wire_from_json(record)).tags == std::vector<std::string>{"method"});
    }

    TEST_CASE("missing uri is a schema error") {
        nlohmann::json record = {{"id", "h1"}, {"user", "acct:jdoe@hypothes.is"}};
        CHECK(code_of([&] { parse_annotation(wire_from_json(record)); }) == ErrorCode::SchemaError);
    }

    TEST_CASE("wrongly typed fields are schema errors naming the record") {
        nlohmann::json record = {{"id", "h7"}, {"uri", "u"}, {"tags", "not-a-list"}};
        try {
            wire_from_json(record);
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaError);
            CHECK(std::string(e.what()).find("h7") != std::string::npos);
        }
    }

    TEST_CASE("title and quote extraction") {
        nlohmann::json record = {
            {"id", "h1"},
            {"uri", "u"},
            {"document", {{"title", {"First", "Second"}}}},
            {"target",
             {{{"selector",
                {{{"type", "RangeSelector"}}, {{"type", "TextQuoteSelector"}, {"exact", "the quote"}}}}}}}};
        auto a = parse_annotation(wire_from_json(record));
        CHECK(a.source_title == "First");
        CHECK(a.quote == "the quote");
    }

    TEST_CASE("username normalization") {
        CHECK(normalize_username("acct:jdoe@hypothes.is") == "jdoe");
        CHECK(normalize_username("jdoe") == "jdoe");
        CHECK(normalize_username("") == "");
    }

    TEST_CASE("empty array fixture") {
        auto path = temp_file("empty.json", "[]");
        CHECK(load_fixture(path).empty());
        fs::remove(path);
    }

    TEST_CASE("sample corpus") {
        auto anns = load_fixture(fs::path(SYNTHLAB_SOURCE_DIR) / "data" / "sample_annotations.json");
        CHECK(anns.size() == 12);
        CHECK(std::count_if(anns.begin(), anns.end(), [](const Annotation& a) { return a.is_reply(); }) == 3);
        CHECK(std::is_sorted(anns.begin(), anns.end(),
                             [](const Annotation& x, const Annotation& y) { return x.created_at < y.created_at; }));
        auto s = make_session(anns);
        CHECK(validate_session(s).empty());
    }

    TEST_CASE("malformed record names its index") {
        nlohmann::json records = nlohmann::json::array();
        for (int i = 0; i < 6; ++i) {
            records.push_back({{"id", "h" + std::to_string(i)}, {"uri", "u"}});
        }
        records[4].erase("uri");
        auto path = temp_file("bad.json", records.dump());
        try {
            load_fixture(path);
            FAIL("expected SchemaError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaError);
            CHECK(std::string(e.what()).find("index 4") != std::string::npos);
        }
        fs::remove(path);
    }

    TEST_CASE("unreadable and non-json fixtures") {
        CHECK(code_of([] { load_fixture("/nonexistent/fixture.json"); }) == ErrorCode::FileError);
        auto path = temp_file("garbage.json", "{not json");
        CHECK(code_of([&] { load_fixture(path); }) == ErrorCode::SchemaError);
        fs::remove(path);
    }

    TEST_CASE("page size bounds") {
        IngestConfig config;
        config.page_size = 0;
        CHECK(code_of([&] { config.validate(); }) == ErrorCode::ConfigError);
        config.page_size = 201;
        CHECK(code_of([&] { config.validate(); }) == ErrorCode::ConfigError);
        config.page_size = 200;
        CHECK_NOTHROW(config.validate());
    }

    TEST_CASE("fixture server with no annotations on the uri") {
        FixtureServer server(make_wire_records(5, "https://elsewhere.example/"));
        CHECK(fetch_annotations(config_for(server), kWireUri).empty());
        CHECK(server.search_requests() == 1);
    }

    TEST_CASE("250 records over pages of 100") {
        FixtureServer server(make_wire_records(250, kWireUri));
        auto anns = fetch_annotations(config_for(server), kWireUri);
        std::set<std::string> ids;
        for (const auto& a : anns) ids.insert(a.id);
        CHECK(anns.size() == 250);
        CHECK(ids.size() == 250);
        CHECK(server.search_requests() == 3);
    }

    TEST_CASE("rejected token is an auth error") {
        FixtureServer server(make_wire_records(3, kWireUri), {.required_token = "secret"});
        auto config = config_for(server);
        config.api_token = "wrong";
        CHECK(code_of([&] { fetch_annotations(config, kWireUri); }) == ErrorCode::AuthError);
        config.api_token = "secret";
        CHECK(fetch_annotations(config, kWireUri).size() == 3);
    }

    TEST_CASE("transient failures are retried") {
        FixtureServer server(make_wire_records(3, kWireUri), {.fail_first = 2});
        CHECK(fetch_annotations(config_for(server), kWireUri).size() == 3);
        CHECK(server.search_requests() == 3);
    }

    TEST_CASE("retries are bounded") {
        FixtureServer server(make_wire_records(3, kWireUri), {.fail_first = 100});
        auto config = config_for(server);
        config.max_retries = 2;
        CHECK(code_of([&] { fetch_annotations(config, kWireUri); }) == ErrorCode::TransportError);
        CHECK(server.search_requests() == 3);
    }

    TEST_CASE("unreachable upstream is a transport error") {
        IngestConfig config;
        config.api_base_url = "http://127.0.0.1:1/api";
        config.max_retries = 1;
        config.timeout = std::chrono::seconds(1);
        config.backoff_base = std::chrono::milliseconds(1);
        CHECK(code_of([&] { fetch_annotations(config, kWireUri); }) == ErrorCode::TransportError);
    }

    TEST_CASE("pagination yields every record for any page size and order") {
        for (std::size_t n : {0u, 1u, 7u, 99u, 100u, 101u, 250u}) {
            for (int page : {1, 3, 50, 100, 200}) {
                if (n > 120 && page < 3) continue;
                for (bool shuffle : {false, true}) {
                    CAPTURE(n);
                    CAPTURE(page);
                    CAPTURE(shuffle);
                    FixtureServer server(make_wire_records(n, kWireUri), {.shuffle_rows = shuffle});
                    auto anns = fetch_annotations(config_for(server, page), kWireUri);
                    std::set<std::string> ids;
                    for (const auto& a : anns) ids.insert(a.id);
                    CHECK(anns.size() == n);
                    CHECK(ids.size() == n);
                    CHECK(std::is_sorted(anns.begin(), anns.end(), [](const Annotation& x, const Annotation& y) {
                        return x.created_at < y.created_at;
                    }));
                }
            }
        }
    }

    TEST_CASE("re-ingest adds nothing and still records an event") {
        FixtureServer server(make_wire_records(30, kWireUri));
        auto s = Session::create("ses-000001", "jdoe", {kWireUri}, stepping_clock(test_epoch()));
        auto first = ingest_annotations(s, "api", fetch_annotations(config_for(server), kWireUri));
        CHECK(first.received == 30);
        CHECK(first.added == 30);
        auto before = s.state().annotations;
        auto second = ingest_annotations(s, "api", fetch_annotations(config_for(server), kWireUri));
        CHECK(second.received == 30);
        CHECK(second.added == 0);
        CHECK(s.state().annotations == before);
        CHECK(s.events().back().kind() == EventKind::annotations_ingested);
        CHECK(validate_session(s).empty());
    }

    TEST_CASE("ingest records each annotation's source") {
        auto s = Session::create("ses-000001", "jdoe", {}, stepping_clock(test_epoch()));
        ingest_annotations(s, "test", {make_annotation("X1", kUriB)});
        CHECK(s.state().has_source(kUriB));
    }
}
