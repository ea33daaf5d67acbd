#include "doctest.h"

#include <random>

#include "builders.hpp"
#include "random_ops.hpp"
#include "synthlab/analyze.hpp"
#include "synthlab/error.hpp"
#include "synthlab/synthesize.hpp"

using namespace synthlab;
using namespace synthlab::testing;

namespace {

using Ids = std::vector<std::string>;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidRequest;
}

Ids members(const Session& s, const std::string& gid) { return s.state().groups.find(gid)->member_ids; }

Ids referrer_ids(const std::vector<Referrer>& refs) {
    Ids out;
    for (const auto& r : refs) out.push_back(r.id);
    return out;
}

}  // namespace

TEST_SUITE("analyze") {
    TEST_CASE("create group") {
        auto s = make_session();
        auto g = create_group(s, "methodology");
        CHECK(g.label == "methodology");
        CHECK(g.member_ids.empty());
        CHECK_FALSE(g.archived);
        CHECK(code_of([&] { create_group(s, ""); }) == ErrorCode::EmptyLabel);
        auto twin = create_group(s, "methodology");
        CHECK(twin.id != g.id);
        CHECK(s.state().groups.size() == 2);
    }

    TEST_CASE("assign") {
        auto s = make_session(numbered_annotations(3));
        auto g = create_group(s, "G1");
        CHECK(assign(s, "A1", g.id).member_ids == Ids{"A1"});
        auto count = s.events().size();
        CHECK(assign(s, "A1", g.id).member_ids == Ids{"A1"});
        CHECK(s.events().size() == count);
        CHECK(code_of([&] { assign(s, "A9", g.id); }) == ErrorCode::UnknownAnnotation);
        CHECK(code_of([&] { assign(s, "A1", "grp-000404"); }) == ErrorCode::UnknownGroup);
    }

    TEST_CASE("assign to an archived parent") {
        auto s = make_session(numbered_annotations(3));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        merge(s, {g1.id, g2.id}, "G12");
        CHECK(code_of([&] { assign(s, "A1", g1.id); }) == ErrorCode::GroupArchived);
    }

    TEST_CASE("remove") {
        auto s = make_session(numbered_annotations(1));
        auto g = create_group(s, "G1");
        assign(s, "A1", g.id);
        CHECK(remove(s, "A1", g.id).member_ids.empty());
        CHECK(code_of([&] { remove(s, "A1", g.id); }) == ErrorCode::NotAMember);
    }

    TEST_CASE("remove then re-assign") {
        auto s = make_session(numbered_annotations(1));
        auto g = create_group(s, "G1");
        auto base = s.events().size();
        assign(s, "A1", g.id);
        remove(s, "A1", g.id);
        assign(s, "A1", g.id);
        CHECK(s.events().size() - base == 3);
        auto replayed = Session::replay(s.events());
        CHECK(replayed.state().groups.find(g.id)->member_ids == Ids{"A1"});
    }

    TEST_CASE("transfer") {
        auto s = make_session(numbered_annotations(2));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        assign(s, "A1", g1.id);
        auto [from, to] = transfer(s, "A1", g1.id, g2.id);
        CHECK(from.member_ids.empty());
        CHECK(to.member_ids == Ids{"A1"});
        CHECK(code_of([&] { transfer(s, "A1", g2.id, g2.id); }) == ErrorCode::SameGroup);
        CHECK(code_of([&] { transfer(s, "A2", g2.id, g1.id); }) == ErrorCode::NotAMember);
    }

    TEST_CASE("transfer into a group that already holds the annotation") {
        auto s = make_session(numbered_annotations(2));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        assign(s, "A1", g1.id);
        assign(s, "A2", g2.id);
        assign(s, "A1", g2.id);
        transfer(s, "A1", g1.id, g2.id);
        CHECK(members(s, g1.id).empty());
        CHECK(members(s, g2.id) == Ids{"A2", "A1"});
    }

    TEST_CASE("transfer out of or into an archived group") {
        auto s = make_session(numbered_annotations(2));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        auto g3 = create_group(s, "G3");
        assign(s, "A1", g1.id);
        merge(s, {g1.id, g2.id}, "G12");
        CHECK(code_of([&] { transfer(s, "A1", g1.id, g3.id); }) == ErrorCode::GroupArchived);
        assign(s, "A2", g3.id);
        CHECK(code_of([&] { transfer(s, "A2", g3.id, g2.id); }) == ErrorCode::GroupArchived);
    }

    TEST_CASE("merge is an ordered union") {
        auto s = make_session(numbered_annotations(3));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        assign(s, "A1", g1.id);
        assign(s, "A2", g1.id);
        assign(s, "A2", g2.id);
        assign(s, "A3", g2.id);
        auto m = merge(s, {g1.id, g2.id}, "G12");
        CHECK(m.member_ids == Ids{"A1", "A2", "A3"});
        CHECK(m.parent_group_ids == Ids{g1.id, g2.id});
        CHECK(s.state().groups.find(g1.id)->archived);
        CHECK(s.state().groups.find(g2.id)->archived);
        CHECK(members(s, g1.id) == Ids{"A1", "A2"});
    }

    TEST_CASE("merge of two empty groups") {
        auto s = make_session();
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        auto m = merge(s, {g1.id, g2.id}, "empty");
        CHECK(m.member_ids.empty());
        CHECK(s.state().groups.find(g1.id)->archived);
        CHECK(s.state().groups.find(g2.id)->archived);
    }

    TEST_CASE("merge preconditions") {
        auto s = make_session();
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        CHECK(code_of([&] { merge(s, {g1.id}, "x"); }) == ErrorCode::NeedTwoGroups);
        CHECK(code_of([&] { merge(s, {g1.id, g1.id}, "x"); }) == ErrorCode::DuplicateGroup);
        CHECK(code_of([&] { merge(s, {g1.id, "grp-000404"}, "x"); }) == ErrorCode::UnknownGroup);
        CHECK(code_of([&] { merge(s, {g1.id, g2.id}, ""); }) == ErrorCode::EmptyLabel);
        merge(s, {g1.id, g2.id}, "G12");
        auto g3 = create_group(s, "G3");
        CHECK(code_of([&] { merge(s, {g1.id, g3.id}, "x"); }) == ErrorCode::GroupArchived);
    }

    TEST_CASE("merge of a merge has depth-two lineage that survives replay") {
        auto s = make_session(numbered_annotations(3));
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        auto g3 = create_group(s, "G3");
        auto m1 = merge(s, {g1.id, g2.id}, "G12");
        auto m2 = merge(s, {m1.id, g3.id}, "G123");
        auto expected = Ids{m1.id, g3.id, g1.id, g2.id};
        CHECK(lineage(s.state(), m2.id) == expected);
        auto replayed = Session::replay(s.events());
        CHECK(lineage(replayed.state(), m2.id) == expected);
        CHECK(replayed.state().groups == s.state().groups);
        CHECK(lineage(s.state(), g1.id).empty());
    }

    TEST_CASE("notes and backlinks") {
        auto s = make_session(numbered_annotations(2));
        auto n = add_note(s, "thought", {"A1"});
        CHECK(referrer_ids(backlinks(s.state(), "A1")) == Ids{n.id});
        auto lonely = add_note(s, "unlinked");
        CHECK(lonely.linked_annotation_ids.empty());
        for (const auto& [entity, refs] : s.state().backlinks.entries()) {
            for (const auto& r : refs) CHECK(r.id != lonely.id);
        }
        CHECK(backlinks(s.state(), "A2").empty());
        CHECK(code_of([&] { backlinks(s.state(), "nope"); }) == ErrorCode::UnknownEntity);
        CHECK(code_of([&] { add_note(s, ""); }) == ErrorCode::EmptyNote);
        CHECK(code_of([&] { add_note(s, "x", {"A9"}); }) == ErrorCode::UnknownEntity);
        CHECK(validate_session(s).empty());
    }

    TEST_CASE("notes may link archived groups") {
        auto s = make_session();
        auto g1 = create_group(s, "G1");
        auto g2 = create_group(s, "G2");
        merge(s, {g1.id, g2.id}, "G12");
        auto n = add_note(s, "why merged", {}, {g1.id});
        CHECK(referrer_ids(backlinks(s.state(), g1.id)) == Ids{n.id});
    }

    TEST_CASE("linking a note adds links and keeps text") {
        auto s = make_session(numbered_annotations(2));
        auto n = add_note(s, "thought", {"A1"});
        auto count = s.events().size();
        auto linked = link_note(s, n.id, {"A1", "A2"}, {});
        CHECK(linked.text == "thought");
        CHECK(linked.linked_annotation_ids == Ids{"A1", "A2"});
        CHECK(s.events().size() == count + 1);
        link_note(s, n.id, {"A2"}, {});
        CHECK(s.events().size() == count + 1);
        CHECK(referrer_ids(backlinks(s.state(), "A2")) == Ids{n.id});
    }

    TEST_CASE("note first, then document, in creation order") {
        auto s = make_session(numbered_annotations(1));
        auto n = add_note(s, "early", {"A1"});
        auto d = create_document(s, DocumentLevel::cross_source_synthesis);
        edit_document(s, d.id, "cites ((ref:A1))");
        CHECK(referrer_ids(backlinks(s.state(), "A1")) == Ids{n.id, d.id});
        auto back = backlinks(s.state(), "A1");
        CHECK(back[0].kind == ReferrerKind::note);
        CHECK(back[1].kind == ReferrerKind::document);
    }

    TEST_CASE("editing a document away from a citation drops its backlink") {
        auto s = make_session(numbered_annotations(1));
        auto d = create_document(s, DocumentLevel::cross_source_synthesis);
        edit_document(s, d.id, "((ref:A1))");
        CHECK(backlinks(s.state(), "A1").size() == 1);
        edit_document(s, d.id, "nothing");
        CHECK(backlinks(s.state(), "A1").empty());
    }

    TEST_CASE("100 random notes: rebuilt index equals incremental index") {
        std::mt19937_64 rng(100);
        auto s = make_session(numbered_annotations(10));
        Ids groups;
        for (int i = 0; i < 4; ++i) groups.push_back(create_group(s, "G" + std::to_string(i)).id);
        for (int i = 0; i < 100; ++i) {
            Ids anns, grps;
            for (int k = 1; k <= 10; ++k) {
                if (std::bernoulli_distribution(0.2)(rng)) anns.push_back("A" + std::to_string(k));
            }
            for (const auto& g : groups) {
                if (std::bernoulli_distribution(0.2)(rng)) grps.push_back(g);
            }
            add_note(s, "note " + std::to_string(i), anns, grps);
        }
        CHECK(rebuild_backlinks(s.state()) == s.state().backlinks);
        for (int k = 1; k <= 10; ++k) {
            auto id = "A" + std::to_string(k);
            CHECK(referrer_ids(backlinks(s.state(), id)) == oracle_backlink_ids(s.state(), id));
        }
    }

    TEST_CASE("random sequences keep every structural property") {
        std::mt19937_64 rng(31337);
        for (int i = 0; i < 60; ++i) {
            SequenceOptions opts{.steps = 40, .with_notes = (i % 2 == 1)};
            auto s = random_session(rng, opts);
            auto report = run_random_sequence(s, rng, opts);
            CHECK(report.violations.empty());
            CHECK(report.backlink_divergences.empty());
            if (!report.violations.empty()) MESSAGE(report.violations.front());
            if (!report.backlink_divergences.empty()) MESSAGE(report.backlink_divergences.front());
            CHECK(validate_session(s).empty());
        }
    }
}
