// synthlab command-line entry point: runs the HTTP service and offers offline
// tools over exported event logs.

#include <csignal>
#include <iostream>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"

#include "synthlab/analytics.hpp"
#include "synthlab/http_api.hpp"
#include "synthlab/ingest.hpp"
#include "synthlab/service.hpp"
#include "synthlab/session.hpp"
#include "synthlab/store.hpp"
#include "synthlab/synthesize.hpp"

using namespace synthlab;

namespace {

Session load_log(const std::string& path) {
    return Session::replay(read_event_log(path));
}

int serve(ServiceConfig config, const std::string& fixture, const std::string& owner) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SynthesisService service(config);
    for (const auto& q : service.quarantined()) {
        std::cerr << "quarantined " << q.id << ": " << q.reason << '\n';
    }
    if (!fixture.empty()) {
        auto annotations = load_fixture(fixture);
        auto id = service.create_session(owner, {});
        auto result = service.write(id, [&](Session& s) { return ingest_annotations(s, "fixture", annotations); });
        std::cerr << "preloaded " << id << " with " << result.added << " annotations from " << fixture << '\n';
    }

    auto [host, port] = parse_listen_address(config.listen_address);
    HttpApi api(service);
    int bound = api.start(host, port);
    std::cerr << "synthlab listening on " << host << ':' << bound << " (data dir " << config.data_dir.string()
              << ", " << service.session_ids().size() << " sessions)\n";

    int received = 0;
    sigwait(&signals, &received);
    std::cerr << "shutting down\n";
    api.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthlab: annotation synthesis workspace service"};
    app.require_subcommand(1);

    auto config = ServiceConfig::from_env();
    std::string fixture;
    std::string owner = "local";
    bool no_sync = false;

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--listen", config.listen_address, "host:port to bind (env SYNTHLAB_LISTEN)")
        ->capture_default_str();
    serve_cmd->add_option("--data-dir", config.data_dir, "Session storage directory (env SYNTHLAB_DATA_DIR)")
        ->capture_default_str();
    serve_cmd->add_option("--fixture", fixture, "Annotation export to preload into a new session");
    serve_cmd->add_option("--owner", owner, "Owner of the preloaded session")->capture_default_str();
    serve_cmd->add_option("--snapshot-every", config.snapshot_every, "Events between snapshots")
        ->capture_default_str();
    serve_cmd->add_option("--api-base-url", config.ingest.api_base_url, "Annotation API base URL")
        ->capture_default_str();
    serve_cmd->add_option("--page-size", config.ingest.page_size, "Annotations per upstream page")
        ->check(CLI::Range(1, 200))
        ->capture_default_str();
    serve_cmd->add_option("--deductive-threshold", config.strategy_thresholds.deductive)->capture_default_str();
    serve_cmd->add_option("--inductive-threshold", config.strategy_thresholds.inductive)->capture_default_str();
    serve_cmd->add_flag("--no-sync", no_sync, "Skip fdatasync after each event");

    std::string log_path;
    auto* analyze_cmd = app.add_subcommand("analyze", "Print strategy and iteration metrics for an event log");
    analyze_cmd->add_option("log", log_path, "events.jsonl")->required()->check(CLI::ExistingFile);

    auto* replay_cmd = app.add_subcommand("replay", "Replay an event log and print the session document");
    replay_cmd->add_option("log", log_path, "events.jsonl")->required()->check(CLI::ExistingFile);

    auto* validate_cmd = app.add_subcommand("validate", "Replay an event log and list invariant violations");
    validate_cmd->add_option("log", log_path, "events.jsonl")->required()->check(CLI::ExistingFile);

    std::string document_id;
    std::string format = "markdown";
    auto* export_cmd = app.add_subcommand("export", "Export a synthesis document from an event log");
    export_cmd->add_option("log", log_path, "events.jsonl")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("document", document_id, "Document id")->required();
    export_cmd->add_option("--format", format, "markdown or html")
        ->check(CLI::IsMember({"markdown", "html"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve_cmd->parsed()) {
            config.sync_writes = !no_sync;
            return serve(config, fixture, owner);
        }
        if (analyze_cmd->parsed()) {
            auto log = read_event_log(log_path);
            Json out{{"strategy", to_json(analyze_log(log))}, {"iteration", to_json(iteration_metrics(log))}};
            std::cout << out.dump(2) << '\n';
        } else if (replay_cmd->parsed()) {
            std::cout << serialize_state(load_log(log_path).state());
        } else if (validate_cmd->parsed()) {
            auto violations = validate_session(load_log(log_path));
            for (const auto& v : violations) std::cout << v << '\n';
            if (!violations.empty()) return 1;
            std::cout << "ok\n";
        } else if (export_cmd->parsed()) {
            std::cout << export_document(load_log(log_path).state(), document_id, *parse_export_format(format));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}
