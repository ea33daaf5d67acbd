#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "synthlab/analytics.hpp"
#include "synthlab/ingest.hpp"
#include "synthlab/session.hpp"
#include "synthlab/store.hpp"

namespace synthlab {

struct ServiceConfig {
    std::string listen_address = "127.0.0.1:8787";
    std::filesystem::path data_dir = "synthlab-data";
    IngestConfig ingest;
    std::uint64_t snapshot_every = 100;
    StrategyThresholds strategy_thresholds;
    /// fdatasync every appended event before acknowledging it.
    bool sync_writes = true;

    /// Throws Error{ConfigError}.
    void validate() const;

    /// SYNTHLAB_LISTEN, SYNTHLAB_DATA_DIR and the ingest variables.
    static ServiceConfig from_env();
};

/// Splits "host:port"; throws Error{ConfigError}.
std::pair<std::string, int> parse_listen_address(const std::string& address);

/// Owns every live session. Mutations on one session are serialized by a
/// per-session writer lock; reads take the shared side and therefore never
/// observe a half-applied mutation. Every appended event reaches the log file
/// before the mutating call returns.
class SynthesisService {
public:
    /// Recovers each session under data_dir. Sessions whose log cannot be
    /// replayed are quarantined and reported by quarantined().
    explicit SynthesisService(ServiceConfig config, Clock clock = system_clock());

    const ServiceConfig& config() const { return config_; }

    std::string create_session(const std::string& owner, const std::vector<std::string>& source_uris);

    std::vector<std::string> session_ids() const;
    std::vector<QuarantinedSession> quarantined() const;

    /// Runs `fn(const Session&)` under the session's shared lock.
    template <class Fn>
    auto read(const std::string& id, Fn&& fn) const {
        auto slot = find(id);
        std::shared_lock lock(slot->mutex);
        return fn(static_cast<const Session&>(slot->session));
    }

    /// Runs `fn(Session&)` under the session's exclusive lock, then writes a
    /// snapshot if snapshot_every events have accumulated since the last one.
    template <class Fn>
    auto write(const std::string& id, Fn&& fn) {
        auto slot = find(id);
        std::unique_lock lock(slot->mutex);
        struct SnapshotGuard {
            SynthesisService& service;
            Slot& slot;
            ~SnapshotGuard() { service.maybe_snapshot(slot); }
        } guard{*this, *slot};
        return fn(slot->session);
    }

private:
    struct Slot {
        explicit Slot(Session s) : session(std::move(s)) {}
        mutable std::shared_mutex mutex;
        Session session;
        std::unique_ptr<EventLogWriter> writer;
        std::uint64_t snapshot_seq = 0;
    };

    std::shared_ptr<Slot> find(const std::string& id) const;
    void attach_writer(Slot& slot);
    void maybe_snapshot(Slot& slot) noexcept;

    ServiceConfig config_;
    Clock clock_;
    SessionStore store_;

    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::map<std::string, QuarantinedSession> quarantined_;
    std::uint64_t next_session_number_ = 1;
};

}  // namespace synthlab
