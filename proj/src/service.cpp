#include "synthlab/service.hpp"

#include <cstdlib>
#include <iostream>

namespace synthlab {

namespace {

std::uint64_t session_number(const std::string& id) {
    if (id.rfind("ses-", 0) != 0) return 0;
    try {
        return std::stoull(id.substr(4));
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

void ServiceConfig::validate() const {
    parse_listen_address(listen_address);
    if (data_dir.empty()) throw Error(ErrorCode::ConfigError, "data_dir must be set");
    if (snapshot_every == 0) throw Error(ErrorCode::ConfigError, "snapshot_every must be positive");
    ingest.validate();
    strategy_thresholds.validate();
}

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig config;
    if (const char* listen = std::getenv("SYNTHLAB_LISTEN")) config.listen_address = listen;
    if (const char* dir = std::getenv("SYNTHLAB_DATA_DIR")) config.data_dir = dir;
    config.ingest = IngestConfig::from_env();
    return config;
}

std::pair<std::string, int> parse_listen_address(const std::string& address) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
        throw Error(ErrorCode::ConfigError, "listen address must be host:port, got '" + address + "'");
    }
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(address.substr(colon + 1), &used);
        if (used != address.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "bad port in listen address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw Error(ErrorCode::ConfigError, "port out of range in '" + address + "'");
    return {address.substr(0, colon), port};
}

SynthesisService::SynthesisService(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), store_(config_.data_dir) {
    config_.validate();
    for (const auto& id : store_.list_session_ids()) {
        next_session_number_ = std::max(next_session_number_, session_number(id) + 1);
        try {
            auto slot = std::make_shared<Slot>(store_.recover(id, clock_));
            slot->snapshot_seq = slot->session.state().last_seq;
            attach_writer(*slot);
            sessions_.emplace(id, std::move(slot));
        } catch (const Error& e) {
            std::cerr << "synthlab: quarantining session " << id << ": " << e.what() << '\n';
            quarantined_.emplace(id, QuarantinedSession{id, e.what()});
        }
    }
}

void SynthesisService::attach_writer(Slot& slot) {
    slot.writer = store_.open_log(slot.session.state().id, config_.sync_writes);
    auto* writer = slot.writer.get();
    slot.session.set_sink([writer](const EventRecord& event) { writer->append(event); });
}

std::string SynthesisService::create_session(const std::string& owner, const std::vector<std::string>& source_uris) {
    std::unique_lock registry(registry_mutex_);
    auto id = format_session_id(next_session_number_);

    auto writer = store_.open_log(id, config_.sync_writes);
    auto* raw = writer.get();
    auto session = Session::create(id, owner, source_uris, clock_,
                                   [raw](const EventRecord& event) { raw->append(event); });
    ++next_session_number_;

    auto slot = std::make_shared<Slot>(std::move(session));
    slot->writer = std::move(writer);
    sessions_.emplace(id, std::move(slot));
    return id;
}

std::vector<std::string> SynthesisService::session_ids() const {
    std::shared_lock registry(registry_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, slot] : sessions_) ids.push_back(id);
    return ids;
}

std::vector<QuarantinedSession> SynthesisService::quarantined() const {
    std::shared_lock registry(registry_mutex_);
    std::vector<QuarantinedSession> out;
    for (const auto& [id, q] : quarantined_) out.push_back(q);
    return out;
}

std::shared_ptr<SynthesisService::Slot> SynthesisService::find(const std::string& id) const {
    std::shared_lock registry(registry_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    if (auto it = quarantined_.find(id); it != quarantined_.end()) {
        throw Error(ErrorCode::CorruptLog, "session " + id + " is quarantined: " + it->second.reason);
    }
    throw Error(ErrorCode::UnknownSession, "unknown session " + id);
}

void SynthesisService::maybe_snapshot(Slot& slot) noexcept {
    const auto& state = slot.session.state();
    if (state.last_seq < slot.snapshot_seq + config_.snapshot_every) return;
    try {
        store_.write_snapshot(state);
        slot.snapshot_seq = state.last_seq;
    } catch (const std::exception& e) {
        std::cerr << "synthlab: snapshot of " << state.id << " failed: " << e.what() << '\n';
    }
}

}  // namespace synthlab
