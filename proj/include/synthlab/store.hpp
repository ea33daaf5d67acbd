#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "synthlab/session.hpp"

namespace synthlab {

/// Append-only JSON Lines writer for one session's events. Each append is
/// written with a single write(2) and, when `sync` is set, fdatasync'ed
/// before returning.
class EventLogWriter {
public:
    EventLogWriter(const std::filesystem::path& path, bool sync);
    ~EventLogWriter();

    EventLogWriter(const EventLogWriter&) = delete;
    EventLogWriter& operator=(const EventLogWriter&) = delete;

    /// Throws Error{DataDirError} on I/O failure.
    void append(const EventRecord& event);

private:
    std::filesystem::path path_;
    int fd_ = -1;
    bool sync_;
};

/// Reads a JSON Lines log. A line that does not parse, or a final line
/// without its terminating newline, raises Error{CorruptLog}.
std::vector<EventRecord> read_event_log(const std::filesystem::path& path);

struct QuarantinedSession {
    std::string id;
    std::string reason;
};

/// On-disk layout:
///   <data_dir>/sessions/<session id>/events.jsonl
///   <data_dir>/sessions/<session id>/snapshot.json
class SessionStore {
public:
    /// Creates the directory tree if needed. Throws Error{DataDirError}.
    explicit SessionStore(std::filesystem::path data_dir);

    const std::filesystem::path& data_dir() const { return data_dir_; }
    std::filesystem::path session_dir(const std::string& id) const;
    std::filesystem::path log_path(const std::string& id) const;
    std::filesystem::path snapshot_path(const std::string& id) const;

    std::vector<std::string> list_session_ids() const;

    /// Loads the latest snapshot (when usable) and replays the log tail.
    /// Throws Error{CorruptLog} when the session cannot be recovered.
    Session recover(const std::string& id, Clock clock) const;

    /// Writes to a temporary file and renames it over the snapshot.
    void write_snapshot(const SessionState& state) const;

    std::unique_ptr<EventLogWriter> open_log(const std::string& id, bool sync) const;

private:
    std::filesystem::path data_dir_;
};

}  // namespace synthlab
