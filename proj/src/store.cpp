#include "synthlab/store.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace synthlab {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& what) {
    throw Error(ErrorCode::DataDirError, what + ": " + std::strerror(errno));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::CorruptLog, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

EventLogWriter::EventLogWriter(const fs::path& path, bool sync) : path_(path), sync_(sync) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) io_error("cannot open " + path.string());
}

EventLogWriter::~EventLogWriter() {
    if (fd_ >= 0) ::close(fd_);
}

void EventLogWriter::append(const EventRecord& event) {
    std::string line = serialize_event(event);
    line.push_back('\n');
    std::size_t written = 0;
    while (written < line.size()) {
        auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_error("cannot append to " + path_.string());
        }
        written += static_cast<std::size_t>(n);
    }
    if (sync_ && ::fdatasync(fd_) != 0) io_error("cannot sync " + path_.string());
}

std::vector<EventRecord> read_event_log(const fs::path& path) {
    auto content = read_file(path);
    std::vector<EventRecord> events;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
        ++line_no;
        auto end = content.find('\n', start);
        if (end == std::string::npos) {
            throw Error(ErrorCode::CorruptLog, path.string() + ": truncated final line " + std::to_string(line_no));
        }
        try {
            events.push_back(parse_event(std::string_view(content).substr(start, end - start)));
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptLog, path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        start = end + 1;
    }
    return events;
}

SessionStore::SessionStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {
    std::error_code ec;
    fs::create_directories(data_dir_ / "sessions", ec);
    if (ec) throw Error(ErrorCode::DataDirError, "cannot create " + (data_dir_ / "sessions").string() + ": " + ec.message());
    auto probe = data_dir_ / "sessions" / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out) throw Error(ErrorCode::DataDirError, "data directory is not writable: " + data_dir_.string());
    }
    fs::remove(probe, ec);
}

fs::path SessionStore::session_dir(const std::string& id) const { return data_dir_ / "sessions" / id; }
fs::path SessionStore::log_path(const std::string& id) const { return session_dir(id) / "events.jsonl"; }
fs::path SessionStore::snapshot_path(const std::string& id) const { return session_dir(id) / "snapshot.json"; }

std::vector<std::string> SessionStore::list_session_ids() const {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(data_dir_ / "sessions")) {
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Session SessionStore::recover(const std::string& id, Clock clock) const {
    auto log_file = log_path(id);
    if (!fs::exists(log_file)) throw Error(ErrorCode::CorruptLog, "session " + id + " has no event log");
    auto log = read_event_log(log_file);
    if (log.empty()) throw Error(ErrorCode::CorruptLog, "session " + id + " has an empty event log");

    std::optional<SessionState> snapshot;
    if (auto snap = snapshot_path(id); fs::exists(snap)) {
        try {
            auto state = state_from_json(Json::parse(read_file(snap)));
            if (state.id == id && state.last_seq <= log.size()) snapshot = std::move(state);
        } catch (const std::exception&) {
            // Unusable snapshot; the log alone is authoritative.
        }
    }

    try {
        Session session = snapshot ? Session::restore(std::move(*snapshot), std::move(log), clock)
                                   : Session::replay(std::move(log), clock);
        if (session.state().id != id) {
            throw Error(ErrorCode::CorruptLog, "log of " + id + " belongs to session " + session.state().id);
        }
        return session;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptLog) throw;
        throw Error(ErrorCode::CorruptLog, "session " + id + ": " + e.what());
    }
}

void SessionStore::write_snapshot(const SessionState& state) const {
    auto target = snapshot_path(state.id);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) io_error("cannot write " + tmp.string());
        out << serialize_state(state);
        out.flush();
        if (!out) io_error("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::DataDirError, "cannot install snapshot " + target.string() + ": " + ec.message());
}

std::unique_ptr<EventLogWriter> SessionStore::open_log(const std::string& id, bool sync) const {
    std::error_code ec;
    fs::create_directories(session_dir(id), ec);
    if (ec) throw Error(ErrorCode::DataDirError, "cannot create " + session_dir(id).string() + ": " + ec.message());
    return std::make_unique<EventLogWriter>(log_path(id), sync);
}

}  // namespace synthlab
