#pragma once

#include "motorfault/dataset.hpp"
#include "motorfault/evaluation.hpp"
#include "motorfault/neuralnet.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace motorfault {

struct SensorFrame {
    std::int64_t timestamp = 0;  // milliseconds since epoch
    std::string source_id;
    PhaseSample sample;
};

// Wire format, one record per line: `timestamp,source_id,v1,v2,v3,i1,i2,i3`.
// Exact field count, no whitespace tolerance. Throws ProtocolError.
SensorFrame parse_frame(std::string_view line);

// Inverse of parse_frame, without the trailing newline.
std::string format_frame(const SensorFrame& frame);

struct FaultEvent {
    std::int64_t timestamp = 0;  // of the triggering frame
    FaultClass predicted = FaultClass::NoFault;
    Vector outputs;
    int consecutive_count = 0;
    std::string source_id;
};

// Event log line: `timestamp,source_id,class_code,consecutive_count`.
std::string format_event(const FaultEvent& event);

struct StreamConfig {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 binds an ephemeral port, see StreamServer::port()
    int debounce_frames = 3;
    DecisionRule rule;
    int max_connections = 8;
    std::string event_log_path;  // empty disables the file sink
};

// Per-source debounce: a fault is announced once per maximal run of a stable
// non-NoFault class whose length reaches debounce_frames. NoFault or a
// rejection resets the run; a class change starts a new one.
class FaultMonitor {
public:
    explicit FaultMonitor(int debounce_frames);

    // Feeds one classified frame; returns the event exactly when its run
    // reaches the debounce length.
    std::optional<FaultEvent> observe(const SensorFrame& frame,
                                      const ClassificationResult& result);

private:
    struct SourceState {
        int run_code = 0;  // 0 = no active run
        int run_length = 0;
    };

    int debounce_;
    std::map<std::string, SourceState> sources_;
};

// TCP line server: one response line per request line, in request order per
// connection. `OK <code> <activation>` carries the decided class code (0 when
// rejected) and the highest activation; malformed requests get `ERR <reason>`
// and leave the connection and all counters untouched. Each connection owns
// its own FaultMonitor; events go to the notification stream, the optional
// append-only log file, and an in-memory list for inspection.
class StreamServer {
public:
    // Binds and listens immediately; throws IoError when the endpoint is not
    // bindable. `notify` may be null to silence the stream sink.
    StreamServer(Network net, StreamConfig config, std::ostream* notify = nullptr);
    ~StreamServer();

    StreamServer(const StreamServer&) = delete;
    StreamServer& operator=(const StreamServer&) = delete;

    void start();  // spawns the accept loop
    void stop();   // closes the listener and every connection, joins, flushes

    int port() const { return port_; }
    std::vector<FaultEvent> events() const;

private:
    struct Connection;

    void accept_loop();
    void serve_connection(Connection* conn);
    void emit(const FaultEvent& event);

    Network net_;
    StreamConfig config_;
    std::ostream* notify_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::thread accept_thread_;
    mutable std::mutex mutex_;  // guards connections_, events_, log/notify sinks
    std::vector<std::unique_ptr<Connection>> connections_;
    std::vector<FaultEvent> events_;
    std::unique_ptr<std::ostream> log_;
    bool running_ = false;
};

struct ReplayStats {
    std::size_t frames_sent = 0;
    std::size_t ok = 0;
    std::size_t errors = 0;                // ERR responses
    std::vector<std::string> responses;    // one per frame, newline stripped
};

// Sends a file to a server frame by frame, waiting for each response, pacing
// at rate_hz. Dataset CSVs (recognized by their header) are converted to
// frames with synthetic timestamps spaced 1000/rate_hz ms apart and source id
// "replay"; any other file is treated as raw frame lines. Throws IoError when
// the connection fails, ParseError for an unreadable dataset file.
ReplayStats replay_file(const std::string& path, const std::string& host,
                        int port, double rate_hz);

}  // namespace motorfault
