#include "motorfault/stream.hpp"

#include "motorfault/errors.hpp"
#include "motorfault/text.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace motorfault {

SensorFrame parse_frame(std::string_view line) {
    auto fields = split(line, ',');
    if (fields.size() != 8)
        throw ProtocolError("expected 8 fields, got " + std::to_string(fields.size()));
    SensorFrame frame;
    if (!try_parse_int(fields[0], frame.timestamp) || frame.timestamp < 0)
        throw ProtocolError("bad timestamp '" + std::string(fields[0]) + "'");
    frame.source_id = std::string(fields[1]);
    double* channels[6] = {&frame.sample.v1, &frame.sample.v2, &frame.sample.v3,
                           &frame.sample.i1, &frame.sample.i2, &frame.sample.i3};
    for (int i = 0; i < 6; ++i) {
        double value;
        if (!try_parse_double(fields[2 + i], value) || !std::isfinite(value))
            throw ProtocolError("bad value '" + std::string(fields[2 + i]) + "'");
        *channels[i] = value;
    }
    return frame;
}

std::string format_frame(const SensorFrame& frame) {
    const PhaseSample& s = frame.sample;
    std::ostringstream out;
    out << frame.timestamp << ',' << frame.source_id << ',' << format_double(s.v1)
        << ',' << format_double(s.v2) << ',' << format_double(s.v3) << ','
        << format_double(s.i1) << ',' << format_double(s.i2) << ','
        << format_double(s.i3);
    return out.str();
}

std::string format_event(const FaultEvent& event) {
    std::ostringstream out;
    out << event.timestamp << ',' << event.source_id << ','
        << class_code(event.predicted) << ',' << event.consecutive_count;
    return out.str();
}

FaultMonitor::FaultMonitor(int debounce_frames) : debounce_(debounce_frames) {
    if (debounce_frames < 1) throw UsageError("debounce must be >= 1");
}

std::optional<FaultEvent> FaultMonitor::observe(const SensorFrame& frame,
                                                const ClassificationResult& result) {
    SourceState& state = sources_[frame.source_id];
    int code = result.predicted && *result.predicted != FaultClass::NoFault
                   ? class_code(*result.predicted)
                   : 0;
    if (code == 0) {
        // Healthy or rejected frame ends any run.
        state = SourceState{};
        return std::nullopt;
    }
    if (state.run_code != code) {
        state.run_code = code;
        state.run_length = 0;
    }
    ++state.run_length;
    if (state.run_length != debounce_) return std::nullopt;

    FaultEvent event;
    event.timestamp = frame.timestamp;
    event.predicted = *result.predicted;
    event.outputs = result.outputs;
    event.consecutive_count = state.run_length;
    event.source_id = frame.source_id;
    return event;
}

namespace {

bool send_all(int fd, std::string_view text) {
    std::size_t sent = 0;
    while (sent < text.size()) {
        ssize_t n = ::send(fd, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

sockaddr_in make_address(const std::string& host, int port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw IoError("bad host address '" + host + "'");
    return addr;
}

}  // namespace

struct StreamServer::Connection {
    int fd = -1;
    std::atomic<bool> open{true};
    std::thread thread;
};

StreamServer::StreamServer(Network net, StreamConfig config, std::ostream* notify)
    : net_(std::move(net)), config_(std::move(config)), notify_(notify) {
    if (config_.debounce_frames < 1) throw UsageError("debounce must be >= 1");
    if (config_.max_connections < 1) throw UsageError("max_connections must be >= 1");
    validate(config_.rule);
    if (config_.port < 0 || config_.port > 65535) throw UsageError("bad port");

    sockaddr_in addr = make_address(config_.host, config_.port);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("cannot bind " + config_.host + ":" + std::to_string(config_.port) +
                      ": " + std::strerror(err));
    }
    if (::listen(listen_fd_, config_.max_connections) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError(std::string("listen: ") + std::strerror(err));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    if (!config_.event_log_path.empty()) {
        auto log = std::make_unique<std::ofstream>(
            config_.event_log_path, std::ios::binary | std::ios::app);
        if (!*log) {
            ::close(listen_fd_);
            listen_fd_ = -1;
            throw IoError("cannot open event log '" + config_.event_log_path + "'");
        }
        log_ = std::move(log);
    }
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
    std::lock_guard lock(mutex_);
    if (running_ || listen_fd_ < 0) return;
    running_ = true;
    accept_thread_ = std::thread(&StreamServer::accept_loop, this);
}

void StreamServer::stop() {
    {
        std::lock_guard lock(mutex_);
        if (!running_) {
            if (listen_fd_ >= 0) {
                ::close(listen_fd_);
                listen_fd_ = -1;
            }
            return;
        }
        running_ = false;
    }
    // Unblocks accept; the listener is closed only after its thread exits.
    ::shutdown(listen_fd_, SHUT_RDWR);
    accept_thread_.join();
    ::close(listen_fd_);
    listen_fd_ = -1;

    {
        std::lock_guard lock(mutex_);
        for (auto& conn : connections_)
            if (conn->open) ::shutdown(conn->fd, SHUT_RDWR);
    }
    for (auto& conn : connections_)
        if (conn->thread.joinable()) conn->thread.join();
    connections_.clear();

    std::lock_guard lock(mutex_);
    if (log_) log_->flush();
}

std::vector<FaultEvent> StreamServer::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

void StreamServer::accept_loop() {
    while (true) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        int saved_errno = errno;
        std::lock_guard lock(mutex_);
        // Everything below shares one critical section with stop(), so no
        // connection can be added after stop()'s shutdown sweep.
        if (!running_) {
            if (fd >= 0) ::close(fd);
            return;
        }
        if (fd < 0) {
            if (saved_errno == EINTR || saved_errno == ECONNABORTED) continue;
            return;
        }
        int active = 0;
        for (const auto& conn : connections_)
            if (conn->open) ++active;
        if (active >= config_.max_connections) {
            send_all(fd, "ERR server busy\n");
            ::close(fd);
            continue;
        }
        auto conn = std::make_unique<Connection>();
        conn->fd = fd;
        Connection* raw = conn.get();
        conn->thread = std::thread(&StreamServer::serve_connection, this, raw);
        connections_.push_back(std::move(conn));
    }
}

void StreamServer::serve_connection(Connection* conn) {
    FaultMonitor monitor(config_.debounce_frames);
    std::string buffer;
    char chunk[4096];
    bool alive = true;
    while (alive) {
        ssize_t n = ::recv(conn->fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (alive && (pos = buffer.find('\n')) != std::string::npos) {
            std::string line(strip_cr(std::string_view(buffer).substr(0, pos)));
            buffer.erase(0, pos + 1);
            std::string response;
            try {
                SensorFrame frame = parse_frame(line);
                ClassificationResult result = classify(net_, frame.sample, config_.rule);
                int code = result.predicted ? class_code(*result.predicted) : 0;
                response = "OK " + std::to_string(code) + ' ' +
                           format_double(result.outputs.maxCoeff()) + '\n';
                if (auto event = monitor.observe(frame, result)) emit(*event);
            } catch (const ProtocolError& e) {
                response = std::string("ERR ") + e.what() + '\n';
            } catch (const Error& e) {
                // Classification failure is a server misconfiguration, not a
                // malformed request; report and drop the connection.
                send_all(conn->fd, std::string("ERR ") + e.what() + '\n');
                alive = false;
                break;
            }
            if (!send_all(conn->fd, response)) alive = false;
        }
    }
    std::lock_guard lock(mutex_);
    ::close(conn->fd);
    conn->open = false;
}

void StreamServer::emit(const FaultEvent& event) {
    std::lock_guard lock(mutex_);
    events_.push_back(event);
    if (notify_)
        *notify_ << "FAULT " << class_display_name(event.predicted) << " ("
                 << class_code(event.predicted) << ") source=" << event.source_id
                 << " t=" << event.timestamp << " count=" << event.consecutive_count
                 << std::endl;
    if (log_) *log_ << format_event(event) << std::endl;
}

ReplayStats replay_file(const std::string& path, const std::string& host, int port,
                        double rate_hz) {
    if (!(rate_hz > 0)) throw UsageError("rate must be positive");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    // A dataset CSV is recognized by its header and converted to frames with
    // synthetic timestamps; anything else is replayed line by line as-is.
    std::vector<std::string> lines;
    std::string_view view(text);
    std::size_t nl = view.find('\n');
    std::string_view first = strip_cr(view.substr(0, nl));
    if (first == kCsvHeader) {
        Dataset data = parse_csv(view, path);
        double step_ms = 1000.0 / rate_hz;
        for (std::size_t k = 0; k < data.samples.size(); ++k) {
            SensorFrame frame;
            frame.timestamp = static_cast<std::int64_t>(std::llround(step_ms * k));
            frame.source_id = "replay";
            frame.sample = data.samples[k].sample;
            lines.push_back(format_frame(frame));
        }
    } else {
        std::size_t start = 0;
        while (start <= view.size()) {
            std::size_t pos = view.find('\n', start);
            std::string_view line = view.substr(
                start, pos == std::string_view::npos ? view.size() - start : pos - start);
            start = pos == std::string_view::npos ? view.size() + 1 : pos + 1;
            line = strip_cr(line);
            if (!line.empty()) lines.emplace_back(line);
        }
    }

    sockaddr_in addr = make_address(host, port);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        int err = errno;
        ::close(fd);
        throw IoError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                      std::strerror(err));
    }

    ReplayStats stats;
    std::string rbuf;
    auto interval = std::chrono::duration<double>(1.0 / rate_hz);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (!send_all(fd, lines[k] + '\n')) {
            ::close(fd);
            throw IoError("connection lost while sending");
        }
        ++stats.frames_sent;
        std::size_t pos;
        while ((pos = rbuf.find('\n')) == std::string::npos) {
            char chunk[4096];
            ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
            if (n <= 0) {
                ::close(fd);
                throw IoError("connection closed before response");
            }
            rbuf.append(chunk, static_cast<std::size_t>(n));
        }
        std::string response(strip_cr(std::string_view(rbuf).substr(0, pos)));
        rbuf.erase(0, pos + 1);
        if (response.rfind("OK", 0) == 0)
            ++stats.ok;
        else
            ++stats.errors;
        stats.responses.push_back(std::move(response));
        if (k + 1 < lines.size()) std::this_thread::sleep_for(interval);
    }
    ::close(fd);
    return stats;
}

}  // namespace motorfault
