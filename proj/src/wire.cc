// Copyright 2026 The qpdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpdb/wire.h"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>

#include "qpdb/error.h"

namespace qpdb {

std::string_view message_type_name(MessageType type) {
    switch (type) {
        case MessageType::session_header:
            return "SessionHeader";
        case MessageType::state_copy:
            return "StateCopy";
        case MessageType::end_of_transmission:
            return "EndOfTransmission";
        case MessageType::ack:
            return "Ack";
    }
    return "Unknown";
}

void put_u16(std::vector<uint8_t> &out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
    for (int i = 0; i < 4; i++) {
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
}

void put_f64(std::vector<uint8_t> &out, double v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; i++) {
        out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
    }
}

uint16_t get_u16(const uint8_t *p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t *p) {
    return uint32_t{p[0]} | uint32_t{p[1]} << 8 | uint32_t{p[2]} << 16 | uint32_t{p[3]} << 24;
}

double get_f64(const uint8_t *p) {
    uint64_t bits = 0;
    for (int i = 7; i >= 0; i--) {
        bits = bits << 8 | p[i];
    }
    return std::bit_cast<double>(bits);
}

std::vector<uint8_t> encode_header(const SessionHeader &h) {
    if (h.keys.size() != h.num_rows) {
        throw Error(ErrorKind::invalid_argument, "header key count does not match R");
    }
    std::vector<uint8_t> out;
    out.push_back(h.num_qubits);
    put_u16(out, h.num_rows);
    put_u32(out, h.num_bits);
    put_u32(out, h.copies);
    put_u32(out, h.num_blocks);
    for (const std::string &key : h.keys) {
        put_u32(out, static_cast<uint32_t>(key.size()));
        out.insert(out.end(), key.begin(), key.end());
    }
    return out;
}

SessionHeader decode_header(std::span<const uint8_t> payload, size_t *consumed) {
    auto need = [&](size_t pos, size_t n) {
        if (pos + n > payload.size()) {
            throw Error(ErrorKind::protocol_error, "truncated session header");
        }
    };
    SessionHeader h;
    need(0, 15);
    const uint8_t *p = payload.data();
    h.num_qubits = p[0];
    h.num_rows = get_u16(p + 1);
    h.num_bits = get_u32(p + 3);
    h.copies = get_u32(p + 7);
    h.num_blocks = get_u32(p + 11);
    size_t pos = 15;
    for (size_t r = 0; r < h.num_rows; r++) {
        need(pos, 4);
        uint32_t len = get_u32(p + pos);
        pos += 4;
        need(pos, len);
        h.keys.emplace_back(reinterpret_cast<const char *>(p + pos), len);
        pos += len;
    }
    if (consumed) {
        *consumed = pos;
    } else if (pos != payload.size()) {
        throw Error(ErrorKind::protocol_error, "trailing bytes after session header");
    }
    return h;
}

std::vector<uint8_t> encode_state_copy(uint32_t block, uint32_t copy, const Eigen::VectorXcd &amplitudes) {
    std::vector<uint8_t> out;
    out.reserve(8 + 16 * static_cast<size_t>(amplitudes.size()));
    put_u32(out, block);
    put_u32(out, copy);
    for (Eigen::Index i = 0; i < amplitudes.size(); i++) {
        put_f64(out, amplitudes[i].real());
        put_f64(out, amplitudes[i].imag());
    }
    return out;
}

uint64_t fnv1a(std::span<const uint8_t> bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

void Transcript::append(Direction direction, const Frame &frame) {
    entries_.push_back({direction, frame.type, static_cast<uint32_t>(frame.payload.size()), fnv1a(frame.payload)});
}

uint64_t Transcript::digest() const {
    std::vector<uint8_t> bytes;
    bytes.reserve(entries_.size() * 14);
    for (const TranscriptEntry &e : entries_) {
        bytes.push_back(static_cast<uint8_t>(e.direction));
        bytes.push_back(static_cast<uint8_t>(e.type));
        put_u32(bytes, e.length);
        put_u32(bytes, static_cast<uint32_t>(e.payload_hash));
        put_u32(bytes, static_cast<uint32_t>(e.payload_hash >> 32));
    }
    return fnv1a(bytes);
}

void send_frame(ByteChannel &channel, const Frame &frame, Transcript *transcript) {
    if (frame.payload.size() > kMaxPayload) {
        throw Error(ErrorKind::protocol_error, "payload too large");
    }
    std::vector<uint8_t> bytes;
    bytes.reserve(5 + frame.payload.size());
    put_u32(bytes, static_cast<uint32_t>(frame.payload.size()));
    bytes.push_back(static_cast<uint8_t>(frame.type));
    bytes.insert(bytes.end(), frame.payload.begin(), frame.payload.end());
    channel.write(bytes);
    if (transcript) {
        transcript->append(Direction::sent, frame);
    }
}

Frame receive_frame(ByteChannel &channel, Transcript *transcript) {
    uint8_t head[5];
    channel.read(head);
    uint32_t length = get_u32(head);
    if (length > kMaxPayload) {
        throw Error(ErrorKind::protocol_error, "frame length " + std::to_string(length) + " exceeds limit");
    }
    if (head[4] < 0x01 || head[4] > 0x04) {
        throw Error(ErrorKind::protocol_error, "unknown message type " + std::to_string(head[4]));
    }
    Frame frame{static_cast<MessageType>(head[4]), std::vector<uint8_t>(length)};
    channel.read(frame.payload);
    if (transcript) {
        transcript->append(Direction::received, frame);
    }
    return frame;
}

namespace {

/// One direction of an in-process pipe.
struct PipeBuffer {
    std::mutex mutex;
    std::condition_variable ready;
    std::vector<uint8_t> data;
    size_t offset = 0;
    bool closed = false;
};

class MemoryEndpoint : public ByteChannel {
   public:
    MemoryEndpoint(std::shared_ptr<PipeBuffer> in, std::shared_ptr<PipeBuffer> out)
        : in_(std::move(in)), out_(std::move(out)) {
    }
    ~MemoryEndpoint() override {
        close();
    }

    void write(std::span<const uint8_t> bytes) override {
        std::lock_guard lock(out_->mutex);
        if (out_->closed) {
            throw Error(ErrorKind::channel_error, "write on closed pipe");
        }
        out_->data.insert(out_->data.end(), bytes.begin(), bytes.end());
        out_->ready.notify_all();
    }

    void read(std::span<uint8_t> out) override {
        std::unique_lock lock(in_->mutex);
        in_->ready.wait(lock, [&] { return in_->data.size() - in_->offset >= out.size() || in_->closed; });
        if (in_->data.size() - in_->offset < out.size()) {
            throw Error(ErrorKind::channel_error, "pipe closed by peer");
        }
        std::memcpy(out.data(), in_->data.data() + in_->offset, out.size());
        in_->offset += out.size();
        if (in_->offset == in_->data.size()) {
            in_->data.clear();
            in_->offset = 0;
        }
    }

    void close() override {
        std::lock_guard lock(out_->mutex);
        out_->closed = true;
        out_->ready.notify_all();
    }

   private:
    std::shared_ptr<PipeBuffer> in_;
    std::shared_ptr<PipeBuffer> out_;
};

class SocketChannel : public ByteChannel {
   public:
    explicit SocketChannel(int fd) : fd_(fd) {
    }
    ~SocketChannel() override {
        ::close(fd_);
    }

    void write(std::span<const uint8_t> bytes) override {
        size_t done = 0;
        while (done < bytes.size()) {
            ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw Error(ErrorKind::channel_error, std::string("send failed: ") + std::strerror(errno));
            }
            done += static_cast<size_t>(n);
        }
    }

    void read(std::span<uint8_t> out) override {
        size_t done = 0;
        while (done < out.size()) {
            ssize_t n = ::recv(fd_, out.data() + done, out.size() - done, 0);
            if (n < 0 && errno == EINTR) {
                continue;
            }
            if (n < 0) {
                throw Error(ErrorKind::channel_error, std::string("recv failed: ") + std::strerror(errno));
            }
            if (n == 0) {
                throw Error(ErrorKind::channel_error, "connection closed by peer");
            }
            done += static_cast<size_t>(n);
        }
    }

    void close() override {
        ::shutdown(fd_, SHUT_WR);
    }

   private:
    int fd_;
};

struct ParsedEndpoint {
    bool unix_socket = false;
    std::string host;
    std::string port;
    std::string path;
};

ParsedEndpoint parse_endpoint(const std::string &endpoint) {
    ParsedEndpoint e;
    if (endpoint.rfind("unix:", 0) == 0) {
        e.unix_socket = true;
        e.path = endpoint.substr(5);
        if (e.path.empty() || e.path.size() >= sizeof(sockaddr_un::sun_path)) {
            throw Error(ErrorKind::invalid_argument, "bad unix socket path in " + endpoint);
        }
        return e;
    }
    if (endpoint.rfind("tcp:", 0) == 0) {
        std::string rest = endpoint.substr(4);
        size_t colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
            throw Error(ErrorKind::invalid_argument, "expected tcp:HOST:PORT, got " + endpoint);
        }
        e.host = rest.substr(0, colon);
        e.port = rest.substr(colon + 1);
        return e;
    }
    throw Error(ErrorKind::invalid_argument, "endpoint must start with tcp: or unix:, got " + endpoint);
}

sockaddr_un unix_address(const std::string &path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    return addr;
}

std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> resolve(const ParsedEndpoint &e, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    addrinfo *res = nullptr;
    int rc = getaddrinfo(e.host.c_str(), e.port.c_str(), &hints, &res);
    if (rc != 0) {
        throw Error(ErrorKind::channel_error, "cannot resolve " + e.host + ": " + gai_strerror(rc));
    }
    return {res, &freeaddrinfo};
}

[[noreturn]] void socket_failure(const std::string &what) {
    throw Error(ErrorKind::channel_error, what + ": " + std::strerror(errno));
}

}  // namespace

std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_memory_pipe() {
    auto a_to_b = std::make_shared<PipeBuffer>();
    auto b_to_a = std::make_shared<PipeBuffer>();
    return {std::make_unique<MemoryEndpoint>(b_to_a, a_to_b), std::make_unique<MemoryEndpoint>(a_to_b, b_to_a)};
}

std::unique_ptr<ByteChannel> connect_endpoint(const std::string &endpoint) {
    ParsedEndpoint e = parse_endpoint(endpoint);
    if (e.unix_socket) {
        int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (fd < 0) {
            socket_failure("socket");
        }
        sockaddr_un addr = unix_address(e.path);
        if (::connect(fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0) {
            ::close(fd);
            socket_failure("connect to " + endpoint);
        }
        return std::make_unique<SocketChannel>(fd);
    }
    auto addrs = resolve(e, false);
    for (addrinfo *ai = addrs.get(); ai; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            return std::make_unique<SocketChannel>(fd);
        }
        ::close(fd);
    }
    socket_failure("connect to " + endpoint);
}

Listener::Listener(const std::string &endpoint) {
    ParsedEndpoint e = parse_endpoint(endpoint);
    if (e.unix_socket) {
        fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (fd_ < 0) {
            socket_failure("socket");
        }
        ::unlink(e.path.c_str());
        sockaddr_un addr = unix_address(e.path);
        if (::bind(fd_, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0 || ::listen(fd_, 4) != 0) {
            ::close(fd_);
            socket_failure("listen on " + endpoint);
        }
        unix_path_ = e.path;
        endpoint_ = endpoint;
        return;
    }
    auto addrs = resolve(e, true);
    for (addrinfo *ai = addrs.get(); ai; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 4) == 0) {
            fd_ = fd;
            break;
        }
        ::close(fd);
    }
    if (fd_ < 0) {
        socket_failure("listen on " + endpoint);
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr *>(&bound), &len);
    char port[NI_MAXSERV];
    ::getnameinfo(reinterpret_cast<sockaddr *>(&bound), len, nullptr, 0, port, sizeof(port), NI_NUMERICSERV);
    endpoint_ = "tcp:" + e.host + ":" + port;
}

Listener::~Listener() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
    if (!unix_path_.empty()) {
        ::unlink(unix_path_.c_str());
    }
}

std::unique_ptr<ByteChannel> Listener::accept() {
    for (;;) {
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) {
            return std::make_unique<SocketChannel>(fd);
        }
        if (errno != EINTR) {
            socket_failure("accept");
        }
    }
}

}  // namespace qpdb
