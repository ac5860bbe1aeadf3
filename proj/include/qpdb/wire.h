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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpdb/state.h"

namespace qpdb {

// Frame layout: [payload length: u32 LE][type: u8][payload]. The length
// counts payload bytes only.

enum class MessageType : uint8_t {
    session_header = 0x01,
    state_copy = 0x02,
    end_of_transmission = 0x03,
    ack = 0x04,
};

std::string_view message_type_name(MessageType type);

inline constexpr uint32_t kMaxPayload = 1u << 24;

struct Frame {
    MessageType type;
    std::vector<uint8_t> payload;
};

/// Keys are written as [u32 LE byte length][UTF-8 bytes], R of them.
struct SessionHeader {
    uint8_t num_qubits = 0;
    uint16_t num_rows = 0;
    uint32_t num_bits = 0;
    uint32_t copies = 0;
    uint32_t num_blocks = 0;
    std::vector<std::string> keys;

    bool operator==(const SessionHeader &) const = default;
};

std::vector<uint8_t> encode_header(const SessionHeader &h);
/// Parses a header payload; `consumed` (if given) receives the byte count
/// read, otherwise trailing bytes are an error.
SessionHeader decode_header(std::span<const uint8_t> payload, size_t *consumed = nullptr);

std::vector<uint8_t> encode_state_copy(uint32_t block, uint32_t copy, const Eigen::VectorXcd &amplitudes);

/// Little-endian helpers shared by the wire and file formats.
void put_u16(std::vector<uint8_t> &out, uint16_t v);
void put_u32(std::vector<uint8_t> &out, uint32_t v);
void put_f64(std::vector<uint8_t> &out, double v);
uint16_t get_u16(const uint8_t *p);
uint32_t get_u32(const uint8_t *p);
double get_f64(const uint8_t *p);

uint64_t fnv1a(std::span<const uint8_t> bytes);

enum class Direction : uint8_t { sent, received };

struct TranscriptEntry {
    Direction direction;
    MessageType type;
    uint32_t length;
    uint64_t payload_hash;

    bool operator==(const TranscriptEntry &) const = default;
};

/// Append-only log of the frames one party saw.
class Transcript {
   public:
    void append(Direction direction, const Frame &frame);
    const std::vector<TranscriptEntry> &entries() const {
        return entries_;
    }
    /// FNV-1a over all entries, for cheap whole-transcript comparison.
    uint64_t digest() const;

   private:
    std::vector<TranscriptEntry> entries_;
};

/// Ordered duplex byte stream.
class ByteChannel {
   public:
    virtual ~ByteChannel() = default;
    virtual void write(std::span<const uint8_t> bytes) = 0;
    /// Fills `out` completely or throws channel_error.
    virtual void read(std::span<uint8_t> out) = 0;
    /// Signals end of stream to the peer.
    virtual void close() = 0;
};

void send_frame(ByteChannel &channel, const Frame &frame, Transcript *transcript = nullptr);
Frame receive_frame(ByteChannel &channel, Transcript *transcript = nullptr);

/// Two connected in-process endpoints. Writes never block, so both sides
/// may be driven from one thread as long as reads only wait for data the
/// other side has already written.
std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_memory_pipe();

/// Endpoints are "tcp:HOST:PORT" or "unix:PATH".
std::unique_ptr<ByteChannel> connect_endpoint(const std::string &endpoint);

class Listener {
   public:
    /// Port 0 picks a free port; endpoint() then reports the bound one.
    explicit Listener(const std::string &endpoint);
    ~Listener();
    Listener(const Listener &) = delete;
    Listener &operator=(const Listener &) = delete;

    const std::string &endpoint() const {
        return endpoint_;
    }
    std::unique_ptr<ByteChannel> accept();

   private:
    int fd_ = -1;
    std::string endpoint_;
    std::string unix_path_;
};

}  // namespace qpdb
