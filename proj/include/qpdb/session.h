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
#include <optional>
#include <string>
#include <vector>

#include "qpdb/database.h"
#include "qpdb/state.h"
#include "qpdb/wire.h"

namespace qpdb {

enum class TieRule {
    strict,  // a tie for the top count decodes to failure
    random,  // a tie is broken uniformly at random
};

enum class SplitRule {
    balanced,  // shares floor(k/M) / ceil(k/M), larger ones to earlier keys
    ceiling,   // every key gets ceil(k/M) copies (analysis only)
};

std::string_view tie_rule_name(TieRule rule);
std::string_view split_rule_name(SplitRule rule);
TieRule parse_tie_rule(std::string_view text);
SplitRule parse_split_rule(std::string_view text);

/// Copies per chosen key, in sorted key order.
std::vector<size_t> split_copies(size_t copies, size_t num_keys, SplitRule rule = SplitRule::balanced);

/// Index of the most frequent outcome. Under TieRule::strict a shared
/// maximum gives nullopt; under TieRule::random one of the tied outcomes is
/// drawn with one rng draw (no draw is made when there is no tie).
std::optional<size_t> majority_decode(std::span<const size_t> tallies, TieRule rule, Rng *rng = nullptr);

/// A state copy as it exists on Bob's side of the channel: it can be
/// measured once, and nothing else.
class ReceivedCopy {
   public:
    ReceivedCopy(ReceivedCopy &&) = default;
    ReceivedCopy &operator=(ReceivedCopy &&) = default;
    ReceivedCopy(const ReceivedCopy &) = delete;
    ReceivedCopy &operator=(const ReceivedCopy &) = delete;

    uint32_t block() const {
        return block_;
    }
    uint32_t copy() const {
        return copy_;
    }
    /// Destructive measurement; the copy is gone afterwards.
    MeasurementRecord measure(const MeasurementBasis &basis, Rng &rng) &&;

   private:
    friend class BobClient;
    ReceivedCopy(uint32_t block, uint32_t copy, QuantumState state)
        : block_(block), copy_(copy), state_(std::move(state)) {
    }

    uint32_t block_;
    uint32_t copy_;
    std::optional<QuantumState> state_;
};

/// Debug mode: per block, Alice sends k copies of every row's own target
/// state instead of the QRAC state, with copy index row*k + j. Both sides
/// must enable it; measurements are then deterministic.
struct NoiselessTargets {
    std::vector<std::vector<QuantumState>> per_block;  // [block][row]
};

NoiselessTargets noiseless_targets(const EncodedDatabase &db);

/// Alice's side as a stepwise engine: send_header, await_ack, transmit.
class AliceServer {
   public:
    AliceServer(StateTable table, uint32_t copies, ByteChannel &channel);
    AliceServer(const EncodedDatabase &db, uint32_t copies, ByteChannel &channel, NoiselessTargets debug);

    void send_header();
    void await_ack();
    /// All state copies followed by EndOfTransmission. Reads nothing.
    void transmit();
    /// The three steps in order.
    void serve();

    const Transcript &transcript() const {
        return transcript_;
    }
    size_t messages_per_block() const;

   private:
    StateTable table_;
    uint32_t copies_;
    ByteChannel &channel_;
    std::optional<NoiselessTargets> debug_;
    Transcript transcript_;
    int stage_ = 0;
};

struct QueryResult {
    std::vector<std::string> chosen_keys;    // sorted
    std::vector<size_t> shares;              // copies per key per block
    /// C characters per key: '0'/'1', or '?' for bits of a block that
    /// decoded to a tie failure.
    std::vector<std::string> fragment_bits;
    std::vector<std::vector<std::vector<size_t>>> tallies;  // [key][block][outcome]
    std::vector<size_t> tie_failures;                       // blocks per key

    bool decoded(size_t key_index) const {
        return tie_failures[key_index] == 0;
    }
};

struct BobOptions {
    std::vector<std::string> keys;
    TieRule tie_rule = TieRule::strict;
    bool noiseless_debug = false;
};

/// Bob's side as a stepwise engine: receive_header (replies Ack), then
/// receive_states, which measures each copy as it arrives.
class BobClient {
   public:
    BobClient(ByteChannel &channel, BobOptions options, Rng &rng);

    const SessionInfo &receive_header();
    void receive_states();
    QueryResult query();

    const SessionInfo &info() const {
        return info_;
    }
    uint32_t copies() const {
        return copies_;
    }
    const QueryResult &result() const {
        return result_;
    }

   private:
    void handle_copy(ReceivedCopy copy);
    void finish();

    ByteChannel &channel_;
    BobOptions options_;
    Rng &rng_;
    SessionInfo info_;
    uint32_t copies_ = 0;
    std::vector<size_t> key_rows_;         // row index of each chosen key
    std::vector<size_t> owner_;            // chosen-key index per copy index, or npos
    std::vector<std::vector<bool>> seen_;  // [block][copy]
    QueryResult result_;
    int stage_ = 0;
};

/// One complete session over an in-process pipe, driven on the caller's
/// thread. Alice's transcript is returned alongside Bob's result.
struct SessionOutcome {
    QueryResult result;
    Transcript alice_transcript;
};

SessionOutcome run_local_session(const StateTable &table, uint32_t copies, const BobOptions &options, Rng &rng);
SessionOutcome run_local_debug_session(const EncodedDatabase &db, uint32_t copies, BobOptions options, Rng &rng);

}  // namespace qpdb
