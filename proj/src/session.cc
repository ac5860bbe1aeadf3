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

#include "qpdb/session.h"

#include <algorithm>
#include <set>

#include "qpdb/error.h"
#include "qpdb/mub.h"

namespace qpdb {

std::string_view tie_rule_name(TieRule rule) {
    return rule == TieRule::strict ? "strict" : "random";
}

std::string_view split_rule_name(SplitRule rule) {
    return rule == SplitRule::balanced ? "balanced" : "ceiling";
}

TieRule parse_tie_rule(std::string_view text) {
    if (text == "strict") {
        return TieRule::strict;
    }
    if (text == "random") {
        return TieRule::random;
    }
    throw Error(ErrorKind::invalid_argument, "tie rule must be strict or random, got '" + std::string(text) + "'");
}

SplitRule parse_split_rule(std::string_view text) {
    if (text == "balanced") {
        return SplitRule::balanced;
    }
    if (text == "ceiling") {
        return SplitRule::ceiling;
    }
    throw Error(ErrorKind::invalid_argument, "split rule must be balanced or ceiling, got '" + std::string(text) + "'");
}

std::vector<size_t> split_copies(size_t copies, size_t num_keys, SplitRule rule) {
    if (num_keys == 0) {
        throw Error(ErrorKind::invalid_argument, "at least one key is required");
    }
    std::vector<size_t> shares(num_keys, copies / num_keys);
    if (rule == SplitRule::ceiling) {
        std::fill(shares.begin(), shares.end(), (copies + num_keys - 1) / num_keys);
    } else {
        for (size_t i = 0; i < copies % num_keys; i++) {
            shares[i]++;
        }
    }
    return shares;
}

std::optional<size_t> majority_decode(std::span<const size_t> tallies, TieRule rule, Rng *rng) {
    if (tallies.empty()) {
        throw Error(ErrorKind::invalid_argument, "no outcomes to decode");
    }
    size_t best = *std::max_element(tallies.begin(), tallies.end());
    if (best == 0) {
        throw Error(ErrorKind::invalid_argument, "majority vote over zero copies");
    }
    std::vector<size_t> top;
    for (size_t i = 0; i < tallies.size(); i++) {
        if (tallies[i] == best) {
            top.push_back(i);
        }
    }
    if (top.size() == 1) {
        return top[0];
    }
    if (rule == TieRule::strict) {
        return std::nullopt;
    }
    if (!rng) {
        throw Error(ErrorKind::invalid_argument, "random tie-break needs an rng");
    }
    return top[std::min(top.size() - 1, static_cast<size_t>(uniform01(*rng) * static_cast<double>(top.size())))];
}

MeasurementRecord ReceivedCopy::measure(const MeasurementBasis &basis, Rng &rng) && {
    if (!state_) {
        throw Error(ErrorKind::protocol_error, "copy was already measured");
    }
    MeasurementRecord record = qpdb::measure(*state_, basis, rng);
    state_.reset();
    return record;
}

NoiselessTargets noiseless_targets(const EncodedDatabase &db) {
    NoiselessTargets t;
    const std::vector<Mub> &family = mub_family(db.info.num_qubits);
    for (const QracEncoding &block : db.blocks) {
        std::vector<QuantumState> rows;
        for (const QracTarget &target : block.targets) {
            rows.push_back(family[target.mub_id - 1].state_for_label(target.bits));
        }
        t.per_block.push_back(std::move(rows));
    }
    return t;
}

AliceServer::AliceServer(StateTable table, uint32_t copies, ByteChannel &channel)
    : table_(std::move(table)), copies_(copies), channel_(channel) {
    if (copies == 0) {
        throw Error(ErrorKind::invalid_argument, "query limit k must be positive");
    }
    if (table_.blocks.size() != table_.info.num_blocks()) {
        throw Error(ErrorKind::dimension_mismatch, "state table has the wrong number of blocks");
    }
    key_basis_mapping(table_.info.keys, table_.info.num_qubits);
}

AliceServer::AliceServer(const EncodedDatabase &db, uint32_t copies, ByteChannel &channel, NoiselessTargets debug)
    : AliceServer(db.state_table(), copies, channel) {
    if (debug.per_block.size() != table_.blocks.size()) {
        throw Error(ErrorKind::dimension_mismatch, "debug targets have the wrong number of blocks");
    }
    debug_ = std::move(debug);
}

size_t AliceServer::messages_per_block() const {
    return debug_ ? copies_ * table_.info.num_rows() : copies_;
}

void AliceServer::send_header() {
    if (stage_ != 0) {
        throw Error(ErrorKind::protocol_error, "header already sent");
    }
    const SessionInfo &info = table_.info;
    SessionHeader h{static_cast<uint8_t>(info.num_qubits), static_cast<uint16_t>(info.num_rows()),
                    static_cast<uint32_t>(info.num_bits),  copies_,
                    static_cast<uint32_t>(info.num_blocks()), info.keys};
    send_frame(channel_, {MessageType::session_header, encode_header(h)}, &transcript_);
    stage_ = 1;
}

void AliceServer::await_ack() {
    if (stage_ != 1) {
        throw Error(ErrorKind::protocol_error, "await_ack before send_header");
    }
    Frame f = receive_frame(channel_, &transcript_);
    if (f.type != MessageType::ack || !f.payload.empty()) {
        throw Error(ErrorKind::protocol_error, "expected an empty Ack, got " + std::string(message_type_name(f.type)));
    }
    stage_ = 2;
}

void AliceServer::transmit() {
    if (stage_ != 2) {
        throw Error(ErrorKind::protocol_error, "transmit before the handshake completed");
    }
    for (size_t b = 0; b < table_.blocks.size(); b++) {
        auto block = static_cast<uint32_t>(b);
        if (debug_) {
            const std::vector<QuantumState> &rows = debug_->per_block[b];
            for (size_t r = 0; r < rows.size(); r++) {
                for (uint32_t j = 0; j < copies_; j++) {
                    auto copy = static_cast<uint32_t>(r * copies_ + j);
                    send_frame(channel_, {MessageType::state_copy, encode_state_copy(block, copy, rows[r].amplitudes())},
                               &transcript_);
                }
            }
            continue;
        }
        // Every copy of a block is byte-identical, so encode once.
        std::vector<uint8_t> payload = encode_state_copy(block, 0, table_.blocks[b].amplitudes());
        for (uint32_t j = 0; j < copies_; j++) {
            payload[4] = static_cast<uint8_t>(j);
            payload[5] = static_cast<uint8_t>(j >> 8);
            payload[6] = static_cast<uint8_t>(j >> 16);
            payload[7] = static_cast<uint8_t>(j >> 24);
            send_frame(channel_, {MessageType::state_copy, payload}, &transcript_);
        }
    }
    send_frame(channel_, {MessageType::end_of_transmission, {}}, &transcript_);
    channel_.close();
    stage_ = 3;
}

void AliceServer::serve() {
    send_header();
    await_ack();
    transmit();
}

BobClient::BobClient(ByteChannel &channel, BobOptions options, Rng &rng)
    : channel_(channel), options_(std::move(options)), rng_(rng) {
    std::set<std::string> unique(options_.keys.begin(), options_.keys.end());
    if (unique.empty()) {
        throw Error(ErrorKind::invalid_argument, "choose at least one key");
    }
    if (unique.size() != options_.keys.size()) {
        throw Error(ErrorKind::invalid_argument, "chosen keys repeat");
    }
    result_.chosen_keys.assign(unique.begin(), unique.end());
}

const SessionInfo &BobClient::receive_header() {
    if (stage_ != 0) {
        throw Error(ErrorKind::protocol_error, "header already received");
    }
    Frame f = receive_frame(channel_);
    if (f.type != MessageType::session_header) {
        throw Error(ErrorKind::protocol_error, "expected SessionHeader, got " + std::string(message_type_name(f.type)));
    }
    SessionHeader h = decode_header(f.payload);
    if (h.num_qubits < 1 || h.num_qubits > 2 || h.copies == 0 || h.num_bits == 0) {
        throw Error(ErrorKind::protocol_error, "session header has invalid parameters");
    }
    info_.num_qubits = h.num_qubits;
    info_.num_bits = h.num_bits;
    // Bob recomputes the key order himself rather than trusting the sender's.
    std::map<std::string, size_t> mapping = key_basis_mapping(h.keys, h.num_qubits);
    for (const auto &[key, id] : mapping) {
        info_.keys.push_back(key);
    }
    if (h.num_blocks != info_.num_blocks()) {
        throw Error(ErrorKind::protocol_error, "header block count is not ceil(C/n)");
    }
    copies_ = h.copies;

    size_t m = result_.chosen_keys.size();
    if (m > info_.num_rows()) {
        throw Error(ErrorKind::invalid_argument, "M exceeds the number of rows");
    }
    for (const std::string &key : result_.chosen_keys) {
        key_rows_.push_back(info_.mub_id(key) - 1);
    }
    size_t per_block = options_.noiseless_debug ? size_t{copies_} * info_.num_rows() : copies_;
    owner_.assign(per_block, SIZE_MAX);
    if (options_.noiseless_debug) {
        result_.shares.assign(m, copies_);
        for (size_t i = 0; i < m; i++) {
            std::fill_n(owner_.begin() + static_cast<std::ptrdiff_t>(key_rows_[i] * copies_), copies_, i);
        }
    } else {
        result_.shares = split_copies(copies_, m);
        size_t c = 0;
        for (size_t i = 0; i < m; i++) {
            for (size_t j = 0; j < result_.shares[i]; j++) {
                owner_[c++] = i;
            }
        }
    }
    size_t dim = size_t{1} << info_.num_qubits;
    result_.tallies.assign(m, std::vector<std::vector<size_t>>(info_.num_blocks(), std::vector<size_t>(dim, 0)));
    result_.fragment_bits.assign(m, std::string());
    result_.tie_failures.assign(m, 0);
    seen_.assign(info_.num_blocks(), std::vector<bool>(per_block, false));

    send_frame(channel_, {MessageType::ack, {}});
    stage_ = 1;
    return info_;
}

void BobClient::handle_copy(ReceivedCopy copy) {
    size_t owner = owner_[copy.copy()];
    if (owner == SIZE_MAX) {
        return;  // not addressed to any chosen key; discarded unmeasured
    }
    const Mub &mub = mub_family(info_.num_qubits)[key_rows_[owner]];
    MeasurementRecord record = std::move(copy).measure(mub.basis, rng_);
    result_.tallies[owner][copy.block()][record.outcome_index]++;
}

void BobClient::receive_states() {
    if (stage_ != 1) {
        throw Error(ErrorKind::protocol_error, "receive_states before the header");
    }
    size_t dim = size_t{1} << info_.num_qubits;
    size_t expected_len = 8 + 16 * dim;
    for (;;) {
        Frame f = receive_frame(channel_);
        if (f.type == MessageType::end_of_transmission) {
            if (!f.payload.empty()) {
                throw Error(ErrorKind::protocol_error, "EndOfTransmission carries a payload");
            }
            break;
        }
        if (f.type != MessageType::state_copy) {
            throw Error(ErrorKind::protocol_error, "unexpected " + std::string(message_type_name(f.type)));
        }
        if (f.payload.size() != expected_len) {
            throw Error(ErrorKind::protocol_error, "StateCopy payload has " + std::to_string(f.payload.size()) +
                                                       " bytes, expected " + std::to_string(expected_len));
        }
        uint32_t block = get_u32(&f.payload[0]);
        uint32_t copy = get_u32(&f.payload[4]);
        if (block >= seen_.size() || copy >= owner_.size()) {
            throw Error(ErrorKind::protocol_error, "StateCopy index out of range");
        }
        if (seen_[block][copy]) {
            throw Error(ErrorKind::protocol_error, "duplicate StateCopy");
        }
        seen_[block][copy] = true;
        Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < dim; i++) {
            amps[static_cast<Eigen::Index>(i)] = Complex(get_f64(&f.payload[8 + 16 * i]), get_f64(&f.payload[16 + 16 * i]));
        }
        QuantumState state = [&] {
            try {
                return QuantumState(info_.num_qubits, std::move(amps));
            } catch (const Error &e) {
                throw Error(ErrorKind::protocol_error, std::string("invalid state payload: ") + e.what());
            }
        }();
        handle_copy(ReceivedCopy(block, copy, std::move(state)));
    }
    for (const std::vector<bool> &block : seen_) {
        if (std::find(block.begin(), block.end(), false) != block.end()) {
            throw Error(ErrorKind::protocol_error, "transmission ended with copies missing");
        }
    }
    finish();
    stage_ = 2;
}

void BobClient::finish() {
    size_t n = info_.num_qubits;
    for (size_t i = 0; i < result_.chosen_keys.size(); i++) {
        std::string bits;
        for (size_t b = 0; b < info_.num_blocks(); b++) {
            std::optional<size_t> guess = majority_decode(result_.tallies[i][b], options_.tie_rule, &rng_);
            if (guess) {
                bits += index_to_bits(*guess, n);
            } else {
                bits += std::string(n, '?');
                result_.tie_failures[i]++;
            }
        }
        bits.resize(info_.num_bits);  // drop pad bits
        result_.fragment_bits[i] = std::move(bits);
    }
}

QueryResult BobClient::query() {
    receive_header();
    receive_states();
    return result_;
}

SessionOutcome run_local_session(const StateTable &table, uint32_t copies, const BobOptions &options, Rng &rng) {
    auto [alice_end, bob_end] = make_memory_pipe();
    AliceServer alice(table, copies, *alice_end);
    BobClient bob(*bob_end, options, rng);
    alice.send_header();
    bob.receive_header();
    alice.await_ack();
    alice.transmit();
    bob.receive_states();
    return {bob.result(), alice.transcript()};
}

SessionOutcome run_local_debug_session(const EncodedDatabase &db, uint32_t copies, BobOptions options, Rng &rng) {
    options.noiseless_debug = true;
    auto [alice_end, bob_end] = make_memory_pipe();
    AliceServer alice(db, copies, *alice_end, noiseless_targets(db));
    BobClient bob(*bob_end, options, rng);
    alice.send_header();
    bob.receive_header();
    alice.await_ack();
    alice.transmit();
    bob.receive_states();
    return {bob.result(), alice.transcript()};
}

}  // namespace qpdb
