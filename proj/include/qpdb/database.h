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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qpdb/qrac.h"
#include "qpdb/state.h"

namespace qpdb {

enum class ColumnEncoding {
    integer,  // unsigned decimal
    ascii,    // 7 bits per character, NUL padded; width must be a multiple of 7
    enumeration,  // index into a declared value list
};

/// One line of the width-declaration sidecar:
///   <column> <width> [int|ascii|enum <value>...]
struct ColumnSpec {
    std::string name;
    size_t width = 0;
    ColumnEncoding encoding = ColumnEncoding::integer;
    std::vector<std::string> values;  // enum only
};

/// R rows of C payload bits, keyed by the first column of the table.
struct DatabaseSpec {
    std::vector<std::string> keys;
    std::vector<std::string> payloads;  // '0'/'1' characters, MSB first per column
    std::vector<ColumnSpec> columns;
    size_t num_bits = 0;                // C

    size_t num_rows() const {
        return keys.size();
    }
};

std::vector<ColumnSpec> parse_widths(std::istream &in);

/// Reads comma-separated rows with a header line. The first column is the
/// key; every other column must be declared in `columns` and vice versa.
DatabaseSpec parse_database(std::istream &table, std::vector<ColumnSpec> columns);
DatabaseSpec load_database(const std::filesystem::path &table, const std::filesystem::path &widths);

/// Packs one row's column values in declaration order.
std::string encode_row(std::span<const ColumnSpec> columns, std::span<const std::string> values);
/// Inverse of encode_row for a full C-bit payload.
std::vector<std::string> decode_row(std::span<const ColumnSpec> columns, std::string_view bits);

/// Keys sorted by byte value, mapped to MUB ids 1..R. Throws if
/// R > 2^n + 1 or a key repeats.
std::map<std::string, size_t> key_basis_mapping(std::span<const std::string> keys, size_t num_qubits);

inline size_t block_count(size_t num_bits, size_t num_qubits) {
    return (num_bits + num_qubits - 1) / num_qubits;
}

/// Bits i*n .. i*n+n-1 of a payload, zero padded past the end.
std::string block_bits(std::string_view payload, size_t block, size_t num_qubits);

/// The public part of a session: what Alice announces and Bob can rely on.
struct SessionInfo {
    size_t num_qubits = 0;
    size_t num_bits = 0;            // C
    std::vector<std::string> keys;  // sorted; key i uses MUB i+1

    size_t num_rows() const {
        return keys.size();
    }
    size_t num_blocks() const {
        return block_count(num_bits, num_qubits);
    }
    /// 1-based MUB id of a key; throws for unknown keys.
    size_t mub_id(std::string_view key) const;
};

/// Block states only: what Alice needs to serve and what the .qpdb file holds.
struct StateTable {
    SessionInfo info;
    std::vector<QuantumState> blocks;
};

/// Full encoder output, keeping the QRAC targets alongside the states.
struct EncodedDatabase {
    SessionInfo info;
    std::vector<QracEncoding> blocks;
    std::vector<std::string> payloads;  // in info.keys order

    StateTable state_table() const;
};

EncodedDatabase encode_database(const DatabaseSpec &db, size_t num_qubits,
                                QracObjective objective = QracObjective::average_fidelity);

/// "QPDB", version byte, the session header fields (k stored as 0), then
/// 2^n (re, im) little-endian doubles per block.
void write_state_table(std::ostream &out, const StateTable &table);
StateTable read_state_table(std::istream &in);
void save_state_table(const std::filesystem::path &path, const StateTable &table);
StateTable load_state_table(const std::filesystem::path &path);

inline constexpr uint8_t kStateTableVersion = 1;

}  // namespace qpdb
