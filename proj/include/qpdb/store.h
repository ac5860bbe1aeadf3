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
#include <span>
#include <string>
#include <vector>

#include "qpdb/tableau.h"

namespace qpdb {

/// Normative schema for persisted generators (PostgreSQL dialect).
inline constexpr const char *kGeneratorsDdl = R"sql(CREATE TABLE generators (
    circ_id BIGINT,
    g_idx   SMALLINT,
    n       SMALLINT,
    flags   VARBIT NOT NULL,
    neg     BOOLEAN,
    PRIMARY KEY (circ_id, g_idx),
    CHECK (bit_length(flags) = 2 * n)
);)sql";

/// One row of the generators table. flags holds 2n '0'/'1' characters,
/// x-flags for qubits 0..n-1 followed by z-flags.
struct GeneratorRecord {
    int64_t circ_id = 0;
    int16_t g_idx = 0;
    int16_t n = 0;
    std::string flags;
    bool neg = false;

    bool operator==(const GeneratorRecord &) const = default;
};

/// One record per generator, in tableau order. Invalid tableaux are rejected.
std::vector<GeneratorRecord> export_store(std::span<const Tableau> tableaux);

/// Inverse of export_store. Enforces the flag-length check, the
/// (circ_id, g_idx) key, contiguous generator indices and tableau validity.
/// Tableaux come back in order of first appearance.
std::vector<Tableau> import_store(std::span<const GeneratorRecord> records);

/// CSV text form: header "circ_id,g_idx,n,flags,neg", neg as true/false.
void write_csv(std::ostream &out, std::span<const GeneratorRecord> records);
std::vector<GeneratorRecord> read_csv(std::istream &in);

/// Single-file SQLite store using the schema above, with flags kept as a
/// '0'/'1' TEXT column and the length check expressed on that text.
void write_sqlite(const std::filesystem::path &path, std::span<const GeneratorRecord> records);
std::vector<GeneratorRecord> read_sqlite(const std::filesystem::path &path);

/// Chooses CSV for a ".csv" extension and SQLite otherwise.
void save_store(const std::filesystem::path &path, std::span<const Tableau> tableaux);
std::vector<Tableau> load_store(const std::filesystem::path &path);

}  // namespace qpdb
