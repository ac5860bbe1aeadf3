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

#include "qpdb/database.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qpdb/error.h"
#include "qpdb/wire.h"

namespace qpdb {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Comma-separated fields; double quotes protect commas, "" is a literal quote.
std::vector<std::string> split_csv_line(const std::string &line, size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (size_t i = 0; i < line.size(); i++) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                i++;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(was_quoted ? field : trim(field));
    return fields;
}

std::string to_bits(uint64_t value, size_t width) {
    std::string out(width, '0');
    for (size_t i = 0; i < width && i < 64; i++) {
        if (value >> i & 1) {
            out[width - 1 - i] = '1';
        }
    }
    return out;
}

uint64_t from_bits(std::string_view bits) {
    uint64_t v = 0;
    for (char c : bits) {
        v = v << 1 | (c == '1');
    }
    return v;
}

std::string encode_value(const ColumnSpec &col, const std::string &value) {
    auto overflow = [&] {
        return Error(ErrorKind::constraint_violation,
                     "value '" + value + "' does not fit column " + col.name + " (" + std::to_string(col.width) +
                         " bits)");
    };
    switch (col.encoding) {
        case ColumnEncoding::integer: {
            uint64_t v = 0;
            auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (value.empty() || end != value.data() + value.size()) {
                throw Error(ErrorKind::parse_error, "column " + col.name + ": '" + value + "' is not an unsigned integer");
            }
            if (ec == std::errc::result_out_of_range || (col.width < 64 && v >> col.width != 0)) {
                throw overflow();
            }
            return to_bits(v, col.width);
        }
        case ColumnEncoding::ascii: {
            if (value.size() * 7 > col.width) {
                throw overflow();
            }
            std::string out;
            for (unsigned char c : value) {
                if (c > 127) {
                    throw Error(ErrorKind::constraint_violation, "column " + col.name + ": non-ASCII byte in '" + value + "'");
                }
                out += to_bits(c, 7);
            }
            out.resize(col.width, '0');
            return out;
        }
        case ColumnEncoding::enumeration: {
            auto it = std::find(col.values.begin(), col.values.end(), value);
            if (it == col.values.end()) {
                throw Error(ErrorKind::constraint_violation, "column " + col.name + ": '" + value + "' is not a declared value");
            }
            return to_bits(static_cast<uint64_t>(it - col.values.begin()), col.width);
        }
    }
    throw Error(ErrorKind::invalid_argument, "unknown column encoding");
}

std::string decode_value(const ColumnSpec &col, std::string_view bits) {
    switch (col.encoding) {
        case ColumnEncoding::integer:
            return std::to_string(from_bits(bits));
        case ColumnEncoding::ascii: {
            std::string out;
            for (size_t i = 0; i + 7 <= bits.size(); i += 7) {
                out += static_cast<char>(from_bits(bits.substr(i, 7)));
            }
            while (!out.empty() && out.back() == '\0') {
                out.pop_back();
            }
            return out;
        }
        case ColumnEncoding::enumeration: {
            uint64_t idx = from_bits(bits);
            return idx < col.values.size() ? col.values[idx] : "#" + std::to_string(idx);
        }
    }
    return {};
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io_error, "cannot open " + path.string());
    }
    return in;
}

}  // namespace

std::vector<ColumnSpec> parse_widths(std::istream &in) {
    std::vector<ColumnSpec> columns;
    std::set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        std::string text = trim(line.substr(0, line.find('#')));
        if (text.empty()) {
            continue;
        }
        std::istringstream words(text);
        ColumnSpec col;
        std::string width, kind;
        words >> col.name >> width;
        auto [end, ec] = std::from_chars(width.data(), width.data() + width.size(), col.width);
        if (width.empty() || ec != std::errc() || end != width.data() + width.size() || col.width == 0 ||
            col.width > 64 * 64) {
            throw Error(ErrorKind::parse_error, "widths line " + std::to_string(line_no) + ": bad width '" + width + "'");
        }
        if (words >> kind) {
            if (kind == "int") {
                col.encoding = ColumnEncoding::integer;
            } else if (kind == "ascii") {
                col.encoding = ColumnEncoding::ascii;
            } else if (kind == "enum") {
                col.encoding = ColumnEncoding::enumeration;
            } else {
                throw Error(ErrorKind::parse_error, "widths line " + std::to_string(line_no) + ": unknown type '" + kind + "'");
            }
        }
        for (std::string v; words >> v;) {
            col.values.push_back(v);
        }
        if (col.encoding == ColumnEncoding::integer && col.width > 64) {
            throw Error(ErrorKind::parse_error, "column " + col.name + ": integer columns hold at most 64 bits");
        }
        if (col.encoding == ColumnEncoding::ascii && col.width % 7 != 0) {
            throw Error(ErrorKind::parse_error, "column " + col.name + ": ascii width must be a multiple of 7");
        }
        if (col.encoding == ColumnEncoding::enumeration &&
            (col.values.empty() || (col.width < 64 && col.values.size() > (uint64_t{1} << col.width)))) {
            throw Error(ErrorKind::parse_error, "column " + col.name + ": enum values do not fit the width");
        }
        if (col.encoding != ColumnEncoding::enumeration && !col.values.empty()) {
            throw Error(ErrorKind::parse_error, "widths line " + std::to_string(line_no) + ": trailing words");
        }
        if (!seen.insert(col.name).second) {
            throw Error(ErrorKind::parse_error, "column " + col.name + " declared twice");
        }
        columns.push_back(std::move(col));
    }
    if (columns.empty()) {
        throw Error(ErrorKind::parse_error, "no column widths declared");
    }
    return columns;
}

std::string encode_row(std::span<const ColumnSpec> columns, std::span<const std::string> values) {
    if (values.size() != columns.size()) {
        throw Error(ErrorKind::dimension_mismatch, "row has " + std::to_string(values.size()) + " values for " +
                                                       std::to_string(columns.size()) + " columns");
    }
    std::string bits;
    for (size_t i = 0; i < columns.size(); i++) {
        bits += encode_value(columns[i], values[i]);
    }
    return bits;
}

std::vector<std::string> decode_row(std::span<const ColumnSpec> columns, std::string_view bits) {
    std::vector<std::string> values;
    size_t pos = 0;
    for (const ColumnSpec &col : columns) {
        if (pos + col.width > bits.size()) {
            throw Error(ErrorKind::dimension_mismatch, "payload shorter than the declared columns");
        }
        values.push_back(decode_value(col, bits.substr(pos, col.width)));
        pos += col.width;
    }
    return values;
}

DatabaseSpec parse_database(std::istream &table, std::vector<ColumnSpec> columns) {
    std::string line;
    size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(table, line)) {
        line_no++;
        if (!trim(line).empty()) {
            header = split_csv_line(line, line_no);
        }
    }
    if (header.size() < 2) {
        throw Error(ErrorKind::parse_error, "table needs a header with a key column and at least one data column");
    }
    // Position of each declared column in the table.
    std::vector<size_t> position;
    for (const ColumnSpec &col : columns) {
        auto it = std::find(header.begin() + 1, header.end(), col.name);
        if (it == header.end()) {
            throw Error(ErrorKind::parse_error, "declared column " + col.name + " is missing from the table");
        }
        position.push_back(static_cast<size_t>(it - header.begin()));
    }
    for (size_t i = 1; i < header.size(); i++) {
        if (std::none_of(columns.begin(), columns.end(), [&](const ColumnSpec &c) { return c.name == header[i]; })) {
            throw Error(ErrorKind::parse_error, "column " + header[i] + " has no declared width");
        }
    }

    DatabaseSpec db;
    for (const ColumnSpec &col : columns) {
        db.num_bits += col.width;
    }
    std::set<std::string> seen;
    while (std::getline(table, line)) {
        line_no++;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> fields = split_csv_line(line, line_no);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(header.size()) + " fields, got " +
                                                    std::to_string(fields.size()));
        }
        if (!seen.insert(fields[0]).second) {
            throw Error(ErrorKind::constraint_violation, "duplicate key '" + fields[0] + "'");
        }
        std::vector<std::string> values;
        for (size_t p : position) {
            values.push_back(fields[p]);
        }
        db.keys.push_back(fields[0]);
        db.payloads.push_back(encode_row(columns, values));
    }
    if (db.keys.empty()) {
        throw Error(ErrorKind::constraint_violation, "database has no rows");
    }
    db.columns = std::move(columns);
    return db;
}

DatabaseSpec load_database(const std::filesystem::path &table, const std::filesystem::path &widths) {
    std::ifstream w = open_input(widths);
    std::vector<ColumnSpec> columns = parse_widths(w);
    std::ifstream t = open_input(table);
    return parse_database(t, std::move(columns));
}

std::map<std::string, size_t> key_basis_mapping(std::span<const std::string> keys, size_t num_qubits) {
    if (num_qubits == 0 || num_qubits > 2) {
        throw Error(ErrorKind::unsupported, "key mapping needs n = 1 or 2");
    }
    size_t limit = (size_t{1} << num_qubits) + 1;
    if (keys.empty() || keys.size() > limit) {
        throw Error(ErrorKind::constraint_violation, std::to_string(keys.size()) + " keys but n=" +
                                                         std::to_string(num_qubits) + " allows 1.." +
                                                         std::to_string(limit));
    }
    std::vector<std::string> sorted(keys.begin(), keys.end());
    std::sort(sorted.begin(), sorted.end());  // std::string compares bytes as unsigned
    std::map<std::string, size_t> mapping;
    for (size_t i = 0; i < sorted.size(); i++) {
        if (!mapping.emplace(sorted[i], i + 1).second) {
            throw Error(ErrorKind::constraint_violation, "duplicate key '" + sorted[i] + "'");
        }
    }
    return mapping;
}

std::string block_bits(std::string_view payload, size_t block, size_t num_qubits) {
    std::string out(num_qubits, '0');
    for (size_t j = 0; j < num_qubits; j++) {
        size_t pos = block * num_qubits + j;
        if (pos < payload.size()) {
            out[j] = payload[pos];
        }
    }
    return out;
}

size_t SessionInfo::mub_id(std::string_view key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) {
        throw Error(ErrorKind::invalid_argument, "unknown key '" + std::string(key) + "'");
    }
    return static_cast<size_t>(it - keys.begin()) + 1;
}

StateTable EncodedDatabase::state_table() const {
    StateTable t{info, {}};
    for (const QracEncoding &b : blocks) {
        t.blocks.push_back(b.state);
    }
    return t;
}

EncodedDatabase encode_database(const DatabaseSpec &db, size_t num_qubits, QracObjective objective) {
    std::map<std::string, size_t> mapping = key_basis_mapping(db.keys, num_qubits);
    if (db.payloads.size() != db.keys.size()) {
        throw Error(ErrorKind::dimension_mismatch, "payload count differs from key count");
    }
    EncodedDatabase enc;
    enc.info.num_qubits = num_qubits;
    enc.info.num_bits = db.num_bits;
    enc.payloads.resize(db.keys.size());
    for (const auto &[key, id] : mapping) {
        enc.info.keys.push_back(key);
    }
    for (size_t r = 0; r < db.keys.size(); r++) {
        if (db.payloads[r].size() != db.num_bits) {
            throw Error(ErrorKind::dimension_mismatch, "row '" + db.keys[r] + "' is not " +
                                                           std::to_string(db.num_bits) + " bits");
        }
        enc.payloads[mapping.at(db.keys[r]) - 1] = db.payloads[r];
    }
    for (size_t b = 0; b < enc.info.num_blocks(); b++) {
        std::vector<QracTarget> targets;
        for (size_t r = 0; r < enc.info.num_rows(); r++) {
            targets.push_back({r + 1, block_bits(enc.payloads[r], b, num_qubits)});
        }
        enc.blocks.push_back(encode_qrac(num_qubits, std::move(targets), objective));
    }
    return enc;
}

void write_state_table(std::ostream &out, const StateTable &table) {
    const SessionInfo &info = table.info;
    if (table.blocks.size() != info.num_blocks()) {
        throw Error(ErrorKind::dimension_mismatch, "state table block count mismatch");
    }
    std::vector<uint8_t> bytes = {'Q', 'P', 'D', 'B', kStateTableVersion};
    SessionHeader h{static_cast<uint8_t>(info.num_qubits), static_cast<uint16_t>(info.num_rows()),
                    static_cast<uint32_t>(info.num_bits),  0,
                    static_cast<uint32_t>(info.num_blocks()), info.keys};
    std::vector<uint8_t> header = encode_header(h);
    bytes.insert(bytes.end(), header.begin(), header.end());
    for (const QuantumState &s : table.blocks) {
        for (Eigen::Index i = 0; i < s.amplitudes().size(); i++) {
            put_f64(bytes, s.amplitudes()[i].real());
            put_f64(bytes, s.amplitudes()[i].imag());
        }
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorKind::io_error, "failed to write state table");
    }
}

StateTable read_state_table(std::istream &in) {
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 5 || std::string(bytes.begin(), bytes.begin() + 4) != "QPDB") {
        throw Error(ErrorKind::parse_error, "not a QPDB state file");
    }
    if (bytes[4] != kStateTableVersion) {
        throw Error(ErrorKind::unsupported, "unsupported QPDB version " + std::to_string(bytes[4]));
    }
    size_t used = 0;
    SessionHeader h = decode_header(std::span(bytes).subspan(5), &used);
    StateTable t;
    t.info.num_qubits = h.num_qubits;
    t.info.num_bits = h.num_bits;
    t.info.keys = h.keys;
    if (h.num_qubits < 1 || h.num_qubits > 2 || h.num_bits == 0 || h.num_blocks != t.info.num_blocks() ||
        !std::is_sorted(h.keys.begin(), h.keys.end())) {
        throw Error(ErrorKind::parse_error, "inconsistent QPDB header");
    }
    key_basis_mapping(h.keys, h.num_qubits);
    size_t dim = size_t{1} << h.num_qubits;
    size_t pos = 5 + used;
    if (bytes.size() - pos != h.num_blocks * dim * 16) {
        throw Error(ErrorKind::parse_error, "QPDB amplitude section has the wrong size");
    }
    for (size_t b = 0; b < h.num_blocks; b++) {
        Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < dim; i++, pos += 16) {
            amps[static_cast<Eigen::Index>(i)] = Complex(get_f64(&bytes[pos]), get_f64(&bytes[pos + 8]));
        }
        t.blocks.emplace_back(h.num_qubits, std::move(amps));
    }
    return t;
}

void save_state_table(const std::filesystem::path &path, const StateTable &table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::io_error, "cannot write " + path.string());
    }
    write_state_table(out, table);
}

StateTable load_state_table(const std::filesystem::path &path) {
    std::ifstream in = open_input(path);
    return read_state_table(in);
}

}  // namespace qpdb
