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

#include "qpdb/store.h"

#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <sqlite3.h>

#include "qpdb/error.h"

namespace qpdb {

namespace {

std::string flags_text(const GeneratorRow &row) {
    std::string s;
    for (bool b : row.x) {
        s += b ? '1' : '0';
    }
    for (bool b : row.z) {
        s += b ? '1' : '0';
    }
    return s;
}

[[noreturn]] void violation(const std::string &message) {
    throw Error(ErrorKind::constraint_violation, message);
}

std::string key_text(const GeneratorRecord &r) {
    return "(" + std::to_string(r.circ_id) + ", " + std::to_string(r.g_idx) + ")";
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

template <typename Int>
Int parse_int(const std::string &text, const char *column) {
    try {
        size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size() || v < std::numeric_limits<Int>::min() || v > std::numeric_limits<Int>::max()) {
            throw std::out_of_range(column);
        }
        return static_cast<Int>(v);
    } catch (const std::logic_error &) {
        throw Error(ErrorKind::parse_error, std::string("bad ") + column + " value '" + text + "'");
    }
}

bool parse_bool(const std::string &text) {
    if (text == "true" || text == "t" || text == "1" || text == "TRUE") {
        return true;
    }
    if (text == "false" || text == "f" || text == "0" || text == "FALSE") {
        return false;
    }
    throw Error(ErrorKind::parse_error, "bad neg value '" + text + "'");
}

struct SqliteCloser {
    void operator()(sqlite3 *db) const {
        sqlite3_close(db);
    }
};
struct StmtCloser {
    void operator()(sqlite3_stmt *s) const {
        sqlite3_finalize(s);
    }
};
using SqliteDb = std::unique_ptr<sqlite3, SqliteCloser>;
using SqliteStmt = std::unique_ptr<sqlite3_stmt, StmtCloser>;

SqliteDb open_db(const std::filesystem::path &path, int flags) {
    sqlite3 *raw = nullptr;
    int rc = sqlite3_open_v2(path.c_str(), &raw, flags, nullptr);
    SqliteDb db(raw);
    if (rc != SQLITE_OK) {
        throw Error(ErrorKind::io_error, "cannot open store " + path.string() + ": " +
                                             (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)));
    }
    sqlite3_busy_timeout(raw, 5000);
    return db;
}

void exec(sqlite3 *db, const char *sql) {
    char *err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string message = err ? err : "unknown error";
        sqlite3_free(err);
        throw Error(ErrorKind::io_error, "sqlite: " + message);
    }
}

SqliteStmt prepare(sqlite3 *db, const char *sql) {
    sqlite3_stmt *raw = nullptr;
    if (sqlite3_prepare_v2(db, sql, -1, &raw, nullptr) != SQLITE_OK) {
        throw Error(ErrorKind::io_error, std::string("sqlite: ") + sqlite3_errmsg(db));
    }
    return SqliteStmt(raw);
}

// SQLite has no VARBIT; flags are a TEXT bit string with the same length check.
constexpr const char *kSqliteDdl = R"sql(CREATE TABLE IF NOT EXISTS generators (
    circ_id INTEGER NOT NULL,
    g_idx   INTEGER NOT NULL CHECK (g_idx BETWEEN -32768 AND 32767),
    n       INTEGER NOT NULL CHECK (n BETWEEN -32768 AND 32767),
    flags   TEXT NOT NULL CHECK (flags NOT GLOB '*[^01]*'),
    neg     INTEGER NOT NULL CHECK (neg IN (0, 1)),
    PRIMARY KEY (circ_id, g_idx),
    CHECK (length(flags) = 2 * n)
);)sql";

}  // namespace

std::vector<GeneratorRecord> export_store(std::span<const Tableau> tableaux) {
    std::vector<GeneratorRecord> out;
    std::set<int64_t> seen;
    for (const Tableau &t : tableaux) {
        TableauReport report = validate_tableau(t);
        if (!report.ok()) {
            throw Error(ErrorKind::invalid_tableau, "tableau " + std::to_string(t.circ_id) + ": " + report.message);
        }
        if (!seen.insert(t.circ_id).second) {
            violation("duplicate circ_id " + std::to_string(t.circ_id));
        }
        if (t.num_qubits > 32767) {
            violation("n does not fit a SMALLINT");
        }
        for (size_t g = 0; g < t.rows.size(); g++) {
            out.push_back(GeneratorRecord{t.circ_id, static_cast<int16_t>(g), static_cast<int16_t>(t.num_qubits),
                                          flags_text(t.rows[g]), t.rows[g].negative});
        }
    }
    return out;
}

std::vector<Tableau> import_store(std::span<const GeneratorRecord> records) {
    std::vector<int64_t> order;
    std::map<int64_t, std::map<int16_t, const GeneratorRecord *>> grouped;
    for (const GeneratorRecord &r : records) {
        if (r.n <= 0) {
            violation("row " + key_text(r) + " has non-positive n");
        }
        if (r.flags.size() != 2 * static_cast<size_t>(r.n)) {
            violation("row " + key_text(r) + ": bit_length(flags) = " + std::to_string(r.flags.size()) +
                      " but 2 * n = " + std::to_string(2 * r.n));
        }
        if (r.flags.find_first_not_of("01") != std::string::npos) {
            violation("row " + key_text(r) + ": flags must be a bit string");
        }
        auto [group, fresh] = grouped.try_emplace(r.circ_id);
        if (fresh) {
            order.push_back(r.circ_id);
        }
        if (!group->second.emplace(r.g_idx, &r).second) {
            violation("duplicate primary key " + key_text(r));
        }
    }

    std::vector<Tableau> out;
    for (int64_t id : order) {
        const auto &rows = grouped.at(id);
        Tableau t{id, static_cast<size_t>(rows.begin()->second->n), {}};
        int16_t expected = 0;
        for (const auto &[g_idx, r] : rows) {
            if (g_idx != expected++) {
                violation("circuit " + std::to_string(id) + " has non-contiguous g_idx values");
            }
            if (static_cast<size_t>(r->n) != t.num_qubits) {
                violation("circuit " + std::to_string(id) + " mixes different n");
            }
            GeneratorRow row;
            for (size_t q = 0; q < t.num_qubits; q++) {
                row.x.push_back(r->flags[q] == '1');
                row.z.push_back(r->flags[t.num_qubits + q] == '1');
            }
            row.negative = r->neg;
            t.rows.push_back(std::move(row));
        }
        TableauReport report = validate_tableau(t);
        if (!report.ok()) {
            throw Error(ErrorKind::invalid_tableau, "circuit " + std::to_string(id) + ": " + report.message);
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_csv(std::ostream &out, std::span<const GeneratorRecord> records) {
    out << "circ_id,g_idx,n,flags,neg\n";
    for (const GeneratorRecord &r : records) {
        out << r.circ_id << ',' << r.g_idx << ',' << r.n << ',' << r.flags << ',' << (r.neg ? "true" : "false") << '\n';
    }
}

std::vector<GeneratorRecord> read_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"circ_id", "g_idx", "n", "flags", "neg"}) {
        throw Error(ErrorKind::parse_error, "missing generators CSV header");
    }
    std::vector<GeneratorRecord> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 5) {
            throw Error(ErrorKind::parse_error, "expected 5 columns in '" + line + "'");
        }
        out.push_back(GeneratorRecord{parse_int<int64_t>(f[0], "circ_id"), parse_int<int16_t>(f[1], "g_idx"),
                                      parse_int<int16_t>(f[2], "n"), f[3], parse_bool(f[4])});
    }
    return out;
}

void write_sqlite(const std::filesystem::path &path, std::span<const GeneratorRecord> records) {
    SqliteDb db = open_db(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    exec(db.get(), "BEGIN IMMEDIATE");
    try {
        exec(db.get(), kSqliteDdl);
        exec(db.get(), "DELETE FROM generators");
        SqliteStmt insert =
            prepare(db.get(), "INSERT INTO generators (circ_id, g_idx, n, flags, neg) VALUES (?, ?, ?, ?, ?)");
        for (const GeneratorRecord &r : records) {
            sqlite3_reset(insert.get());
            sqlite3_bind_int64(insert.get(), 1, r.circ_id);
            sqlite3_bind_int(insert.get(), 2, r.g_idx);
            sqlite3_bind_int(insert.get(), 3, r.n);
            sqlite3_bind_text(insert.get(), 4, r.flags.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_int(insert.get(), 5, r.neg ? 1 : 0);
            int rc = sqlite3_step(insert.get());
            if (rc != SQLITE_DONE) {
                ErrorKind kind = (rc == SQLITE_CONSTRAINT) ? ErrorKind::constraint_violation : ErrorKind::io_error;
                throw Error(kind, "row " + key_text(r) + ": " + sqlite3_errmsg(db.get()));
            }
        }
        exec(db.get(), "COMMIT");
    } catch (...) {
        sqlite3_exec(db.get(), "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
}

std::vector<GeneratorRecord> read_sqlite(const std::filesystem::path &path) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::io_error, "store " + path.string() + " does not exist");
    }
    SqliteDb db = open_db(path, SQLITE_OPEN_READONLY);
    // rowid order is insertion order, which preserves export order.
    SqliteStmt select = prepare(db.get(), "SELECT circ_id, g_idx, n, flags, neg FROM generators ORDER BY rowid");
    std::vector<GeneratorRecord> out;
    int rc;
    while ((rc = sqlite3_step(select.get())) == SQLITE_ROW) {
        const unsigned char *flags = sqlite3_column_text(select.get(), 3);
        out.push_back(GeneratorRecord{sqlite3_column_int64(select.get(), 0),
                                      static_cast<int16_t>(sqlite3_column_int(select.get(), 1)),
                                      static_cast<int16_t>(sqlite3_column_int(select.get(), 2)),
                                      flags ? reinterpret_cast<const char *>(flags) : "",
                                      sqlite3_column_int(select.get(), 4) != 0});
    }
    if (rc != SQLITE_DONE) {
        throw Error(ErrorKind::io_error, std::string("sqlite: ") + sqlite3_errmsg(db.get()));
    }
    return out;
}

void save_store(const std::filesystem::path &path, std::span<const Tableau> tableaux) {
    std::vector<GeneratorRecord> records = export_store(tableaux);
    if (path.extension() == ".csv") {
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
            }
            write_csv(out, records);
        }
        std::filesystem::rename(tmp, path);
    } else {
        write_sqlite(path, records);
    }
}

std::vector<Tableau> load_store(const std::filesystem::path &path) {
    if (path.extension() == ".csv") {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorKind::io_error, "cannot read " + path.string());
        }
        std::vector<GeneratorRecord> records = read_csv(in);
        return import_store(records);
    }
    std::vector<GeneratorRecord> records = read_sqlite(path);
    return import_store(records);
}

}  // namespace qpdb
