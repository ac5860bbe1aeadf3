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

// qpdb: command-line front end for encoding, serving, querying and analysis.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpdb/analysis.h"
#include "qpdb/database.h"
#include "qpdb/error.h"
#include "qpdb/mub.h"
#include "qpdb/session.h"
#include "qpdb/store.h"
#include "qpdb/tableau.h"
#include "qpdb/wire.h"

using namespace qpdb;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string &text, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, sep);) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

void fail(const std::string &kind, const std::string &message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

// ---- encode / serve / query ----

struct EncodeArgs {
    std::string db, widths, out, objective = "average";
    size_t n = 2;
};

QracObjective parse_objective(const std::string &s) {
    if (s == "average") {
        return QracObjective::average_fidelity;
    }
    if (s == "min") {
        return QracObjective::min_fidelity;
    }
    throw Error(ErrorKind::invalid_argument, "objective must be average or min");
}

int run_encode(const EncodeArgs &a) {
    DatabaseSpec db = load_database(a.db, a.widths);
    EncodedDatabase enc = encode_database(db, a.n, parse_objective(a.objective));
    save_state_table(a.out, enc.state_table());
    std::cout << "encoded " << db.num_rows() << " rows x " << db.num_bits << " bits into " << enc.blocks.size()
              << " blocks -> " << a.out << "\n";
    return 0;
}

struct ServeArgs {
    std::string states, db, widths, listen;
    size_t n = 2;
    uint32_t k = 0;
    size_t sessions = 1;
    bool noiseless = false;
};

int run_serve(const ServeArgs &a) {
    std::optional<EncodedDatabase> enc;
    StateTable table;
    if (!a.db.empty()) {
        enc = encode_database(load_database(a.db, a.widths), a.n);
        table = enc->state_table();
    } else if (!a.states.empty()) {
        table = load_state_table(a.states);
    } else {
        throw Error(ErrorKind::invalid_argument, "serve needs --states or --db with --widths");
    }
    if (a.noiseless && !enc) {
        throw Error(ErrorKind::invalid_argument, "--noiseless needs --db and --widths (the QRAC targets)");
    }
    Listener listener(a.listen);
    std::cout << "listening on " << listener.endpoint() << "\n" << std::flush;
    for (size_t s = 0; s < a.sessions; s++) {
        std::unique_ptr<ByteChannel> channel = listener.accept();
        std::optional<AliceServer> alice;
        if (a.noiseless) {
            alice.emplace(*enc, a.k, *channel, noiseless_targets(*enc));
        } else {
            alice.emplace(table, a.k, *channel);
        }
        alice->serve();
        char digest[17];
        std::snprintf(digest, sizeof(digest), "%016llx", static_cast<unsigned long long>(alice->transcript().digest()));
        std::cout << "session " << s + 1 << ": " << alice->transcript().entries().size()
                  << " messages, transcript " << digest << "\n"
                  << std::flush;
    }
    return 0;
}

struct QueryArgs {
    std::string connect, keys, widths, tie_rule = "strict";
    uint64_t seed = 1;
    bool noiseless = false;
    bool as_json = false;
};

int run_query(const QueryArgs &a) {
    std::vector<ColumnSpec> columns;
    if (!a.widths.empty()) {
        std::ifstream in(a.widths);
        if (!in) {
            throw Error(ErrorKind::io_error, "cannot open " + a.widths);
        }
        columns = parse_widths(in);
    }
    Rng rng(a.seed);
    std::unique_ptr<ByteChannel> channel = connect_endpoint(a.connect);
    BobClient bob(*channel, {split_list(a.keys), parse_tie_rule(a.tie_rule), a.noiseless}, rng);
    QueryResult r = bob.query();
    json out = json::array();
    for (size_t i = 0; i < r.chosen_keys.size(); i++) {
        json row{{"key", r.chosen_keys[i]},
                 {"copies", r.shares[i]},
                 {"bits", r.fragment_bits[i]},
                 {"tie_failures", r.tie_failures[i]}};
        if (!columns.empty() && r.decoded(i)) {
            std::vector<std::string> values = decode_row(columns, r.fragment_bits[i]);
            json fields;
            for (size_t c = 0; c < columns.size(); c++) {
                fields[columns[c].name] = values[c];
            }
            row["values"] = fields;
        }
        out.push_back(row);
    }
    if (a.as_json) {
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    for (const json &row : out) {
        std::cout << row["key"].get<std::string>() << " (" << row["copies"] << " copies/block): "
                  << row["bits"].get<std::string>();
        if (row["tie_failures"] != 0) {
            std::cout << "  [" << row["tie_failures"] << " tied blocks]";
        }
        std::cout << "\n";
        if (row.contains("values")) {
            for (const auto &[name, value] : row["values"].items()) {
                std::cout << "  " << name << " = " << value.get<std::string>() << "\n";
            }
        }
    }
    return 0;
}

// ---- analyze / table ----

struct AnalyzeArgs {
    double p_correct = 0;
    size_t outcomes = 4, blocks = 1;
    std::string k = "1", m = "1", tie_rule = "random", split_rule = "balanced", format = "text";
};

std::vector<size_t> parse_sizes(const std::string &text, const char *what) {
    std::vector<size_t> out;
    for (const std::string &s : split_list(text)) {
        try {
            size_t used = 0;
            unsigned long long v = std::stoull(s, &used);
            if (used != s.size() || v == 0) {
                throw std::invalid_argument(s);
            }
            out.push_back(static_cast<size_t>(v));
        } catch (const std::exception &) {
            throw Error(ErrorKind::invalid_argument, std::string(what) + " must be positive integers, got '" + s + "'");
        }
    }
    if (out.empty()) {
        throw Error(ErrorKind::invalid_argument, std::string(what) + " list is empty");
    }
    return out;
}

void print_rows(std::span<const TableRow> rows, const std::string &format) {
    if (format == "csv") {
        std::cout << format_csv(rows);
    } else if (format == "text") {
        std::cout << format_table(rows);
    } else {
        throw Error(ErrorKind::invalid_argument, "format must be text or csv");
    }
}

int run_analyze(const AnalyzeArgs &a) {
    RetrievalModel model{symmetric_probs(a.p_correct, a.outcomes), a.blocks, parse_split_rule(a.split_rule),
                         parse_tie_rule(a.tie_rule)};
    std::vector<TableRow> rows;
    for (size_t m : parse_sizes(a.m, "--m")) {
        for (size_t k : parse_sizes(a.k, "--k")) {
            rows.push_back({k, m, row_success(model, k, m)});
        }
    }
    if (a.format == "text") {
        std::cout << "# tie-rule " << a.tie_rule << ", split-rule " << a.split_rule << "\n";
    }
    print_rows(rows, a.format);
    return 0;
}

int run_table(const std::string &format) {
    ExampleTableReport report = reproduce_example_table();
    auto show = [&](const char *title, const std::vector<RuleResult> &column, int choice) {
        for (size_t i = 0; i < column.size(); i++) {
            const RuleResult &r = column[i];
            if (format == "text") {
                std::cout << "# " << title << " tie-rule " << tie_rule_name(r.tie) << ", split-rule "
                          << split_rule_name(r.split) << ": max error " << r.max_error
                          << (r.matches ? " (within tolerance)" : "")
                          << (static_cast<int>(i) == choice ? " <- chosen" : "") << "\n";
            }
            if (static_cast<int>(i) == choice || format == "text") {
                print_rows(r.rows, format);
            }
        }
        if (choice < 0) {
            std::cout << "# " << title << ": no rule combination reproduces the reference column\n";
        }
    };
    show("M=1", report.m1, report.m1_choice);
    show("M=2", report.m2, report.m2_choice);
    return report.m1_choice >= 0 && report.m2_choice >= 0 ? 0 : 1;
}

// ---- tableau ----

/// One tableau per line: "<circ_id>: <pauli> <pauli> ...", '#' comments.
std::vector<Tableau> parse_tableau_text(std::istream &in) {
    std::vector<Tableau> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        line = line.substr(0, line.find('#'));
        size_t colon = line.find(':');
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (colon == std::string::npos) {
            throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected '<id>: <paulis>'");
        }
        Tableau t;
        try {
            t.circ_id = std::stoll(line.substr(0, colon));
        } catch (const std::exception &) {
            throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": bad circuit id");
        }
        std::istringstream words(line.substr(colon + 1));
        for (std::string w; words >> w;) {
            PauliString p = PauliString::parse(w);
            t.num_qubits = p.num_qubits();
            t.rows.push_back(to_row(p));
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct TableauArgs {
    std::string store, input;
    size_t mub = 0;
};

int run_tableau_export(const TableauArgs &a) {
    std::vector<Tableau> tableaux;
    if (a.mub) {
        int64_t id = 0;
        for (const Mub &m : mub_set(a.mub)) {
            for (const QuantumState &s : m.basis.states()) {
                tableaux.push_back(state_to_tableau(s, id++));
            }
        }
    } else if (!a.input.empty()) {
        std::ifstream in(a.input);
        if (!in) {
            throw Error(ErrorKind::io_error, "cannot open " + a.input);
        }
        tableaux = parse_tableau_text(in);
    } else {
        throw Error(ErrorKind::invalid_argument, "export needs --input or --mub");
    }
    save_store(a.store, tableaux);
    std::cout << "wrote " << tableaux.size() << " tableaux to " << a.store << "\n";
    return 0;
}

int run_tableau_import(const TableauArgs &a) {
    for (const Tableau &t : load_store(a.store)) {
        std::cout << t.circ_id << ":";
        for (const GeneratorRow &row : t.rows) {
            std::cout << " " << to_pauli(row).str();
        }
        if (t.num_qubits <= kMaxQubits) {
            QuantumState s = tableau_to_state(t);
            std::cout << "  state [";
            for (size_t i = 0; i < s.dim(); i++) {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "%s%.6f%+.6fi", i ? ", " : "", s[i].real(), s[i].imag());
                std::cout << buf;
            }
            std::cout << "]";
        }
        std::cout << "\n";
    }
    return 0;
}

// ---- validate ----

int run_validate() {
    int failures = 0;
    auto check = [&](const std::string &name, bool ok, const std::string &detail) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << ": " << detail << "\n";
        failures += !ok;
    };
    for (size_t n : {1, 2}) {
        const std::vector<Mub> &family = mub_family(n);
        double worst = 0;
        for (size_t i = 0; i < family.size(); i++) {
            for (size_t j = i + 1; j < family.size(); j++) {
                worst = std::max(worst, verify_unbiased(family[i], family[j]));
            }
        }
        check("mub-unbiased n=" + std::to_string(n), worst < 1e-10, "max deviation " + sci(worst));

        double circuit_err = 0;
        double tableau_err = 0;
        for (const Mub &m : family) {
            Circuit c = measurement_circuit(m);
            for (size_t i = 0; i < m.basis.size(); i++) {
                circuit_err = std::max(circuit_err, 1 - c.run(m.basis[i]).fidelity(QuantumState::basis(n, i)));
                Tableau t = state_to_tableau(m.basis[i], 0);
                tableau_err = std::max(tableau_err, 1 - tableau_to_state(t).fidelity(m.basis[i]));
            }
        }
        check("measurement-circuits n=" + std::to_string(n), circuit_err < 1e-9,
              "max infidelity " + sci(circuit_err));
        check("tableau-round-trip n=" + std::to_string(n), tableau_err < 1e-9,
              "max infidelity " + sci(tableau_err));
    }

    std::vector<Tableau> tableaux;
    int64_t id = 0;
    for (const Mub &m : mub_family(2)) {
        for (const QuantumState &s : m.basis.states()) {
            tableaux.push_back(state_to_tableau(s, id++));
        }
    }
    std::stringstream csv;
    write_csv(csv, export_store(tableaux));
    check("store-csv-round-trip", import_store(read_csv(csv)) == tableaux, std::to_string(tableaux.size()) + " tableaux");

    double dp_err = 0;
    std::vector<double> probs = symmetric_probs(kExampleProbability, 4);
    for (size_t c = 1; c <= 6; c++) {
        for (TieRule rule : {TieRule::strict, TieRule::random}) {
            dp_err = std::max(dp_err, std::abs(plurality_probability(c, probs, 0, rule) -
                                               plurality_probability_enumerated(c, probs, 0, rule)));
        }
    }
    check("plurality-dp-vs-enumeration", dp_err < 1e-12, "max difference " + sci(dp_err));
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qpdb: private database retrieval simulator"};
    app.require_subcommand(1);

    EncodeArgs enc;
    CLI::App *encode = app.add_subcommand("encode", "Encode a table into QRAC block states");
    encode->add_option("--db", enc.db, "Comma-separated table, key in the first column")->required();
    encode->add_option("--widths", enc.widths, "Column width declarations")->required();
    encode->add_option("--n", enc.n, "Qubits per block")->check(CLI::Range(1, 2));
    encode->add_option("--out", enc.out, "Output .qpdb file")->required();
    encode->add_option("--objective", enc.objective, "average or min");

    ServeArgs srv;
    CLI::App *serve = app.add_subcommand("serve", "Serve k copies of every block state");
    serve->add_option("--states", srv.states, "Encoded .qpdb file");
    serve->add_option("--db", srv.db, "Encode this table on the fly instead");
    serve->add_option("--widths", srv.widths, "Column widths for --db");
    serve->add_option("--n", srv.n, "Qubits per block for --db")->check(CLI::Range(1, 2));
    serve->add_option("--k", srv.k, "Copies per block")->required();
    serve->add_option("--listen", srv.listen, "tcp:HOST:PORT or unix:PATH")->required();
    serve->add_option("--sessions", srv.sessions, "Sessions to serve before exiting");
    serve->add_flag("--noiseless", srv.noiseless, "Debug mode: send each row's own target state");

    QueryArgs qry;
    CLI::App *query = app.add_subcommand("query", "Retrieve rows from a server");
    query->add_option("--connect", qry.connect, "tcp:HOST:PORT or unix:PATH")->required();
    query->add_option("--keys", qry.keys, "Comma-separated keys")->required();
    query->add_option("--seed", qry.seed, "Measurement rng seed");
    query->add_option("--tie-rule", qry.tie_rule, "strict or random");
    query->add_option("--widths", qry.widths, "Decode fields with these column widths");
    query->add_flag("--noiseless", qry.noiseless, "Debug mode, must match the server");
    query->add_flag("--json", qry.as_json, "JSON output");

    AnalyzeArgs an;
    CLI::App *analyze = app.add_subcommand("analyze", "Exact row-retrieval success probabilities");
    analyze->add_option("--pcorrect", an.p_correct, "Per-copy probability of the correct outcome")->required();
    analyze->add_option("--outcomes", an.outcomes, "Outcomes per measurement");
    analyze->add_option("--blocks", an.blocks, "Blocks per row");
    analyze->add_option("--k", an.k, "Comma-separated copy budgets");
    analyze->add_option("--m", an.m, "Comma-separated row counts");
    analyze->add_option("--tie-rule", an.tie_rule, "strict or random");
    analyze->add_option("--split-rule", an.split_rule, "balanced or ceiling");
    analyze->add_option("--format", an.format, "text or csv");

    std::string table_format = "text";
    CLI::App *table = app.add_subcommand("table", "Reproduce the reference (k, M) success grid");
    table->add_option("--format", table_format, "text or csv");

    TableauArgs tab;
    CLI::App *tableau = app.add_subcommand("tableau", "Stabilizer tableau store");
    tableau->require_subcommand(1);
    CLI::App *tab_export = tableau->add_subcommand("export", "Write tableaux to a store");
    tab_export->add_option("--store", tab.store, ".csv file or SQLite database")->required();
    tab_export->add_option("--input", tab.input, "Text file, one '<id>: <paulis>' per line");
    tab_export->add_option("--mub", tab.mub, "Export every basis state of the n-qubit MUB family")
        ->check(CLI::Range(1, 2));
    CLI::App *tab_import = tableau->add_subcommand("import", "Read and check a store");
    tab_import->add_option("--store", tab.store, ".csv file or SQLite database")->required();

    CLI::App *validate = app.add_subcommand("validate", "Run the invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        fail("usage", e.what());
        return 2;
    }

    try {
        if (*encode) {
            return run_encode(enc);
        }
        if (*serve) {
            return run_serve(srv);
        }
        if (*query) {
            return run_query(qry);
        }
        if (*analyze) {
            return run_analyze(an);
        }
        if (*table) {
            return run_table(table_format);
        }
        if (*tab_export) {
            return run_tableau_export(tab);
        }
        if (*tab_import) {
            return run_tableau_import(tab);
        }
        if (*validate) {
            return run_validate();
        }
    } catch (const Error &e) {
        fail(std::string(error_kind_name(e.kind())), e.what());
        return 1;
    } catch (const std::exception &e) {
        fail("internal", e.what());
        return 1;
    }
    return 0;
}
