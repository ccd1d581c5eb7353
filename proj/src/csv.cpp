#include "wban/csv.hpp"

#include "wban/error.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace wban {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "schema",   "swept_parameter", "swept_value",  "mechanism",  "up",
        "status",   "model_R",         "model_S",      "model_E",    "model_E_per_s",
        "model_D",  "iterations",      "residual",     "sim_R",      "sim_R_hw",
        "sim_S",    "sim_S_hw",        "sim_E",        "sim_E_hw",   "sim_D",
        "sim_D_hw", "replications",    "dev_R",        "dev_S",      "dev_E",
        "dev_D"};
    return cols;
}

namespace {

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string cell(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_floating_point_v<T>) return number(*v);
    else return std::to_string(*v);
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

// One record, which may span physical lines when a quoted field holds a newline.
bool read_record(std::istream& in, std::vector<std::string>& fields, long& line) {
    fields.clear();
    std::string field;
    bool quoted = false, any = false;
    const long start = line + 1;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field += ch;
            }
        } else if (ch == '"') {
            if (!field.empty()) throw ParseError("stray quote inside unquoted field", start);
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            continue;
        } else if (ch == '\n') {
            ++line;
            fields.push_back(std::move(field));
            return true;
        } else {
            field += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", start);
    if (!any) return false;
    ++line;
    fields.push_back(std::move(field));
    return true;
}

double parse_double(const std::string& s, long line, const std::string& col) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ParseError("column " + col + ": '" + s + "' is not a number", line);
    return v;
}

template <class T>
T parse_integer(const std::string& s, long line, const std::string& col) {
    T v{};
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ParseError("column " + col + ": '" + s + "' is not an integer", line);
    return v;
}

}  // namespace

void write_csv(std::ostream& out, const ResultTable& table) {
    const auto& cols = csv_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const ResultRow& r : table) {
        const std::vector<std::string> cells = {
            kCsvSchema,
            quote(r.parameter),
            number(r.value),
            std::string(to_string(r.mechanism)),
            std::to_string(r.up),
            quote(r.status),
            cell(r.model_reliability),
            cell(r.model_throughput),
            cell(r.model_energy),
            cell(r.model_energy_per_second),
            cell(r.model_delay),
            cell(r.iterations),
            cell(r.residual),
            cell(r.sim_reliability),
            cell(r.sim_reliability_hw),
            cell(r.sim_throughput),
            cell(r.sim_throughput_hw),
            cell(r.sim_energy),
            cell(r.sim_energy_hw),
            cell(r.sim_delay),
            cell(r.sim_delay_hw),
            cell(r.replications),
            cell(r.dev_reliability),
            cell(r.dev_throughput),
            cell(r.dev_energy),
            cell(r.dev_delay)};
        for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
        out << '\n';
    }
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

ResultTable read_csv(std::istream& in) {
    const auto& cols = csv_columns();
    std::vector<std::string> f;
    long line = 0;
    if (!read_record(in, f, line)) throw ParseError("empty CSV input", 1);
    if (f != cols) throw ParseError("header does not match the results schema", line);

    ResultTable table;
    while (read_record(in, f, line)) {
        if (f.size() == 1 && f[0].empty()) continue;  // blank line
        if (f.size() != cols.size())
            throw ParseError("expected " + std::to_string(cols.size()) + " fields, got " +
                                 std::to_string(f.size()),
                             line);
        if (f[0] != kCsvSchema) throw ParseError("unknown schema '" + f[0] + "'", line);

        auto opt_d = [&](std::size_t k) {
            return f[k].empty() ? std::nullopt
                                : std::optional<double>(parse_double(f[k], line, cols[k]));
        };
        ResultRow r;
        r.parameter = f[1];
        r.value = parse_double(f[2], line, cols[2]);
        if (f[3] == "basic") r.mechanism = Mechanism::Basic;
        else if (f[3] == "rtscts") r.mechanism = Mechanism::RtsCts;
        else throw ParseError("unknown mechanism '" + f[3] + "'", line);
        r.up = parse_integer<int>(f[4], line, cols[4]);
        if (r.up < 0 || r.up >= kNumPriorities) throw ParseError("up out of range", line);
        r.status = f[5];
        r.model_reliability = opt_d(6);
        r.model_throughput = opt_d(7);
        r.model_energy = opt_d(8);
        r.model_energy_per_second = opt_d(9);
        r.model_delay = opt_d(10);
        if (!f[11].empty()) r.iterations = parse_integer<long>(f[11], line, cols[11]);
        r.residual = opt_d(12);
        r.sim_reliability = opt_d(13);
        r.sim_reliability_hw = opt_d(14);
        r.sim_throughput = opt_d(15);
        r.sim_throughput_hw = opt_d(16);
        r.sim_energy = opt_d(17);
        r.sim_energy_hw = opt_d(18);
        r.sim_delay = opt_d(19);
        r.sim_delay_hw = opt_d(20);
        if (!f[21].empty()) r.replications = parse_integer<int>(f[21], line, cols[21]);
        r.dev_reliability = opt_d(22);
        r.dev_throughput = opt_d(23);
        r.dev_energy = opt_d(24);
        r.dev_delay = opt_d(25);
        table.push_back(std::move(r));
    }
    return table;
}

std::string point_key(const ResultRow& row) {
    return row.parameter + "=" + number(row.value) + "/" + std::string(to_string(row.mechanism));
}

namespace {

MetricsSet regroup(const ResultTable& table, bool simulated) {
    MetricsSet set;
    for (const ResultRow& r : table) {
        MetricsReport& m = set[point_key(r)];
        const auto& rel = simulated ? r.sim_reliability : r.model_reliability;
        const auto& thr = simulated ? r.sim_throughput : r.model_throughput;
        const auto& en = simulated ? r.sim_energy : r.model_energy;
        const auto& del = simulated ? r.sim_delay : r.model_delay;
        if (!rel || !thr || !en || !del) continue;
        m.available[r.up] = true;
        m.reliability[r.up] = *rel;
        m.throughput[r.up] = *thr;
        m.energy[r.up] = *en;
        m.delay[r.up] = *del;
    }
    return set;
}

}  // namespace

MetricsSet analytical_set(const ResultTable& table) { return regroup(table, false); }
MetricsSet simulated_set(const ResultTable& table) { return regroup(table, true); }

}  // namespace wban
