#include "ranklt/persist.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ranklt {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double out = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("bad number '" + std::string(s) + "'");
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string header_for(const std::vector<std::string>& labels) {
    std::string h = "time";
    for (const auto& l : labels) {
        if (l.find(',') != std::string::npos || l.find('\n') != std::string::npos)
            throw std::runtime_error("label '" + l + "' contains a delimiter");
        h += ',';
        h += l;
    }
    return h;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// One full grid of per-path columns: the shared layout of the values file and
// the jumps file.
std::string render_table(const Ensemble& e, bool jumps) {
    std::string out = header_for(e.labels);
    out += '\n';
    const int n = e.size();
    for (int j = 0; j <= e.grid->n_steps; ++j) {
        out += format_double(e.grid->times[static_cast<std::size_t>(j)]);
        for (int i = 0; i < n; ++i) {
            out += ',';
            out += format_double(jumps ? e.path(i).jump(j) : e.path(i).value(j));
        }
        out += '\n';
    }
    return out;
}

struct Table {
    std::vector<double> times;
    std::vector<std::vector<double>> columns;  // one per label
};

Table parse_table(const fs::path& file, const std::vector<std::string>& labels, int n_steps) {
    const std::string text = read_text(file);
    Table t;
    t.columns.assign(labels.size(), {});
    std::size_t line_no = 0;
    std::size_t start = 0;
    const auto fail = [&](const std::string& what) {
        throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string_view line(text.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (line_no == 1) {
            const std::string expect = header_for(labels);
            if (line != expect)
                fail("header mismatch: expected '" + expect + "', got '" + std::string(line) + "'");
            continue;
        }
        if (fields.size() != labels.size() + 1)
            fail("expected " + std::to_string(labels.size() + 1) + " fields, got " +
                 std::to_string(fields.size()));
        for (std::size_t k = 0; k < fields.size(); ++k) {
            double v = 0.0;
            try {
                v = parse_double(fields[k]);
            } catch (const std::exception& ex) {
                fail("field " + std::to_string(k + 1) + ": " + ex.what());
            }
            if (k == 0)
                t.times.push_back(v);
            else
                t.columns[k - 1].push_back(v);
        }
    }
    if (static_cast<int>(t.times.size()) != n_steps + 1)
        throw std::runtime_error(file.string() + ": expected " + std::to_string(n_steps + 1) +
                                 " data rows, got " + std::to_string(t.times.size()));
    return t;
}

}  // namespace

void save_ensemble(const Ensemble& e, const fs::path& stem) {
    if (e.size() == 0) throw std::invalid_argument("save_ensemble: empty ensemble");
    if (e.labels.size() != static_cast<std::size_t>(e.size()))
        throw std::invalid_argument("save_ensemble: label count does not match path count");
    fs::path values = stem;
    values += ".csv";
    fs::path jumps = stem;
    jumps += ".jumps.csv";
    fs::path meta = stem;
    meta += ".meta.json";

    write_text(values, render_table(e, /*jumps=*/false));
    write_text(jumps, render_table(e, /*jumps=*/true));

    const nlohmann::json m = {
        {"model", e.model},   {"params", e.params},
        {"seed", e.seed},     {"T", e.grid->horizon},
        {"n_steps", e.grid->n_steps}, {"labels", e.labels},
    };
    write_text(meta, m.dump(2) + "\n");
}

Ensemble load_ensemble(const fs::path& stem) {
    fs::path values = stem;
    values += ".csv";
    fs::path jumps = stem;
    jumps += ".jumps.csv";
    fs::path meta = stem;
    meta += ".meta.json";
    for (const auto& f : {values, jumps, meta})
        if (!fs::exists(f)) throw std::runtime_error("missing ensemble file: " + f.string());

    nlohmann::json m;
    try {
        m = nlohmann::json::parse(read_text(meta));
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error(meta.string() + ": " + ex.what());
    }
    Ensemble e;
    try {
        e.model = m.at("model").get<std::string>();
        e.params = m.at("params");
        e.seed = m.at("seed").get<std::uint64_t>();
        e.labels = m.at("labels").get<std::vector<std::string>>();
        const double T = m.at("T").get<double>();
        const int n_steps = m.at("n_steps").get<int>();
        e.grid = make_grid(T, n_steps);
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error(meta.string() + ": " + ex.what());
    }
    if (e.labels.empty()) throw std::runtime_error(meta.string() + ": empty label list");

    const Table tv = parse_table(values, e.labels, e.grid->n_steps);
    const Table tj = parse_table(jumps, e.labels, e.grid->n_steps);
    for (std::size_t j = 0; j < tv.times.size(); ++j) {
        if (tv.times[j] != e.grid->times[j])
            throw std::runtime_error(values.string() + ": time grid mismatch at data row " +
                                     std::to_string(j + 1));
        if (tj.times[j] != e.grid->times[j])
            throw std::runtime_error(jumps.string() + ": time grid mismatch at data row " +
                                     std::to_string(j + 1));
    }
    for (std::size_t i = 0; i < e.labels.size(); ++i)
        e.paths.push_back(CadlagPath::from_values_jumps(e.grid, tv.columns[i], tj.columns[i]));
    return e;
}

void write_report_json(const ResidualReport& r, const fs::path& file) {
    write_text(file, r.to_json().dump(2) + "\n");
}

void write_residual_csv(const ResidualReport& r, const TimeGrid& grid, const fs::path& file) {
    std::string out = r.has_divided ? "time,residual,residual_divided" : "time,residual";
    out += '\n';
    for (std::size_t j = 0; j < r.residual.size(); ++j) {
        out += format_double(grid.times[j]);
        out += ',';
        out += format_double(r.residual[j]);
        if (r.has_divided) {
            out += ',';
            out += format_double(r.residual_divided[j]);
        }
        out += '\n';
    }
    write_text(file, out);
}

namespace {
const char* kSummaryHeader = "identity,dt,mean_sup_residual,std_err,mean_normalizer,rel_residual";
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const fs::path& file) {
    std::string out = kSummaryHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.identity;
        out += ',';
        out += format_double(r.dt);
        out += ',';
        out += format_double(r.mean_sup_residual);
        out += ',';
        out += format_double(r.std_err);
        out += ',';
        out += format_double(r.mean_normalizer);
        out += ',';
        out += format_double(r.rel_residual);
        out += '\n';
    }
    write_text(file, out);
}

std::vector<SummaryRow> read_summary_csv(const fs::path& file) {
    const std::string text = read_text(file);
    std::vector<SummaryRow> rows;
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string_view line(text.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != kSummaryHeader)
                throw std::runtime_error(file.string() + ": bad summary header '" +
                                         std::string(line) + "'");
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 6)
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) +
                                     ": expected 6 fields, got " + std::to_string(f.size()));
        SummaryRow r;
        r.identity = std::string(f[0]);
        try {
            r.dt = parse_double(f[1]);
            r.mean_sup_residual = parse_double(f[2]);
            r.std_err = parse_double(f[3]);
            r.mean_normalizer = parse_double(f[4]);
            r.rel_residual = parse_double(f[5]);
        } catch (const std::exception& ex) {
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace ranklt
