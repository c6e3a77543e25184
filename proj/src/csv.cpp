#include "sm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sm {

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no CSV column named " + name);
    return static_cast<std::size_t>(it - header.begin());
}

const std::vector<std::string>& sweep_columns()
{
    static const std::vector<std::string> cols{"snr_db",       "ber_ml",  "ber_mm",  "ber_mmw",   "avg_nodes_ml",
                                               "avg_nodes_mm", "c_r_mm",  "c_r_max", "nom_count", "analytic_c_mm"};
    return cols;
}

const std::vector<std::string>& predict_columns()
{
    static const std::vector<std::string> cols{"snr_db", "analytic_c_mm", "c_r_analytic"};
    return cols;
}

const std::vector<std::string>& nom_columns()
{
    static const std::vector<std::string> cols{"snr_db", "nom_count", "trials"};
    return cols;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::vector<double> sweep_row(const SweepPoint& p)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {p.snr_db,
            p.ber(Decoder::ml),
            p.ber(Decoder::mm),
            p.ber(Decoder::mmw),
            p.avg_nodes(Decoder::ml),
            p.avg_nodes(Decoder::mm),
            p.c_r(Decoder::mm),
            p.c_r_max(),
            p.has_nom() ? static_cast<double>(p.nom_count) : nan,
            p.analytic_c_mm};
}

CsvTable sweep_table(const SweepResult& result)
{
    CsvTable t{sweep_columns(), {}};
    for (const auto& p : result.points) t.rows.push_back(sweep_row(p));
    return t;
}

CsvTable predict_table(const std::vector<PredictPoint>& points, const SweepConfig& config)
{
    CsvTable t{predict_columns(), {}};
    for (const auto& p : points) {
        t.rows.push_back({p.snr_db, p.analytic_c_mm,
                          analytic_reduction(p.analytic_c_mm, config.order, config.n_tx, config.n_rx)});
    }
    return t;
}

CsvTable nom_table(const std::vector<NomPoint>& points)
{
    CsvTable t{nom_columns(), {}};
    for (const auto& p : points) {
        t.rows.push_back({p.snr_db, static_cast<double>(p.nom_count), static_cast<double>(p.trials)});
    }
    return t;
}

void write_table(std::ostream& out, const CsvTable& table)
{
    std::string text;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) text += ',';
        text += table.header[c];
    }
    text += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::invalid_argument("CSV row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) text += ',';
            text += format_number(row[c]);
        }
        text += '\n';
    }
    out << text;
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_field(const std::string& s)
{
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("malformed CSV number '" + s + "'");
    }
    return v;
}

}  // namespace

CsvTable read_table(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    t.header = split_fields(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != t.header.size()) throw std::runtime_error("CSV row width differs from header");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_field(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace sm
