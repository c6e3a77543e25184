#include "sm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sm {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(std::string_view s)
{
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t to_unsigned(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("expected a nonnegative integer, got '" + std::string(s) + "'");
    }
    return v;
}

struct Dims {
    std::size_t order, n_tx, n_rx;
};

SweepConfig make_preset(Dims d, std::vector<double> snr, std::size_t realizations)
{
    SweepConfig c;
    c.order = d.order;
    c.n_tx = d.n_tx;
    c.n_rx = d.n_rx;
    c.snr_db = std::move(snr);
    c.analytic_realizations = realizations;
    return c;
}

const std::map<std::string, SweepConfig, std::less<>>& presets()
{
    static const auto table = [] {
        const std::vector<double> full{0, 5, 10, 15, 20, 25, 30};
        std::map<std::string, SweepConfig, std::less<>> t;
        t["fig3"] = make_preset({8, 8, 8}, {0, 5, 10}, 0);
        // determined (N_r = N_t), under-determined (N_r < N_t), over-determined
        t["fig4a"] = make_preset({8, 8, 8}, full, 0);
        t["fig4b"] = make_preset({16, 16, 16}, full, 0);
        t["fig5a"] = make_preset({8, 8, 8}, full, 200);
        t["fig5b"] = make_preset({16, 16, 16}, full, 200);
        t["fig6a"] = make_preset({8, 8, 6}, full, 200);
        t["fig6b"] = make_preset({16, 16, 12}, full, 200);
        t["fig7a"] = make_preset({8, 8, 10}, full, 200);
        t["fig7b"] = make_preset({16, 16, 20}, full, 200);
        // sensitivity studies around M = N_t = N_r = 16; vary one with --M/--Nt/--Nr
        t["fig8"] = make_preset({16, 16, 16}, {20}, 0);
        t["fig9"] = make_preset({16, 16, 16}, {20}, 0);
        t["fig10"] = make_preset({16, 16, 16}, {20}, 0);
        return t;
    }();
    return table;
}

void apply(CliConfig& cfg, std::string_view key, std::string_view value)
{
    SweepConfig& s = cfg.sweep;
    if (key == "M") {
        s.order = to_unsigned(value);
    } else if (key == "Nt") {
        s.n_tx = to_unsigned(value);
    } else if (key == "Nr") {
        s.n_rx = to_unsigned(value);
    } else if (key == "sigma_e2") {
        s.csir = parse_csir(value);
    } else if (key == "snr") {
        s.snr_db = parse_snr_grid(value);
    } else if (key == "trials") {
        s.trials = to_unsigned(value);
    } else if (key == "decoders") {
        s.decoders = parse_decoders(value);
    } else if (key == "seed") {
        s.base_seed = to_unsigned(value);
    } else if (key == "analytic_realizations") {
        s.analytic_realizations = to_unsigned(value);
    } else if (key == "threads") {
        s.threads = to_unsigned(value);
    } else if (key == "output") {
        cfg.output = std::string(trim(value));
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

}  // namespace

const std::vector<std::string>& preset_names()
{
    static const auto names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : presets()) n.push_back(k);
        return n;
    }();
    return names;
}

SweepConfig preset_config(std::string_view name)
{
    const auto& t = presets();
    const auto it = t.find(name);
    if (it == t.end()) throw ConfigError("unknown preset '" + std::string(name) + "'");
    return it->second;
}

std::vector<double> parse_snr_grid(std::string_view text)
{
    text = trim(text);
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("SNR range must be start:step:stop");
        const double start = to_double(parts[0]);
        const double step = to_double(parts[1]);
        const double stop = to_double(parts[2]);
        if (!(step > 0.0) || stop < start) throw ConfigError("SNR range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) throw ConfigError("SNR range has too many points");
        for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    } else {
        for (auto part : split(text, ',')) out.push_back(to_double(part));
    }
    return out;
}

CsirModel parse_csir(std::string_view text)
{
    text = trim(text);
    if (text == "perfect") return CsirModel::perfect();
    if (text == "snr" || text == "1/snr" || text == "variable") return CsirModel::variable();
    const double v = to_double(text);
    if (v < 0.0) throw ConfigError("error variance must be nonnegative");
    return v == 0.0 ? CsirModel::perfect() : CsirModel::fixed(v);
}

DecoderSet parse_decoders(std::string_view text)
{
    DecoderSet set;
    for (auto part : split(text, ',')) {
        const auto it = std::find_if(kAllDecoders.begin(), kAllDecoders.end(),
                                     [&](Decoder d) { return part == to_string(d); });
        if (it == kAllDecoders.end()) throw ConfigError("unknown decoder '" + std::string(part) + "'");
        set.insert(*it);
    }
    return set;
}

std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source)
{
    std::vector<ConfigEntry> entries;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (!seen.insert(std::string(key)).second) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
        entries.push_back({std::string(key), std::string(value), where});
    }
    return entries;
}

std::vector<ConfigEntry> read_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

CliConfig build_config(const std::vector<ConfigEntry>& file, const std::vector<ConfigEntry>& overrides)
{
    CliConfig cfg;
    std::string preset_where;
    for (const auto* layer : {&file, &overrides}) {
        for (const auto& e : *layer) {
            if (e.key == "preset") {
                cfg.preset = e.value;
                preset_where = e.where;
            }
        }
    }
    if (!cfg.preset.empty()) {
        try {
            cfg.sweep = preset_config(cfg.preset);
        } catch (const ConfigError& err) {
            throw ConfigError(preset_where + ": " + err.what());
        }
    }
    for (const auto* layer : {&file, &overrides}) {
        for (const auto& e : *layer) {
            if (e.key == "preset") continue;
            try {
                apply(cfg, e.key, e.value);
            } catch (const ConfigError& err) {
                throw ConfigError(e.where + ": " + err.what());
            }
        }
    }
    try {
        cfg.sweep.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("invalid configuration: ") + err.what());
    }
    return cfg;
}

}  // namespace sm
