// sm_cli: sweep, predict, nom and trace front end.
//
// Exit codes: 0 success, 1 internal error, 2 configuration or output error,
// 3 numeric failure (the CSV is still written, with nan in the failed cells).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sm/config.hpp"
#include "sm/csv.hpp"
#include "sm/trace.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;

struct Options {
    std::string config_file;
    std::optional<std::string> preset, snr, sigma_e, decoders, output;
    std::optional<std::uint64_t> trials, seed, realizations, threads, order, n_tx, n_rx;
    std::string example;
    std::string decoder = "mm";
};

void add_scenario_options(CLI::App& cmd, Options& o)
{
    cmd.add_option("-c,--config", o.config_file, "key = value config file");
    cmd.add_option("--preset", o.preset, "scenario preset (fig3, fig4a ... fig10)");
    cmd.add_option("--snr", o.snr, "SNR grid in dB: start:step:stop or a comma list");
    cmd.add_option("--trials", o.trials, "trials per SNR point");
    cmd.add_option("--sigma-e", o.sigma_e, "channel-estimation error variance: 0, a value, or snr for 1/snr");
    cmd.add_option("--M", o.order, "constellation size");
    cmd.add_option("--Nt", o.n_tx, "transmit antennas");
    cmd.add_option("--Nr", o.n_rx, "receive antennas");
    cmd.add_option("--seed", o.seed, "base seed");
    cmd.add_option("--realizations", o.realizations, "analytic realizations per SNR point");
    cmd.add_option("--decoders", o.decoders, "comma list of ml, mm, mmw");
    cmd.add_option("--threads", o.threads, "worker threads (default SM_THREADS or all cores)");
    cmd.add_option("-o,--output", o.output, "output CSV path (default stdout)");
}

sm::CliConfig resolve(const Options& o)
{
    std::vector<sm::ConfigEntry> overrides;
    auto put = [&](const char* key, const char* flag, const auto& opt) {
        if (!opt) return;
        std::ostringstream v;
        v << *opt;
        overrides.push_back({key, v.str(), flag});
    };
    put("preset", "--preset", o.preset);
    put("M", "--M", o.order);
    put("Nt", "--Nt", o.n_tx);
    put("Nr", "--Nr", o.n_rx);
    put("sigma_e2", "--sigma-e", o.sigma_e);
    put("snr", "--snr", o.snr);
    put("trials", "--trials", o.trials);
    put("decoders", "--decoders", o.decoders);
    put("seed", "--seed", o.seed);
    put("analytic_realizations", "--realizations", o.realizations);
    put("threads", "--threads", o.threads);
    put("output", "--output", o.output);
    const auto file = o.config_file.empty() ? std::vector<sm::ConfigEntry>{} : sm::read_config_file(o.config_file);
    return sm::build_config(file, overrides);
}

// Opened before any simulation work so an unwritable path fails fast.
class Sink {
public:
    explicit Sink(const std::string& path) : path_(path)
    {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw sm::ConfigError(path + ": cannot open output file for writing");
    }

    void write(const sm::CsvTable& table)
    {
        std::ostream& out = path_.empty() ? std::cout : file_;
        sm::write_table(out, table);
        out.flush();
        if (!out) throw sm::ConfigError((path_.empty() ? std::string("stdout") : path_) + ": write failed");
    }

private:
    std::string path_;
    std::ofstream file_;
};

int run(const std::string& command, const Options& o)
{
    if (command == "trace" && !o.example.empty()) {
        const sm::Decoder d = o.decoder == "mmw" ? sm::Decoder::mmw : sm::Decoder::mm;
        if (o.example == "fig2") {
            sm::write_trace(std::cout, sm::worked_example_metrics(), d);
        } else {
            sm::write_trace(std::cout, sm::single_branch_metrics(o.n_rx.value_or(8)), d);
        }
        return 0;
    }

    const sm::CliConfig cfg = resolve(o);
    if (command == "trace") {
        const sm::Decoder d = o.decoder == "mmw" ? sm::Decoder::mmw : sm::Decoder::mm;
        sm::write_trial_trace(std::cout, cfg.sweep, d);
        return 0;
    }
    Sink sink(cfg.output);
    if (command == "sweep") {
        const sm::SweepResult result = sm::run_sweep(cfg.sweep);
        sink.write(sm::sweep_table(result));
        for (const auto& p : result.points) {
            if (!p.analytic_error.empty()) std::cerr << "sm_cli: " << p.snr_db << " dB: " << p.analytic_error << '\n';
        }
        return result.numeric_failure() ? kNumericFailure : 0;
    }
    if (command == "predict") {
        const auto points = sm::predict_sweep(cfg.sweep);
        sink.write(sm::predict_table(points, cfg.sweep));
        bool failed = false;
        for (const auto& p : points) {
            if (p.error.empty()) continue;
            failed = true;
            std::cerr << "sm_cli: " << p.snr_db << " dB: " << p.error << '\n';
        }
        return failed ? kNumericFailure : 0;
    }
    sink.write(sm::nom_table(sm::nom_study(cfg.sweep)));
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spatial-modulation detection: Monte Carlo sweeps, analytic complexity and search traces"};
    app.require_subcommand(1);
    Options o;

    auto* sweep = app.add_subcommand("sweep", "BER, visited nodes, NoM and analytic overlay per SNR point");
    auto* predict = app.add_subcommand("predict", "analytic expected m-M complexity per SNR point");
    auto* nom = app.add_subcommand("nom", "m-Mw misses against ML per SNR point");
    auto* trace = app.add_subcommand("trace", "iteration log of one search");
    for (auto* cmd : {sweep, predict, nom, trace}) add_scenario_options(*cmd, o);
    trace->add_option("--example", o.example, "built-in tree instead of a random trial")
        ->check(CLI::IsMember({"fig2", "single"}));
    trace->add_option("--decoder", o.decoder, "mm or mmw")->check(CLI::IsMember({"mm", "mmw"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const sm::ConfigError& e) {
        std::cerr << "sm_cli: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "sm_cli: invalid configuration: " << e.what() << '\n';
        return kConfigError;
    } catch (const sm::NumericFailure& e) {
        std::cerr << "sm_cli: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << "sm_cli: " << e.what() << '\n';
        return 1;
    }
}
