#include <doctest.h>

#include <cmath>
#include <cstring>
#include <locale>
#include <random>
#include <sstream>

#include "sm/config.hpp"
#include "sm/csv.hpp"
#include "sm/trace.hpp"

using namespace sm;

namespace {

std::string error_of(const std::string& text)
{
    try {
        build_config(parse_config_text(text, "run.cfg"), {});
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string to_csv(const CsvTable& t)
{
    std::ostringstream s;
    write_table(s, t);
    return s.str();
}

bool same_bits(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || std::memcmp(&a, &b, sizeof a) == 0;
}

struct CommaDecimal : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
    char do_thousands_sep() const override { return '.'; }
    std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("config files: layering and overrides")
{
    const auto file = parse_config_text("# scenario\npreset = fig6a\nsnr = 0:2:30   # dense grid\ntrials=50\n", "a.cfg");
    const CliConfig cfg = build_config(file, {{"trials", "7", "--trials"}, {"sigma_e2", "snr", "--sigma-e"}});
    CHECK(cfg.preset == "fig6a");
    CHECK(cfg.sweep.n_rx == 6);
    CHECK(cfg.sweep.n_tx == 8);
    CHECK(cfg.sweep.snr_db.size() == 16);
    CHECK(cfg.sweep.snr_db.back() == 30.0);
    CHECK(cfg.sweep.trials == 7);
    CHECK(cfg.sweep.csir == CsirModel::variable());

    // a command-line preset replaces the file's, file keys still apply
    const CliConfig other = build_config(file, {{"preset", "fig5b", "--preset"}});
    CHECK(other.sweep.order == 16);
    CHECK(other.sweep.trials == 50);
}

TEST_CASE("config files: line-numbered rejection")
{
    CHECK(error_of("M = 8\ntrails = 10\n") == "run.cfg:2: unknown key 'trails'");
    CHECK(error_of("\n\nM 8\n") == "run.cfg:3: expected 'key = value'");
    CHECK(error_of("M = 8\nM = 16\n") == "run.cfg:2: duplicate key 'M'");
    CHECK(error_of("trials = -3\n").rfind("run.cfg:1:", 0) == 0);
    CHECK(error_of("snr = 10:0:20\n").rfind("run.cfg:1:", 0) == 0);
    CHECK(error_of("decoders = ml,sd\n") == "run.cfg:1: unknown decoder 'sd'");
    CHECK(error_of("preset = fig99\n") == "run.cfg:1: unknown preset 'fig99'");
    CHECK(error_of("M = 12\n").find("invalid configuration") != std::string::npos);
    CHECK(error_of("M = 16\nNt = 16\nNr = 12\n").empty());
}

TEST_CASE("value parsers")
{
    CHECK(parse_snr_grid("0:5:30") == std::vector<double>{0, 5, 10, 15, 20, 25, 30});
    CHECK(parse_snr_grid("5, 15,25") == std::vector<double>{5, 15, 25});
    CHECK(parse_snr_grid("12.5") == std::vector<double>{12.5});
    CHECK(parse_snr_grid("0:0.1:0.3").size() == 4);
    CHECK_THROWS_AS(parse_snr_grid("0:5"), ConfigError);
    CHECK_THROWS_AS(parse_snr_grid("a,b"), ConfigError);

    CHECK(parse_csir("0") == CsirModel::perfect());
    CHECK(parse_csir("1/snr") == CsirModel::variable());
    CHECK(parse_csir("0.2") == CsirModel::fixed(0.2));
    CHECK_THROWS_AS(parse_csir("-1"), ConfigError);

    CHECK(parse_decoders("mm,mmw") == DecoderSet{Decoder::mm, Decoder::mmw});
}

TEST_CASE("presets encode the published scenarios")
{
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset_config(name).validate());
    const struct {
        const char* name;
        std::size_t m, nt, nr;
    } rows[] = {{"fig5a", 8, 8, 8},   {"fig5b", 16, 16, 16}, {"fig6a", 8, 8, 6},    {"fig6b", 16, 16, 12},
                {"fig7a", 8, 8, 10},  {"fig7b", 16, 16, 20}, {"fig10", 16, 16, 16}};
    for (const auto& r : rows) {
        const SweepConfig c = preset_config(r.name);
        CAPTURE(r.name);
        CHECK(c.order == r.m);
        CHECK(c.n_tx == r.nt);
        CHECK(c.n_rx == r.nr);
        CHECK(c.csir == CsirModel::perfect());
    }
    CHECK_THROWS_AS(preset_config("fig1"), ConfigError);
}

TEST_CASE("shortest round-trip number formatting")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::pow(10.0, u(rng)) * (k % 2 ? -1 : 1);
        std::istringstream in("x\n" + format_number(v) + "\n");
        CHECK(same_bits(read_table(in).rows[0][0], v));
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(30.0) == "30");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("sweep CSV: header-first, newline-terminated, locale-independent, exact round trip")
{
    CliConfig cfg = build_config({}, {{"preset", "fig5a", "--preset"},
                                      {"snr", "0,7.5,30", "--snr"},
                                      {"trials", "200", "--trials"},
                                      {"analytic_realizations", "2", "--realizations"},
                                      {"threads", "1", "--threads"}});
    const SweepResult result = run_sweep(cfg.sweep);

    const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
    const std::string text = to_csv(sweep_table(result));
    std::locale::global(saved);

    CHECK(text.rfind("snr_db,ber_ml,ber_mm,ber_mmw,avg_nodes_ml,avg_nodes_mm,c_r_mm,c_r_max,nom_count,analytic_c_mm\n", 0) ==
          0);
    CHECK(text.back() == '\n');
    CHECK(text.find("7.5,") != std::string::npos);

    std::istringstream in(text);
    const CsvTable back = read_table(in);
    REQUIRE(back.rows.size() == 3);
    for (std::size_t s = 0; s < 3; ++s) {
        const auto expect = sweep_row(result.points[s]);
        for (std::size_t c = 0; c < expect.size(); ++c) CHECK(same_bits(back.rows[s][c], expect[c]));
        // the 86.1% ceiling for 8x8 8-QAM, constant down the column
        CHECK(std::abs(back.rows[s][back.column("c_r_max")] - 0.8613) < 5e-5);
    }
    CHECK(to_csv(sweep_table(run_sweep(cfg.sweep))) == text);
}

TEST_CASE("one trial at one SNR gives one data row")
{
    const CliConfig cfg = build_config({}, {{"snr", "10", "--snr"}, {"trials", "1", "--trials"},
                                            {"analytic_realizations", "0", "--realizations"}});
    const std::string text = to_csv(sweep_table(run_sweep(cfg.sweep)));
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.substr(text.rfind(',') + 1) == "nan\n");
}

TEST_CASE("nom CSV")
{
    const CliConfig cfg = build_config({}, {{"preset", "fig3", "--preset"}, {"trials", "300", "--trials"},
                                            {"snr", "0,10,90", "--snr"}});
    const CsvTable t = nom_table(nom_study(cfg.sweep));
    CHECK(t.header == nom_columns());
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[2][1] == 0.0);
    CHECK(t.rows[0][1] >= t.rows[1][1]);
    CHECK(t.rows[0][2] == 300.0);
}

TEST_CASE("predict CSV: noiseless limit and sigma_e2 continuity")
{
    CliConfig cfg = build_config({}, {{"snr", "40", "--snr"}, {"analytic_realizations", "20", "--realizations"}});
    const auto exact = predict_sweep(cfg.sweep);
    const CsvTable t = predict_table(exact, cfg.sweep);
    CHECK(t.header == predict_columns());
    // M N_t + sum_i I_{1/2}(i, N_r) for 8x8 (derived in test_analysis)
    CHECK(std::abs(t.rows[0][1] - 70.429) < 0.5);
    CHECK(t.rows[0][2] == doctest::Approx(1.0 - t.rows[0][1] / 512.0));

    cfg.sweep.csir = CsirModel::fixed(1e-12);
    CHECK(std::abs(predict_sweep(cfg.sweep)[0].analytic_c_mm - exact[0].analytic_c_mm) < 1e-6);
}

TEST_CASE("predict agrees with sweep for fig5a at 10 dB")
{
    const CliConfig cfg = build_config({}, {{"preset", "fig5a", "--preset"},
                                            {"snr", "10", "--snr"},
                                            {"trials", "10000", "--trials"},
                                            {"decoders", "mm", "--decoders"}});
    const double simulated = run_sweep(cfg.sweep).points[0].avg_nodes(Decoder::mm);
    const double predicted = predict_sweep(cfg.sweep)[0].analytic_c_mm;
    CAPTURE(simulated);
    CAPTURE(predicted);
    CHECK(std::abs(predicted - simulated) / simulated <= 0.05);
}

TEST_CASE("trace log of the worked example")
{
    std::ostringstream out;
    const DecodeOutcome r = write_trace(out, worked_example_metrics(), Decoder::mm);
    const std::string log = out.str();
    CHECK(r.index == 0);
    CHECK(r.visited_nodes == 14);
    CHECK(log.find("iteration 1: expand branch 4 -> v = [1 1 1 2 1 1 1 1], d = 0.4; min at branch 1: continue") !=
          std::string::npos);
    CHECK(log.find("iteration 6: expand branch 1") != std::string::npos);
    CHECK(log.find("iteration 7") == std::string::npos);
    CHECK(log.find("stop, branch 1, radius 0.55\n") != std::string::npos);
    CHECK(log.find("visited nodes: 14\n") != std::string::npos);

    std::ostringstream weak;
    CHECK(write_trace(weak, worked_example_metrics(), Decoder::mmw).index == 3);
    CHECK(weak.str().find("stop, branch 4, radius 0.6\n") != std::string::npos);
    CHECK_THROWS_AS(write_trace(weak, worked_example_metrics(), Decoder::ml), std::invalid_argument);
}

TEST_CASE("trace log: single branch and random trials")
{
    for (std::size_t nr : {1u, 4u, 9u}) {
        std::ostringstream out;
        write_trace(out, single_branch_metrics(nr), Decoder::mm);
        const std::string log = out.str();
        std::size_t count = 0;
        for (auto pos = log.find("iteration "); pos != std::string::npos; pos = log.find("iteration ", pos + 1)) ++count;
        CHECK(count == nr - 1);
    }

    CliConfig cfg = build_config({}, {{"snr", "5", "--snr"}});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.sweep.base_seed = seed;
        std::ostringstream out;
        const DecodeOutcome r = write_trial_trace(out, cfg.sweep, Decoder::mm);
        const std::string log = out.str();
        std::size_t iterations = 0;
        for (auto pos = log.find("\niteration "); pos != std::string::npos; pos = log.find("\niteration ", pos + 1))
            ++iterations;
        // every iteration visits exactly one node beyond the first level
        CHECK(r.visited_nodes == 64 + iterations);
        CHECK(log.find("visited nodes: " + std::to_string(r.visited_nodes) + "\n") != std::string::npos);

        // same draw as trial 0 of the sweep
        Rng rng(derive_seed(seed, 0, 0, 0));
        const TrialRecord rec = run_trial(rng, cfg.sweep, build_qam(8), 5.0);
        CHECK(rec.index[1] == r.index);
        CHECK(rec.visited_nodes[1] == r.visited_nodes);
    }
}
