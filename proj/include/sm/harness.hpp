// Monte Carlo engine. Every trial draws its own RNG from a counter-based seed
// (base seed, SNR index, trial index), all decoders in a trial see the same
// draw, and per-point aggregates are exact integer sums, so results do not
// depend on how trials are scheduled across threads.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "sm/analysis.hpp"
#include "sm/core.hpp"
#include "sm/decode.hpp"

namespace sm {

enum class Decoder : unsigned { ml = 0, mm = 1, mmw = 2 };

inline constexpr std::array<Decoder, 3> kAllDecoders{Decoder::ml, Decoder::mm, Decoder::mmw};

const char* to_string(Decoder d);

class DecoderSet {
public:
    constexpr DecoderSet() = default;
    constexpr DecoderSet(std::initializer_list<Decoder> ds)
    {
        for (auto d : ds) insert(d);
    }
    constexpr void insert(Decoder d) { mask_ |= 1u << static_cast<unsigned>(d); }
    constexpr bool contains(Decoder d) const { return (mask_ >> static_cast<unsigned>(d)) & 1u; }
    constexpr bool empty() const { return mask_ == 0; }

    friend constexpr bool operator==(DecoderSet, DecoderSet) = default;

private:
    unsigned mask_ = 0;
};

struct SweepConfig {
    std::size_t order = 8;
    std::size_t n_tx = 8;
    std::size_t n_rx = 8;
    CsirModel csir;
    std::vector<double> snr_db{0.0};
    std::size_t trials = 10000;
    DecoderSet decoders{Decoder::ml, Decoder::mm, Decoder::mmw};
    std::uint64_t base_seed = 1;
    std::size_t analytic_realizations = 200;
    /// Worker threads; 0 means SM_THREADS if set, else hardware concurrency.
    std::size_t threads = 0;

    Scenario scenario_at(double snr_db) const;
    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct TrialRecord {
    double snr_db = 0.0;
    std::size_t bits_per_trial = 0;
    std::array<std::size_t, 3> bit_errors{};
    std::array<std::size_t, 3> visited_nodes{};
    std::array<std::size_t, 3> index{};
    DecodeOutcome mm_outcome;  // valid when mm ran
    bool nom = false;          // mmw answer differs from the ML answer
    bool mm_matches_ml = true;
    std::size_t transmitted = 0;
};

/// Random draw of one channel use, before any decoding.
struct TrialDraw {
    Bits bits;
    SmFrame frame;
    ChannelPair channel;
    CVector y;
    CandidateSet candidates;
};

/// Draw order: one 64-bit word for the bits, H, E (if any), then w.
TrialDraw draw_trial(Rng& rng, const SweepConfig& config, const Constellation& constellation, double snr_db);

/// One channel use: draw_trial, then every requested decoder on the same
/// received vector.
TrialRecord run_trial(Rng& rng, const SweepConfig& config, const Constellation& constellation, double snr_db);

/// Counter-based seed for (base, stream, a, b).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t a, std::uint64_t b);

struct SweepPoint {
    double snr_db = 0.0;
    std::size_t trials = 0;
    std::size_t bits_per_trial = 0;
    DecoderSet decoders;
    std::array<std::uint64_t, 3> bit_errors{};
    std::array<std::uint64_t, 3> visited_nodes{};
    std::uint64_t nom_count = 0;
    std::uint64_t mm_mismatches = 0;
    /// NaN when not requested or when the quadrature failed.
    double analytic_c_mm = 0.0;
    std::string analytic_error;

    std::size_t order = 0, n_tx = 0, n_rx = 0;

    double ber(Decoder d) const;
    double avg_nodes(Decoder d) const;
    double c_r(Decoder d) const;
    double c_r_max() const;
    double c_r_analytic() const;
    bool has_nom() const;
};

/// 1 - C / (M N_t N_r) for an analytic prediction C without the range
/// check of complexity_reduction; NaN in, NaN out.
double analytic_reduction(double predicted, std::size_t order, std::size_t n_tx, std::size_t n_rx);

struct SweepResult {
    std::vector<SweepPoint> points;
    bool numeric_failure() const;
};

/// Runs `trials` trials per SNR point. Throws std::logic_error if m-M ever
/// disagrees with ML.
SweepResult run_sweep(const SweepConfig& config);

/// Analytic expected m-M complexity averaged over `realizations` fresh
/// (x_t, H) draws at one SNR point.
double analytic_average(const SweepConfig& config, const Constellation& constellation, std::size_t snr_index);

struct NomPoint {
    double snr_db = 0.0;
    std::uint64_t nom_count = 0;
    std::size_t trials = 0;
};

/// Per-SNR count of trials in which m-Mw misses the ML answer.
std::vector<NomPoint> nom_study(SweepConfig config);

struct PredictPoint {
    double snr_db = 0.0;
    /// NaN with `error` set when the quadrature failed.
    double analytic_c_mm = 0.0;
    std::string error;
};

/// Analytic predictor alone (no trials) at every SNR point.
std::vector<PredictPoint> predict_sweep(const SweepConfig& config);

/// Resolves SweepConfig::threads (0 -> SM_THREADS -> hardware concurrency).
std::size_t resolve_threads(std::size_t requested);

}  // namespace sm
