#include "sm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sm {

const char* to_string(Decoder d)
{
    switch (d) {
    case Decoder::ml:
        return "ml";
    case Decoder::mm:
        return "mm";
    case Decoder::mmw:
        return "mmw";
    }
    return "?";
}

Scenario SweepConfig::scenario_at(double snr_db) const
{
    return Scenario{order, n_tx, n_rx, noise_variance_for_snr_db(snr_db), csir};
}

void SweepConfig::validate() const
{
    if (order < 2 || order > 128 || (order & (order - 1)) != 0) {
        throw std::invalid_argument("M must be a power of two in [2, 128]");
    }
    if (n_tx == 0 || (n_tx & (n_tx - 1)) != 0) throw std::invalid_argument("Nt must be a power of two");
    if (n_rx == 0) throw std::invalid_argument("Nr must be positive");
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (snr_db.empty()) throw std::invalid_argument("at least one SNR point is required");
    for (double s : snr_db) {
        if (!std::isfinite(s)) throw std::invalid_argument("SNR points must be finite");
    }
    if (decoders.empty()) throw std::invalid_argument("at least one decoder must be enabled");
    if (csir.kind == CsirModel::Kind::fixed && !(csir.sigma_e2 >= 0.0)) {
        throw std::invalid_argument("sigma_e2 must be nonnegative");
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finalizer applied over the counter tuple
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    h = mix(h ^ stream);
    h = mix(h ^ a);
    h = mix(h ^ b);
    return h;
}

TrialDraw draw_trial(Rng& rng, const SweepConfig& config, const Constellation& constellation, double snr_db)
{
    const double snr_linear = db_to_linear(snr_db);
    const double sigma_n2 = 1.0 / snr_linear;

    Bits bits(spectral_efficiency(config.n_tx, config.order));
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < bits.size(); ++b) bits[b] = (word >> b) & 1u;
    const SmFrame frame = split_bits(bits, config.n_tx, config.order);

    const CMatrix h = sample_channel(rng, config.n_rx, config.n_tx);
    ChannelPair channel = apply_csir_error(h, config.csir, snr_linear, rng);
    const CVector w = sample_noise(rng, config.n_rx, sigma_n2);

    CVector y = sm_encode(frame, channel, constellation);
    for (std::size_t n = 0; n < y.size(); ++n) y[n] += w[n];

    CandidateSet candidates = enumerate_candidates(channel, constellation);
    return TrialDraw{std::move(bits), frame, std::move(channel), std::move(y), std::move(candidates)};
}

TrialRecord run_trial(Rng& rng, const SweepConfig& config, const Constellation& constellation, double snr_db)
{
    const TrialDraw draw = draw_trial(rng, config, constellation, snr_db);
    const Bits& bits = draw.bits;
    const CandidateSet& candidates = draw.candidates;

    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.bits_per_trial = bits.size();
    rec.transmitted = candidates.index_of(draw.frame);
    const ReceivedMetrics metrics(draw.y, candidates);

    auto score = [&](Decoder d, const DecodeOutcome& out) {
        const auto k = static_cast<std::size_t>(d);
        rec.index[k] = out.index;
        rec.visited_nodes[k] = out.visited_nodes;
        const SmFrame decoded{candidates.antenna_of(out.index), candidates.symbol_of(out.index)};
        const Bits got = merge_bits(decoded, config.n_tx, config.order);
        std::size_t errors = 0;
        for (std::size_t b = 0; b < bits.size(); ++b) errors += bits[b] != got[b];
        rec.bit_errors[k] = errors;
    };

    const auto& ds = config.decoders;
    if (ds.contains(Decoder::ml)) score(Decoder::ml, ml_decode(metrics));
    if (ds.contains(Decoder::mm)) {
        rec.mm_outcome = mm_decode(metrics);
        score(Decoder::mm, rec.mm_outcome);
    }
    if (ds.contains(Decoder::mmw)) score(Decoder::mmw, mmw_decode(metrics));

    const auto ml = static_cast<std::size_t>(Decoder::ml);
    const auto mm = static_cast<std::size_t>(Decoder::mm);
    const auto mmw = static_cast<std::size_t>(Decoder::mmw);
    if (ds.contains(Decoder::ml) && ds.contains(Decoder::mm)) rec.mm_matches_ml = rec.index[mm] == rec.index[ml];
    if (ds.contains(Decoder::mmw)) {
        if (ds.contains(Decoder::ml)) {
            rec.nom = rec.index[mmw] != rec.index[ml];
        } else if (ds.contains(Decoder::mm)) {
            rec.nom = rec.index[mmw] != rec.index[mm];
        }
    }
    return rec;
}

double SweepPoint::ber(Decoder d) const
{
    if (!decoders.contains(d)) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(bit_errors[static_cast<std::size_t>(d)]) /
           (static_cast<double>(trials) * static_cast<double>(bits_per_trial));
}

double SweepPoint::avg_nodes(Decoder d) const
{
    if (!decoders.contains(d)) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(visited_nodes[static_cast<std::size_t>(d)]) / static_cast<double>(trials);
}

double SweepPoint::c_r(Decoder d) const
{
    if (!decoders.contains(d)) return std::numeric_limits<double>::quiet_NaN();
    return complexity_reduction(avg_nodes(d), order, n_tx, n_rx);
}

double SweepPoint::c_r_max() const { return max_complexity_reduction(order, n_tx, n_rx); }

double SweepPoint::c_r_analytic() const { return analytic_reduction(analytic_c_mm, order, n_tx, n_rx); }

double analytic_reduction(double predicted, std::size_t order, std::size_t n_tx, std::size_t n_rx)
{
    if (!std::isfinite(predicted)) return std::numeric_limits<double>::quiet_NaN();
    // the M N_t correction lets the prediction exceed M N_t N_r at very low SNR
    return 1.0 - predicted / static_cast<double>(order * n_tx * n_rx);
}

bool SweepPoint::has_nom() const
{
    return decoders.contains(Decoder::mmw) && (decoders.contains(Decoder::ml) || decoders.contains(Decoder::mm));
}

bool SweepResult::numeric_failure() const
{
    return std::any_of(points.begin(), points.end(), [](const SweepPoint& p) { return !p.analytic_error.empty(); });
}

std::size_t resolve_threads(std::size_t requested)
{
    std::size_t n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("SM_THREADS")) {
            char* end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end != env && *end == '\0' && v > 0) n = v;
        }
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

namespace {

// Runs body(begin, end, worker) over [0, count) split into contiguous
// chunks, one per worker.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t threads, Body&& body)
{
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        body(std::size_t{0}, count, std::size_t{0});
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = count * t / threads;
        const std::size_t end = count * (t + 1) / threads;
        pool.emplace_back([&, begin, end, t] {
            try {
                body(begin, end, t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

struct Tally {
    std::array<std::uint64_t, 3> bit_errors{};
    std::array<std::uint64_t, 3> visited{};
    std::uint64_t nom = 0;
    std::uint64_t mismatches = 0;
};

constexpr std::uint64_t kTrialStream = 0;
constexpr std::uint64_t kAnalyticStream = 1;

}  // namespace

double analytic_average(const SweepConfig& config, const Constellation& constellation, std::size_t snr_index)
{
    const std::size_t n = config.analytic_realizations;
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const Scenario scenario = config.scenario_at(config.snr_db.at(snr_index));

    std::vector<double> values(n);
    parallel_chunks(n, resolve_threads(config.threads), [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(derive_seed(config.base_seed, kAnalyticStream, snr_index, r));
            const CMatrix h = sample_channel(rng, config.n_rx, config.n_tx);
            const std::size_t antenna = static_cast<std::size_t>(rng() % config.n_tx);
            const std::size_t symbol = static_cast<std::size_t>(rng() % config.order);
            const CandidateSet hypotheses(h, constellation);
            values[r] = expected_complexity(scenario, hypotheses, hypotheses.index_of({antenna, symbol}), constellation);
        }
    });
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(n);
}

SweepResult run_sweep(const SweepConfig& config)
{
    config.validate();
    const Constellation constellation = build_qam(config.order);
    const std::size_t threads = resolve_threads(config.threads);

    SweepResult result;
    for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
        const double snr_db = config.snr_db[s];
        std::vector<Tally> tallies(threads);
        parallel_chunks(config.trials, threads, [&](std::size_t begin, std::size_t end, std::size_t worker) {
            Tally& tally = tallies[worker];
            for (std::size_t t = begin; t < end; ++t) {
                Rng rng(derive_seed(config.base_seed, kTrialStream, s, t));
                const TrialRecord rec = run_trial(rng, config, constellation, snr_db);
                for (std::size_t k = 0; k < 3; ++k) {
                    tally.bit_errors[k] += rec.bit_errors[k];
                    tally.visited[k] += rec.visited_nodes[k];
                }
                tally.nom += rec.nom;
                tally.mismatches += !rec.mm_matches_ml;
            }
        });

        SweepPoint point;
        point.snr_db = snr_db;
        point.trials = config.trials;
        point.bits_per_trial = spectral_efficiency(config.n_tx, config.order);
        point.decoders = config.decoders;
        point.order = config.order;
        point.n_tx = config.n_tx;
        point.n_rx = config.n_rx;
        for (const Tally& t : tallies) {
            for (std::size_t k = 0; k < 3; ++k) {
                point.bit_errors[k] += t.bit_errors[k];
                point.visited_nodes[k] += t.visited[k];
            }
            point.nom_count += t.nom;
            point.mm_mismatches += t.mismatches;
        }
        if (point.mm_mismatches != 0) {
            throw std::logic_error("m-M disagreed with ML in " + std::to_string(point.mm_mismatches) +
                                   " trials at " + std::to_string(snr_db) + " dB");
        }

        try {
            point.analytic_c_mm = analytic_average(config, constellation, s);
        } catch (const NumericFailure& e) {
            point.analytic_c_mm = std::numeric_limits<double>::quiet_NaN();
            point.analytic_error = e.what();
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

std::vector<NomPoint> nom_study(SweepConfig config)
{
    if (!config.decoders.contains(Decoder::ml) || !config.decoders.contains(Decoder::mmw)) {
        throw std::invalid_argument("nom_study needs both the ml and mmw decoders");
    }
    config.analytic_realizations = 0;
    const SweepResult sweep = run_sweep(config);
    std::vector<NomPoint> out;
    out.reserve(sweep.points.size());
    for (const auto& p : sweep.points) out.push_back({p.snr_db, p.nom_count, p.trials});
    return out;
}

std::vector<PredictPoint> predict_sweep(const SweepConfig& config)
{
    config.validate();
    if (config.analytic_realizations == 0) throw std::invalid_argument("analytic_realizations must be at least 1");
    const Constellation constellation = build_qam(config.order);
    std::vector<PredictPoint> out;
    for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
        PredictPoint p{config.snr_db[s], 0.0, {}};
        try {
            p.analytic_c_mm = analytic_average(config, constellation, s);
        } catch (const NumericFailure& e) {
            p.analytic_c_mm = std::numeric_limits<double>::quiet_NaN();
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace sm
