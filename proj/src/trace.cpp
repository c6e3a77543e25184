#include "sm/trace.hpp"

#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sm {

TableMetrics worked_example_metrics()
{
    // Accumulated EDs d_{i,j}; columns are branches 1..8. Only branches 1, 4,
    // 6 and 7 are ever expanded; the rest stay above the final radius.
    return TableMetrics::from_accumulated({
        {0.2, 0.9, 1.1, 0.1, 0.8, 0.3, 0.35, 1.0},
        {0.5, 1.3, 1.5, 0.4, 1.2, 0.7, 0.8, 1.2},
        {0.55, 1.6, 1.9, 0.6, 1.4, 1.0, 1.1, 1.3},
    });
}

TableMetrics single_branch_metrics(std::size_t levels)
{
    if (levels == 0) throw std::invalid_argument("levels must be positive");
    return TableMetrics(std::vector<std::vector<double>>(levels, std::vector<double>{1.0}));
}

namespace {

std::ostringstream make_stream()
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    return s;
}

}  // namespace

DecodeOutcome write_trace(std::ostream& out, const MetricProvider& metrics, Decoder decoder)
{
    if (decoder == Decoder::ml) throw std::invalid_argument("trace supports the mm and mmw decoders only");

    auto s = make_stream();
    s << (decoder == Decoder::mm ? "m-M" : "m-Mw") << " search: " << metrics.branches() << " branches, "
      << metrics.levels() << " levels\n";

    const SearchState start(metrics);
    s << "start: d = [";
    for (std::size_t j = 0; j < metrics.branches(); ++j) s << (j ? " " : "") << start.metrics()[j];
    s << "], min at branch " << start.argmin() + 1 << '\n';

    const TraceHook hook = [&](const IterationEvent& e) {
        s << "iteration " << e.iteration << ": expand branch " << e.expanded + 1 << " -> v = [";
        for (std::size_t j = 0; j < e.visited.size(); ++j) s << (j ? " " : "") << e.visited[j];
        s << "], d = " << e.metric << "; ";
        if (decoder == Decoder::mmw && e.stop) {
            s << "branch " << e.next_min + 1 << " fully expanded";
        } else {
            s << "min at branch " << e.next_min + 1;
        }
        s << (e.stop ? ": stop" : ": continue") << '\n';
    };
    const DecodeOutcome result = decoder == Decoder::mm ? mm_decode(metrics, hook) : mmw_decode(metrics, hook);

    s << "stop, branch " << result.index + 1 << ", radius " << result.final_radius << '\n';
    s << "visited nodes: " << result.visited_nodes << '\n';
    out << s.str();
    return result;
}

DecodeOutcome write_trial_trace(std::ostream& out, const SweepConfig& config, Decoder decoder)
{
    config.validate();
    const Constellation constellation = build_qam(config.order);
    Rng rng(derive_seed(config.base_seed, 0, 0, 0));
    const double snr_db = config.snr_db.front();
    const TrialDraw draw = draw_trial(rng, config, constellation, snr_db);
    const ReceivedMetrics metrics(draw.y, draw.candidates);

    auto s = make_stream();
    s << "trial 0 at " << snr_db << " dB, " << to_string(config.csir) << ": transmitted branch "
      << draw.candidates.index_of(draw.frame) + 1 << " (antenna " << draw.frame.antenna << ", symbol "
      << draw.frame.symbol << ")\n";
    out << s.str();
    return write_trace(out, metrics, decoder);
}

}  // namespace sm
