#include "sm/decode.hpp"

#include <stdexcept>

namespace sm {

ReceivedMetrics::ReceivedMetrics(std::span<const cdouble> y, const CandidateSet& candidates)
    : y_(y), candidates_(&candidates)
{
    if (y.size() != candidates.n_rx()) {
        throw std::invalid_argument("received vector length differs from candidate length");
    }
}

TableMetrics::TableMetrics(std::vector<std::vector<double>> step) : step_(std::move(step))
{
    for (const auto& row : step_) {
        if (row.size() != step_.front().size()) throw std::invalid_argument("ragged step-cost table");
        for (double c : row) {
            if (!(c >= 0.0)) throw std::invalid_argument("step costs must be nonnegative");
        }
    }
}

TableMetrics TableMetrics::from_accumulated(const std::vector<std::vector<double>>& acc)
{
    std::vector<std::vector<double>> step(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        step[i].resize(acc[i].size());
        for (std::size_t j = 0; j < acc[i].size(); ++j) {
            step[i][j] = i == 0 ? acc[0][j] : acc[i][j] - acc[i - 1][j];
        }
    }
    return TableMetrics(std::move(step));
}

SearchState::SearchState(const MetricProvider& metrics)
    : metrics_(&metrics), levels_(metrics.levels()), v_(metrics.branches(), 1), d_(metrics.branches())
{
    if (levels_ == 0 || v_.empty()) throw std::invalid_argument("search tree must be nonempty");
    for (std::size_t j = 0; j < d_.size(); ++j) d_[j] = metrics.step_cost(0, j);
    visited_ = d_.size();
    full_count_ = levels_ == 1 ? d_.size() : 0;
}

std::size_t SearchState::argmin() const
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < d_.size(); ++j) {
        if (d_[j] < d_[best]) best = j;
    }
    return best;
}

void SearchState::expand(std::size_t j)
{
    d_[j] += metrics_->step_cost(v_[j], j);
    ++v_[j];
    ++visited_;
    if (v_[j] == levels_) ++full_count_;
}

DecodeOutcome ml_decode(const MetricProvider& metrics)
{
    const std::size_t levels = metrics.levels();
    const std::size_t branches = metrics.branches();
    if (levels == 0 || branches == 0) throw std::invalid_argument("search tree must be nonempty");

    DecodeOutcome out;
    out.final_radius = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < branches; ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < levels; ++i) d += metrics.step_cost(i, j);
        if (d < out.final_radius) {
            out.final_radius = d;
            out.index = j;
        }
    }
    out.visited_nodes = levels * branches;
    return out;
}

namespace {

enum class StopRule { optimal, first_full };

DecodeOutcome best_first(const MetricProvider& metrics, StopRule rule, const TraceHook& trace)
{
    SearchState state(metrics);
    std::size_t j_min = state.argmin();
    std::size_t iteration = 0;
    // every branch can be expanded at most N_r - 1 times
    const std::size_t max_expansions = (metrics.levels() - 1) * metrics.branches();

    while (!state.is_full(j_min) && iteration < max_expansions) {
        const std::size_t expanded = j_min;
        state.expand(expanded);
        ++iteration;
        bool stop = false;
        if (rule == StopRule::first_full && state.is_full(expanded)) {
            stop = true;
        } else {
            j_min = state.argmin();
            stop = state.is_full(j_min);
        }
        if (trace) {
            trace(IterationEvent{iteration, expanded, state.depths(), state.metrics()[expanded],
                                 stop && rule == StopRule::first_full ? expanded : j_min, stop});
        }
        if (stop && rule == StopRule::first_full) {
            j_min = expanded;
            break;
        }
    }
    return {j_min, state.visited_nodes(), state.metrics()[j_min]};
}

}  // namespace

DecodeOutcome mm_decode(const MetricProvider& metrics, const TraceHook& trace)
{
    return best_first(metrics, StopRule::optimal, trace);
}

DecodeOutcome mmw_decode(const MetricProvider& metrics, const TraceHook& trace)
{
    return best_first(metrics, StopRule::first_full, trace);
}

std::size_t count_nodes_within_radius(const MetricProvider& metrics, double radius)
{
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    const std::size_t branches = metrics.branches();
    std::size_t count = branches;
    for (std::size_t j = 0; j < branches; ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < metrics.levels(); ++i) {
            d += metrics.step_cost(i, j);
            if (d <= radius) ++count;
        }
    }
    return count;
}

}  // namespace sm
