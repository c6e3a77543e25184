// Tree-search detectors for spatial modulation.
//
// Every hypothesis j is a branch of N_r nodes; the node at level i holds the
// partial Euclidean distance accumulated over receive antennas 0..i. The
// detectors only see step costs through MetricProvider, so all three share
// one summation order per branch and therefore bit-identical node metrics.
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sm/core.hpp"

namespace sm {

/// Lazily evaluated step costs |y_n - x_{n,j}|^2.
class MetricProvider {
public:
    virtual ~MetricProvider() = default;

    virtual std::size_t levels() const = 0;
    virtual std::size_t branches() const = 0;

    /// Nonnegative, deterministic, side-effect free.
    virtual double step_cost(std::size_t level, std::size_t branch) const = 0;
};

/// Step costs from a received vector and a candidate set.
class ReceivedMetrics final : public MetricProvider {
public:
    ReceivedMetrics(std::span<const cdouble> y, const CandidateSet& candidates);

    std::size_t levels() const override { return y_.size(); }
    std::size_t branches() const override { return candidates_->size(); }
    double step_cost(std::size_t level, std::size_t branch) const override
    {
        return std::norm(y_[level] - (*candidates_)[branch][level]);
    }

private:
    std::span<const cdouble> y_;
    const CandidateSet* candidates_;
};

/// Explicit step-cost table, step[level][branch]. Used for hand-built search
/// scenarios.
class TableMetrics final : public MetricProvider {
public:
    explicit TableMetrics(std::vector<std::vector<double>> step);

    /// Builds step costs from accumulated node metrics acc[level][branch].
    static TableMetrics from_accumulated(const std::vector<std::vector<double>>& acc);

    std::size_t levels() const override { return step_.size(); }
    std::size_t branches() const override { return step_.empty() ? 0 : step_.front().size(); }
    double step_cost(std::size_t level, std::size_t branch) const override { return step_[level][branch]; }

private:
    std::vector<std::vector<double>> step_;
};

struct DecodeOutcome {
    std::size_t index = 0;
    std::size_t visited_nodes = 0;
    double final_radius = 0.0;
};

/// One node expansion of the best-first search. `next_min` is the argmin of
/// the ED vector after the update and `stop` is true when that branch is
/// fully expanded.
struct IterationEvent {
    std::size_t iteration = 0;
    std::size_t expanded = 0;
    std::span<const std::size_t> visited;
    double metric = 0.0;
    std::size_t next_min = 0;
    bool stop = false;
};

using TraceHook = std::function<void(const IterationEvent&)>;

/// Per-branch search bookkeeping: visited depth v[j] and accumulated ED d[j].
class SearchState {
public:
    explicit SearchState(const MetricProvider& metrics);

    /// Lowest-index branch holding the minimum of d.
    std::size_t argmin() const;

    /// Adds the next level of branch j. Requires !is_full(j).
    void expand(std::size_t j);

    bool is_full(std::size_t j) const { return v_[j] == levels_; }
    std::size_t full_count() const noexcept { return full_count_; }
    std::size_t visited_nodes() const noexcept { return visited_; }

    std::span<const std::size_t> depths() const noexcept { return v_; }
    std::span<const double> metrics() const noexcept { return d_; }

private:
    const MetricProvider* metrics_;
    std::size_t levels_;
    std::vector<std::size_t> v_;
    std::vector<double> d_;
    std::size_t full_count_ = 0;
    std::size_t visited_ = 0;
};

/// Exhaustive search; ties go to the lowest index.
DecodeOutcome ml_decode(const MetricProvider& metrics);

/// Minimum-distance-of-maximum-length search: expand the globally smallest
/// partial metric one level at a time and stop once that minimum sits on a
/// fully expanded branch. Returns the ML index.
DecodeOutcome mm_decode(const MetricProvider& metrics, const TraceHook& trace = {});

/// Same search without the optimality check: stops as soon as any branch
/// becomes fully expanded.
DecodeOutcome mmw_decode(const MetricProvider& metrics, const TraceHook& trace = {});

/// M*N_t plus the number of nodes (all levels, all branches) whose
/// accumulated metric is <= radius.
std::size_t count_nodes_within_radius(const MetricProvider& metrics, double radius);

}  // namespace sm
