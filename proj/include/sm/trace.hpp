// Human-readable iteration logs of the best-first search. Branches are
// printed with 1-based labels to match the worked example; decoded indices
// elsewhere stay 0-based.
#pragma once

#include <iosfwd>

#include "sm/decode.hpp"
#include "sm/harness.hpp"

namespace sm {

/// Worked example with M = 2, N_t = 4, N_r = 3. m-M expands branches
/// 4, 1, 6, 7, 4, 1 and stops on branch 1 at radius 0.55 with 14 visited
/// nodes; m-Mw stops one iteration earlier on branch 4 at radius 0.6.
TableMetrics worked_example_metrics();

/// A tree with one branch of `levels` nodes and unit step costs.
TableMetrics single_branch_metrics(std::size_t levels);

/// Runs `decoder` (mm or mmw) with a trace hook and writes one line per
/// iteration plus a final node count. Returns the decoder's outcome.
DecodeOutcome write_trace(std::ostream& out, const MetricProvider& metrics, Decoder decoder);

/// Traces trial 0 of the first SNR point of `config`, drawn exactly as
/// run_sweep would draw it.
DecodeOutcome write_trial_trace(std::ostream& out, const SweepConfig& config, Decoder decoder);

}  // namespace sm
