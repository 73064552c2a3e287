#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdgd/analysis.hpp"
#include "qdgd/config.hpp"
#include "qdgd/core.hpp"
#include "qdgd/graph.hpp"
#include "qdgd/objectives.hpp"
#include "qdgd/quantizers.hpp"

namespace qdgd {

/// Everything a run needs, built deterministically from a config.
struct Instance {
  Network network;
  ObjectiveSet objective;
  Quantizer quantizer;
};

Network build_network(const RunConfig& config);
ObjectiveSet build_objective(const RunConfig& config);
Quantizer build_quantizer(const RunConfig& config);
Instance build_instance(const RunConfig& config);

TheoryParams build_theory_params(const RunConfig& config, const Instance& instance);

/// Traces for one horizon T: one per replication and their mean.
struct HorizonResult {
  long long T = 0;
  std::vector<ConvergenceTrace> replications;
  ConvergenceTrace mean;
};

struct ExperimentResult {
  RunConfig config;
  std::vector<HorizonResult> horizons;
  double fstar = 0;
};

/// Replication r of horizon T draws from DrawKeys{seed, r}; results do not
/// depend on the order replications are executed in.
ExperimentResult run_experiment(const RunConfig& config);
ExperimentResult run_experiment(const RunConfig& config, const Instance& instance);

ConvergenceTrace mean_trace(const std::vector<ConvergenceTrace>& traces);

/// Runs one replication of the configured algorithm for horizon T.
RunResult run_replication(const RunConfig& config, const Instance& instance, long long T, std::uint64_t replication);

std::string trace_csv(const ConvergenceTrace& trace);
void emit_trace_csv(const ConvergenceTrace& trace, const std::string& path);
ConvergenceTrace parse_trace_csv(const std::string& text);

std::string tradeoff_csv(const TradeoffTable& table);
TradeoffTable run_tradeoff(const RunConfig& config, TheoryParams* used = nullptr);

/// Key-value text: instance constants, thresholds and bounds at each T.
std::string bounds_report_text(const RunConfig& config);

}  // namespace qdgd
