// Coarse grid search over (c1, c2) for a preset. Prints the mean final metric
// per horizon for every grid point and the point closest to the targets (or
// the smallest metric when no targets are given).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

#include "qdgd/errors.hpp"
#include "qdgd/experiment.hpp"
#include "qdgd/presets.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Grid search for the step-size constants c1, c2"};
  std::string name;
  std::vector<double> c1s{0.25, 0.5, 1, 2, 4};
  std::vector<double> c2s{0.025, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> targets;
  std::vector<std::string> settings;
  std::string metric = "relative";
  int reps = 10;
  app.add_option("preset", name, "Preset to tune")->required();
  app.add_option("--c1", c1s, "Candidate c1 values");
  app.add_option("--c2", c2s, "Candidate c2 values");
  app.add_option("--target", targets, "Target metric per horizon (in the preset's T order)");
  app.add_option("--reps", reps, "Replications per grid point");
  app.add_option("--set", settings, "Extra key=value config assignments");
  app.add_option("--metric", metric, "relative | loss (node-average objective minus f*)")
      ->check(CLI::IsMember({"relative", "loss"}));
  CLI11_PARSE(app, argc, argv);

  try {
    qdgd::RunConfig base = qdgd::preset(name);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw qdgd::ConfigError("--set expects key=value");
      qdgd::apply_setting(base, s.substr(0, eq), s.substr(eq + 1));
    }
    base.replications = reps;
    base.record_stride = 1 << 30;
    if (metric == "loss") base.node_objectives = true;
    if (!targets.empty() && targets.size() != base.T.size()) {
      throw qdgd::ConfigError("--target needs one value per horizon");
    }
    const qdgd::Instance instance = qdgd::build_instance(base);

    double best_score = std::numeric_limits<double>::infinity();
    double best_c1 = 0, best_c2 = 0;
    for (double c1 : c1s) {
      for (double c2 : c2s) {
        qdgd::RunConfig c = base;
        c.c1 = c1;
        c.c2 = c2;
        std::printf("c1=%-8.4g c2=%-8.4g", c1, c2);
        double score = 0;
        try {
          const auto result = qdgd::run_experiment(c, instance);
          for (size_t k = 0; k < result.horizons.size(); ++k) {
            const auto& last = result.horizons[k].mean.records.back();
            const double v = metric == "loss" ? last.node_average_objective - result.fstar : last.relative_error;
            std::printf("  T=%lld:%.5g", result.horizons[k].T, v);
            if (!targets.empty()) score += std::pow(std::log(v / targets[k]), 2);
            else if (k + 1 == result.horizons.size()) score = v;
          }
        } catch (const qdgd::NumericFailure& e) {
          std::printf("  diverged (%s)", e.what());
          score = std::numeric_limits<double>::infinity();
        }
        std::printf("  score=%.4g\n", score);
        if (score < best_score) {
          best_score = score;
          best_c1 = c1;
          best_c2 = c2;
        }
      }
    }
    std::printf("best c1=%.6g c2=%.6g score=%.6g\n", best_c1, best_c2, best_score);
  } catch (const qdgd::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
