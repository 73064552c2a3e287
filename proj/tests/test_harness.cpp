#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdgd/config.hpp"
#include "qdgd/dataset.hpp"
#include "qdgd/errors.hpp"
#include "qdgd/experiment.hpp"
#include "qdgd/presets.hpp"

using namespace qdgd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "qdgd_harness_test";
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct Cli {
  int code;
  std::string out;
};

Cli run_cli(const std::string& args) {
  const fs::path log = scratch_dir() / "cli_out.txt";
  const std::string cmd = std::string(QDGD_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
}

RunConfig tiny_quadratic() {
  RunConfig c;
  c.n = 6;
  c.p = 4;
  c.edge_prob = 0.6;
  c.T = {0, 40};
  c.delta = 0.3;
  c.sigma2 = 2.0;
  c.replications = 4;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_config_text("experiment = quadratic\n");
  CHECK(c.x0 == 0.0);
  CHECK(c.replications == 1);
  CHECK(c == RunConfig{});
}

TEST_CASE("config errors carry the line and key") {
  try {
    parse_config_text("n = 10\n\ndelta = 0.5\n");
    FAIL("accepted delta = 1/2");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("delta") != std::string::npos);
  }
  try {
    parse_config_text("n = 10\nbogus = 1\n");
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("unknown key 'bogus'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("n = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("replications = 0\n"), ConfigError);
}

TEST_CASE("config round trip") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const RunConfig c = preset(name);
    CHECK(parse_config_text(serialize(c)) == c);
  }
  RunConfig odd = tiny_quadratic();
  odd.c1 = 0.1 + 0.2;
  odd.s_values = {1, 77, 1e19};
  odd.label_rule = "class:3";
  CHECK(parse_config_text(serialize(odd)) == odd);
}

TEST_CASE("presets are valid and cover every experiment family") {
  std::vector<std::string> experiments;
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const RunConfig c = preset(name);
    CHECK_NOTHROW(validate(c));
    experiments.push_back(c.experiment);
  }
  for (const char* e : {"quadratic", "ridge", "logistic", "tradeoff"}) {
    CHECK(std::find(experiments.begin(), experiments.end(), e) != experiments.end());
  }
  CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
}

TEST_CASE("experiments are deterministic and replication-order free") {
  const RunConfig c = tiny_quadratic();
  const Instance inst = build_instance(c);
  const ExperimentResult a = run_experiment(c, inst);
  const ExperimentResult b = run_experiment(c);
  REQUIRE(a.horizons.size() == 2);
  const HorizonResult& h = a.horizons[1];
  CHECK(trace_csv(h.mean) == trace_csv(b.horizons[1].mean));
  CHECK(h.replications[0].records.back().squared_error != h.replications[1].records.back().squared_error);

  // Run the replications in reverse and average again.
  std::vector<ConvergenceTrace> reversed;
  for (int r = c.replications - 1; r >= 0; --r) {
    reversed.push_back(run_replication(c, inst, 40, static_cast<std::uint64_t>(r)).trace);
  }
  const ConvergenceTrace m = mean_trace(reversed);
  REQUIRE(m.records.size() == h.mean.records.size());
  for (size_t k = 0; k < m.records.size(); ++k) {
    CHECK(std::abs(m.records[k].relative_error - h.mean.records[k].relative_error) <= 1e-12);
  }

  // Emitted mean equals the mean of the per-replication columns.
  for (size_t k = 0; k < h.mean.records.size(); ++k) {
    double total = 0;
    for (const auto& t : h.replications) total += t.records[k].squared_error;
    CHECK(std::abs(total / c.replications - h.mean.records[k].squared_error) <= 1e-12);
  }
}

TEST_CASE("trace shape and CSV round trip") {
  RunConfig c = tiny_quadratic();
  const ExperimentResult r = run_experiment(c);
  const ConvergenceTrace& empty = r.horizons[0].mean;
  CHECK(empty.records.size() == 1);
  CHECK(trace_csv(empty).find('\n') != std::string::npos);
  std::istringstream lines(trace_csv(empty));
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(header.rfind("iteration,relative_error", 0) == 0);

  const ConvergenceTrace& full = r.horizons[1].mean;
  CHECK(full.records.size() == 41);
  for (size_t k = 1; k < full.records.size(); ++k) {
    CHECK(full.records[k].cumulative_bits >= full.records[k - 1].cumulative_bits);
    CHECK(full.records[k].squared_error >= 0);
  }
  const ConvergenceTrace back = parse_trace_csv(trace_csv(full));
  REQUIRE(back.records.size() == full.records.size());
  for (size_t k = 0; k < back.records.size(); ++k) {
    CHECK(back.records[k].iteration == full.records[k].iteration);
    CHECK(back.records[k].relative_error == full.records[k].relative_error);
    CHECK(back.records[k].objective == full.records[k].objective);
    CHECK(back.records[k].cumulative_bits == full.records[k].cumulative_bits);
  }

  const fs::path p1 = scratch_dir() / "a.csv";
  const fs::path p2 = scratch_dir() / "b.csv";
  emit_trace_csv(full, p1.string());
  emit_trace_csv(run_experiment(c).horizons[1].mean, p2.string());
  CHECK(read_file(p1) == read_file(p2));
  CHECK_THROWS_AS(emit_trace_csv(full, "/nonexistent-dir/x.csv"), DataError);
}

TEST_CASE("dataset files") {
  const fs::path path = scratch_dir() / "two_rows.csv";
  write_file(path, "1.5,2,0\n-3,4.25,7\n");
  const Dataset d = load_dataset(path.string(), ',', LabelRule::parse("none"));
  Matrix expected(2, 2);
  expected << 1.5, 2, -3, 4.25;
  CHECK(d.features == expected);
  CHECK(d.labels(1) == 7);

  // A digit-like file written as text, loaded back with a one-vs-rest rule.
  const Dataset digits = generate_digit_like(5000, 16, 4);
  std::ostringstream text;
  for (Index j = 0; j < digits.features.rows(); ++j) {
    for (Index k = 0; k < 16; ++k) text << digits.features(j, k) << ",";
    text << digits.labels(j) << "\n";
  }
  const fs::path dpath = scratch_dir() / "digits.csv";
  write_file(dpath, text.str());
  const Dataset loaded = load_dataset(dpath.string(), ',', LabelRule::parse("class:0"));
  CHECK(loaded.features.rows() == 5000);
  CHECK(loaded.features.cols() == 16);
  const long zeros = (digits.labels.array() == 0).count();
  CHECK((loaded.labels.array() == 1).count() == zeros);
  CHECK((loaded.labels.array() == -1).count() == 5000 - zeros);
  CHECK_THROWS_AS(load_dataset((scratch_dir() / "missing.csv").string(), ',', LabelRule::parse("none")), DataError);
}

TEST_CASE("trade-off experiment writes the table shape") {
  const TradeoffTable t = run_tradeoff(preset("tradeoff-levels"));
  CHECK(t.rows.size() == 8);
  const std::string csv = tradeoff_csv(t);
  CHECK(csv.rfind("s,iterations,code_length_bits,total_cost_bits\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("bounds report mentions thresholds") {
  RunConfig c = tiny_quadratic();
  c.experiment = "bounds";
  c.T = {1000, 10000};
  const std::string text = bounds_report_text(c);
  CHECK(text.find("T0") != std::string::npos);
  CHECK(text.find("theorem1_bound") != std::string::npos);
}

TEST_CASE("command line") {
  RunConfig single = tiny_quadratic();
  single.T = {40};
  const fs::path cfg = scratch_dir() / "run.cfg";
  write_file(cfg, serialize(single));
  const fs::path out = scratch_dir() / "trace.csv";

  Cli ok = run_cli("run " + cfg.string() + " --out " + out.string());
  CHECK(ok.code == 0);
  CHECK(read_file(out).rfind("iteration,", 0) == 0);
  const std::string first = read_file(out);
  CHECK(run_cli("run " + cfg.string() + " --out " + out.string()).code == 0);
  CHECK(read_file(out) == first);
  CHECK(run_cli("run " + cfg.string() + " --seed 99 --out " + out.string()).code == 0);
  CHECK(read_file(out) != first);
  // Several horizons write one file each.
  write_file(cfg, serialize(tiny_quadratic()));
  CHECK(run_cli("run " + cfg.string() + " --out " + out.string()).code == 0);
  CHECK(fs::exists(scratch_dir() / "trace_T0.csv"));
  CHECK(fs::exists(scratch_dir() / "trace_T40.csv"));

  CHECK(run_cli("preset list").out.find("quadratic-sigma200") != std::string::npos);
  CHECK(run_cli("show-preset tradeoff-levels").code == 0);
  CHECK(run_cli("quantizer-test gaussian p=5 sigma2=2 draws=2000").code == 0);

  const fs::path bad = scratch_dir() / "bad.cfg";
  write_file(bad, "delta = 0.7\n");
  const Cli rejected = run_cli("run " + bad.string());
  CHECK(rejected.code == 2);
  CHECK(rejected.out.find("delta") != std::string::npos);
  CHECK(run_cli("run " + (scratch_dir() / "absent.cfg").string()).code == 2);
  CHECK(run_cli("no-such-command").code == 2);

  // Scalar quantizer overflow is a numeric failure.
  RunConfig overflow = tiny_quadratic();
  overflow.quantizer = "scalar_lowprec";
  overflow.scale = 1e-6;
  overflow.bits = 2;
  overflow.x0 = 5.0;
  const fs::path num = scratch_dir() / "overflow.cfg";
  write_file(num, serialize(overflow));
  CHECK(run_cli("run " + num.string()).code == 3);
}
