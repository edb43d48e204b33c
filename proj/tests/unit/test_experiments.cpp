#include "binrec/experiments.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace binrec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.N = 12;
  c.k_fractions = {0.25, 0.5};
  c.m_fractions = {0.5, 1.0};
  c.trials = 3;
  c.programs = {Program::box_bp, Program::box_ls};
  c.master_seed = 77;
  c.threads = 1;
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("k = 0 and m = N give certain success") {
  ExperimentConfig c;
  c.N = 20;
  c.k_fractions = {0.01, 0.3};
  c.m_fractions = {0.2, 1.0};
  c.trials = 4;
  c.threads = 1;
  const PhaseDiagram d = run_phase_transition(c);
  CHECK(d.cell(0, 0).k == 0);
  CHECK(d.success_rate(0, 0, Program::box_bp) == 1.0);
  CHECK(d.success_rate(0, 1, Program::box_bp) == 1.0);
  CHECK(d.success_rate(1, 1, Program::box_bp) == 1.0);
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig c = small_config();
  c.record_simultaneous = true;
  const PhaseDiagram one = run_phase_transition(c);
  c.threads = 3;
  const PhaseDiagram three = run_phase_transition(c);
  REQUIRE(one.records.size() == three.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].seed == three.records[i].seed);
    CHECK(one.records[i].success == three.records[i].success);
    CHECK(one.records[i].both == three.records[i].both);
    CHECK((one.records[i].l2_error == three.records[i].l2_error ||
           (std::isnan(one.records[i].l2_error) && std::isnan(three.records[i].l2_error))));
  }
}

TEST_CASE("trial seeds depend only on their own cell") {
  CHECK(trial_seed(1, 0, 0, 0) != trial_seed(1, 0, 1, 0));
  CHECK(trial_seed(1, 2, 3, 4) == trial_seed(1, 2, 3, 4));
  ExperimentConfig a = small_config();
  ExperimentConfig b = small_config();
  b.m_fractions = {0.5, 0.75};
  const auto da = run_phase_transition(a);
  const auto db = run_phase_transition(b);
  for (std::size_t ki = 0; ki < 2; ++ki) CHECK(da.cell(ki, 0).successes == db.cell(ki, 0).successes);
}

TEST_CASE("cell counts are consistent") {
  ExperimentConfig c = small_config();
  c.record_simultaneous = true;
  const auto d = run_phase_transition(c);
  for (const auto& cell : d.cells) {
    for (std::size_t p = 0; p < c.programs.size(); ++p) {
      CHECK(cell.successes[p] <= cell.trials);
      CHECK(cell.both_count[p] + cell.neither_count[p] <= cell.trials);
    }
  }
}

TEST_CASE("csv round trip and sidecar") {
  const auto dir = temp_dir("binrec_csv_test");
  ExperimentConfig c = small_config();
  c.noise_eps = 0.0;
  const auto d = run_phase_transition(c);
  write_csv(d, dir / "out.csv");
  const std::string text = slurp(dir / "out.csv");
  CHECK(text.rfind("N,m,k,trial,program,ensemble,mu,seed,success,both,neither,l2_error,solver_status\n", 0) == 0);

  const auto records = read_csv(dir / "out.csv");
  REQUIRE(records.size() == d.records.size());
  const auto config = config_from_json(slurp(sidecar_path(dir / "out.csv")));
  CHECK(config.master_seed == c.master_seed);
  CHECK(config.programs == c.programs);
  CHECK(config.noise_eps == c.noise_eps);
  const auto back = diagram_from_records(config, records);
  for (std::size_t i = 0; i < d.cells.size(); ++i) {
    CHECK(back.cells[i].successes == d.cells[i].successes);
    CHECK(back.cells[i].both_count == d.cells[i].both_count);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].seed == d.records[i].seed);
    if (std::isfinite(d.records[i].l2_error)) CHECK(records[i].l2_error == d.records[i].l2_error);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty grid writes the header only") {
  const auto dir = temp_dir("binrec_csv_empty");
  ExperimentConfig c = small_config();
  c.k_fractions.clear();
  const auto d = run_phase_transition(c);
  write_csv(d, dir / "e.csv");
  CHECK(slurp(dir / "e.csv") == "N,m,k,trial,program,ensemble,mu,seed,success,both,neither,l2_error,solver_status\n");
  CHECK(read_csv(dir / "e.csv").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("heatmap colours and structure") {
  ExperimentConfig c;
  c.N = 10;
  c.k_fractions = {0.1};
  c.m_fractions = {1.0};
  c.trials = 2;
  c.threads = 1;
  auto d = run_phase_transition(c);
  std::string svg = heatmap_svg(d, Program::box_bp);
  CHECK(svg.find("fill=\"rgb(255,255,255)\" data-k") != std::string::npos);
  CHECK(svg.find("k/N") != std::string::npos);
  CHECK(svg.find("m/N") != std::string::npos);
  CHECK(svg.find("id=\"legend\"") != std::string::npos);

  d.cells[0].successes[0] = 0;
  svg = heatmap_svg(d, Program::box_bp);
  CHECK(svg.find("fill=\"rgb(0,0,0)\" data-k") != std::string::npos);
  const std::regex rect("<rect class=\"cell\"");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), rect), std::sregex_iterator()) == 1);

  // Tag balance as a cheap well-formedness check.
  int depth = 0;
  for (std::size_t i = 0; i + 1 < svg.size(); ++i) {
    if (svg[i] != '<' || svg[i + 1] == '?') continue;
    const std::size_t close = svg.find('>', i);
    REQUIRE(close != std::string::npos);
    if (svg[i + 1] == '/') --depth;
    else if (svg[close - 1] != '/') ++depth;
    CHECK(depth >= 0);
  }
  CHECK(depth == 0);
  CHECK_THROWS_AS(heatmap_svg(d, Program::box_ls), DomainError);
}

TEST_CASE("configuration validation and presets") {
  ExperimentConfig c = small_config();
  c.k_fractions = {0.5, 0.25};
  CHECK_THROWS_AS(run_phase_transition(c), ConfigError);
  c = small_config();
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const auto full = ExperimentConfig::paper_scale_preset();
  CHECK(full.N == 500);
  CHECK(full.k_fractions.size() == 100);
  CHECK(full.m_fractions.back() == 1.0);
  CHECK(full.trials == 25);
  CHECK(ExperimentConfig::ci_preset().k_fractions.size() == 20);
  CHECK(fraction_grid(0.1).size() == 10);
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(4u) == 4);
  CHECK(resolve_threads(std::nullopt) >= 1);
}
