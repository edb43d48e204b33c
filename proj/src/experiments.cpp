#include "binrec/experiments.hpp"

#include "binrec/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace binrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kCsvHeader =
    "N,m,k,trial,program,ensemble,mu,seed,success,both,neither,l2_error,solver_status";

void check_fractions(const std::vector<double>& f, const char* name) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0 && f[i] <= 1.0)) throw ConfigError(std::string("experiment: ") + name + " must lie in (0, 1]");
    if (i > 0 && !(f[i] > f[i - 1])) throw ConfigError(std::string("experiment: ") + name + " must be strictly increasing");
  }
}

SolveStatus parse_status(std::string_view s) {
  if (s == "optimal") return SolveStatus::optimal;
  if (s == "infeasible") return SolveStatus::infeasible;
  if (s == "not_converged") return SolveStatus::not_converged;
  if (s == "failed") return SolveStatus::failed;
  throw ConfigError("csv: unknown solver status " + std::string(s));
}

struct Outcome {
  bool success = false;
  double l2_error = kNaN;
  SolveStatus status = SolveStatus::failed;
};

std::mutex log_mutex;

Outcome solve_one(Program program, const RecoveryProblem& problem, const BinarySignal& target, double tol,
                  std::uint64_t seed) {
  Outcome out;
  try {
    const RecoveryReport rep = run_program(program, problem);
    out.status = rep.status;
    if (rep.x_hat.size() == target.size()) {
      out.l2_error = (rep.x_hat - target.dense()).norm();
      out.success = recovery_success(rep.x_hat, target, tol);
    }
  } catch (const std::exception& e) {
    const std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "binrec: " << to_string(program) << " failed on trial seed " << seed << ": " << e.what() << '\n';
    out = Outcome{};
  }
  return out;
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& config, std::size_t ki, std::size_t mj, Index t) {
  const Index N = config.N;
  const Index k = config.k_at(ki);
  const Index m = config.m_at(mj);
  const std::uint64_t seed = trial_seed(config.master_seed, ki, mj, t);

  EnsembleConfig ens = config.ensemble;
  ens.m = m;
  ens.N = N;
  ens.seed = rng::derive(seed, 1);
  const Matrix A = gen_matrix(ens).values;
  const BinarySignal x0 = gen_sparse_binary(N, k, rng::derive(seed, 2));
  Vector noise = Vector::Zero(m);
  if (config.noise_eps) noise = gen_noise(m, *config.noise_eps, rng::derive(seed, 3));

  const Vector b = A * x0.dense() + noise;
  const BinarySignal mirror_target = x0.complement();
  const double mu = entry_statistics(ens).mu;

  std::vector<TrialRecord> out;
  for (Program program : config.programs) {
    std::optional<double> eta;
    if (program == Program::robust_box_bp) eta = config.noise_eps.value_or(0.0);
    const Outcome first = solve_one(program, RecoveryProblem{A, b, eta}, x0, config.success_tol, seed);

    TrialRecord rec;
    rec.N = N;
    rec.m = m;
    rec.k = k;
    rec.trial = t;
    rec.program = program;
    rec.ensemble = ens.kind;
    rec.mu = mu;
    rec.seed = seed;
    rec.success = first.success;
    rec.l2_error = first.l2_error;
    rec.status = first.status;
    if (config.record_simultaneous) {
      const Vector b_mirror = A * mirror_target.dense() + noise;
      const Outcome second =
          solve_one(program, RecoveryProblem{A, b_mirror, eta}, mirror_target, config.success_tol, seed);
      rec.both = first.success && second.success;
      rec.neither = !first.success && !second.success;
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace

std::vector<double> fraction_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("fraction_grid: step must lie in (0, 1]");
  const auto count = static_cast<int>(std::floor(1.0 / step + 1e-9));
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(std::min(1.0, i * step));
  return out;
}

void ExperimentConfig::validate() const {
  if (N < 1) throw ConfigError("experiment: N must be positive");
  if (trials < 1) throw ConfigError("experiment: trials must be at least 1");
  check_fractions(k_fractions, "k_fractions");
  check_fractions(m_fractions, "m_fractions");
  if (programs.empty()) throw ConfigError("experiment: at least one program is required");
  if (!(success_tol > 0.0)) throw ConfigError("experiment: success_tol must be positive");
  if (noise_eps && !(*noise_eps >= 0.0)) throw ConfigError("experiment: noise_eps must be nonnegative");
  if (threads && *threads == 0) throw ConfigError("experiment: threads must be positive");
  EnsembleConfig probe = ensemble;
  probe.m = 1;
  probe.N = 1;
  probe.validate();
}

Index ExperimentConfig::k_at(std::size_t i) const {
  return static_cast<Index>(std::lround(k_fractions.at(i) * static_cast<double>(N)));
}

Index ExperimentConfig::m_at(std::size_t j) const {
  return std::max<Index>(1, static_cast<Index>(std::lround(m_fractions.at(j) * static_cast<double>(N))));
}

ExperimentConfig ExperimentConfig::ci_preset() {
  ExperimentConfig c;
  c.N = 100;
  c.k_fractions = fraction_grid(0.05);
  c.m_fractions = fraction_grid(0.05);
  c.trials = 10;
  return c;
}

ExperimentConfig ExperimentConfig::paper_scale_preset() {
  ExperimentConfig c;
  c.N = 500;
  c.k_fractions = fraction_grid(0.01);
  c.m_fractions = fraction_grid(0.01);
  c.trials = 25;
  return c;
}

const CellStats& PhaseDiagram::cell(std::size_t ki, std::size_t mj) const {
  return cells.at(ki * config.m_fractions.size() + mj);
}

std::size_t PhaseDiagram::program_index(Program program) const {
  const auto it = std::find(config.programs.begin(), config.programs.end(), program);
  if (it == config.programs.end())
    throw DomainError("phase diagram: program " + std::string(to_string(program)) + " was not run");
  return static_cast<std::size_t>(it - config.programs.begin());
}

double PhaseDiagram::success_rate(std::size_t ki, std::size_t mj, Program program) const {
  const CellStats& c = cell(ki, mj);
  return static_cast<double>(c.successes[program_index(program)]) / static_cast<double>(c.trials);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t ki, std::size_t mj, Index trial) {
  return rng::derive(master_seed, ki, mj, static_cast<std::uint64_t>(trial));
}

unsigned resolve_threads(std::optional<unsigned> requested) {
  if (requested) return std::max(1u, *requested);
  if (const char* env = std::getenv("BINREC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PhaseDiagram run_phase_transition(const ExperimentConfig& config) {
  config.validate();
  const std::size_t nk = config.k_fractions.size();
  const std::size_t nm = config.m_fractions.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  const std::size_t tasks = nk * nm * trials;

  std::vector<std::vector<TrialRecord>> slots(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t t = task % trials;
      const std::size_t cell = task / trials;
      slots[task] = run_trial(config, cell / nm, cell % nm, static_cast<Index>(t));
    }
  };
  const unsigned nthreads = std::min<unsigned>(resolve_threads(config.threads),
                                               static_cast<unsigned>(std::max<std::size_t>(tasks, 1)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> records;
  records.reserve(tasks * config.programs.size());
  for (auto& slot : slots)
    for (auto& r : slot) records.push_back(r);
  return diagram_from_records(config, std::move(records));
}

PhaseDiagram diagram_from_records(const ExperimentConfig& config, std::vector<TrialRecord> records) {
  const std::size_t nk = config.k_fractions.size();
  const std::size_t nm = config.m_fractions.size();
  const std::size_t np = config.programs.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  if (records.size() != nk * nm * trials * np)
    throw ConfigError("phase diagram: record count does not match the configuration");

  PhaseDiagram d;
  d.config = config;
  d.cells.resize(nk * nm);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t mj = 0; mj < nm; ++mj) {
      CellStats& c = d.cells[ki * nm + mj];
      c.k = config.k_at(ki);
      c.m = config.m_at(mj);
      c.trials = config.trials;
      c.successes.assign(np, 0);
      c.both_count.assign(np, 0);
      c.neither_count.assign(np, 0);
      c.mean_error.assign(np, kNaN);
      std::vector<double> err_sum(np, 0.0);
      std::vector<Index> err_count(np, 0);
      const std::size_t base = (ki * nm + mj) * trials * np;
      for (std::size_t r = 0; r < trials * np; ++r) {
        const TrialRecord& rec = records[base + r];
        const std::size_t p = r % np;
        if (rec.k != c.k || rec.m != c.m || rec.program != config.programs[p])
          throw ConfigError("phase diagram: records are not in grid order");
        c.successes[p] += rec.success ? 1 : 0;
        c.both_count[p] += rec.both ? 1 : 0;
        c.neither_count[p] += rec.neither ? 1 : 0;
        if (std::isfinite(rec.l2_error)) {
          err_sum[p] += rec.l2_error;
          ++err_count[p];
        }
      }
      for (std::size_t p = 0; p < np; ++p)
        if (err_count[p] > 0) c.mean_error[p] = err_sum[p] / static_cast<double>(err_count[p]);
    }
  }
  d.records = std::move(records);
  return d;
}

void write_csv(const PhaseDiagram& diagram, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << kCsvHeader << '\n' << std::setprecision(17);
  for (const TrialRecord& r : diagram.records) {
    out << r.N << ',' << r.m << ',' << r.k << ',' << r.trial << ',' << to_string(r.program) << ','
        << to_string(r.ensemble) << ',' << r.mu << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
        << (r.both ? 1 : 0) << ',' << (r.neither ? 1 : 0) << ',' << r.l2_error << ',' << to_string(r.status)
        << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path.string());

  std::ofstream side(sidecar_path(path));
  if (!side) throw ConfigError("cannot open " + sidecar_path(path).string() + " for writing");
  side << config_to_json(diagram.config) << '\n';
}

std::vector<TrialRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError(path.string() + ": unexpected CSV header");
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 13) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 13 fields");
    try {
      TrialRecord r;
      r.N = std::stoll(f[0]);
      r.m = std::stoll(f[1]);
      r.k = std::stoll(f[2]);
      r.trial = std::stoll(f[3]);
      r.program = parse_program(f[4]);
      r.ensemble = parse_ensemble_kind(f[5]);
      r.mu = std::stod(f[6]);
      r.seed = std::stoull(f[7]);
      r.success = f[8] == "1";
      r.both = f[9] == "1";
      r.neither = f[10] == "1";
      r.l2_error = std::stod(f[11]);
      r.status = parse_status(f[12]);
      out.push_back(r);
    } catch (const std::logic_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["N"] = c.N;
  j["k_fractions"] = c.k_fractions;
  j["m_fractions"] = c.m_fractions;
  j["trials"] = c.trials;
  j["ensemble"] = {{"kind", std::string(to_string(c.ensemble.kind))},
                   {"mu", c.ensemble.mu},
                   {"base", std::string(to_string(c.ensemble.base))},
                   {"sigma", c.ensemble.sigma},
                   {"lambda_bound", c.ensemble.lambda_bound},
                   {"normalize", c.ensemble.normalize}};
  std::vector<std::string> programs;
  for (Program p : c.programs) programs.emplace_back(to_string(p));
  j["programs"] = programs;
  j["success_tol"] = c.success_tol;
  j["master_seed"] = c.master_seed;
  j["record_simultaneous"] = c.record_simultaneous;
  j["noise_eps"] = c.noise_eps ? nlohmann::json(*c.noise_eps) : nlohmann::json(nullptr);
  j["threads"] = c.threads ? nlohmann::json(*c.threads) : nlohmann::json(nullptr);
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ExperimentConfig c;
    c.N = j.at("N").get<Index>();
    c.k_fractions = j.at("k_fractions").get<std::vector<double>>();
    c.m_fractions = j.at("m_fractions").get<std::vector<double>>();
    c.trials = j.at("trials").get<Index>();
    const auto& e = j.at("ensemble");
    c.ensemble.kind = parse_ensemble_kind(e.at("kind").get<std::string>());
    c.ensemble.mu = e.at("mu").get<double>();
    c.ensemble.base = parse_base_distribution(e.at("base").get<std::string>());
    c.ensemble.sigma = e.at("sigma").get<double>();
    c.ensemble.lambda_bound = e.at("lambda_bound").get<double>();
    c.ensemble.normalize = e.at("normalize").get<bool>();
    c.programs.clear();
    for (const auto& p : j.at("programs")) c.programs.push_back(parse_program(p.get<std::string>()));
    c.success_tol = j.at("success_tol").get<double>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.record_simultaneous = j.at("record_simultaneous").get<bool>();
    if (j.contains("noise_eps") && !j["noise_eps"].is_null()) c.noise_eps = j["noise_eps"].get<double>();
    if (j.contains("threads") && !j["threads"].is_null()) c.threads = j["threads"].get<unsigned>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".config.json");
  return p;
}

void render_heatmap(const PhaseDiagram& diagram, Program program, const std::filesystem::path& path) {
  const std::string svg = heatmap_svg(diagram, program);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << svg;
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace binrec
