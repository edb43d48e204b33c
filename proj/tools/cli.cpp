#include "cli.hpp"

#include "binrec/analysis.hpp"
#include "binrec/ensembles.hpp"
#include "binrec/experiments.hpp"
#include "binrec/io.hpp"
#include "binrec/recovery.hpp"
#include "binrec/theory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace binrec::cli {

namespace {

using nlohmann::json;

struct EnsembleFlags {
  std::string kind = "gaussian";
  Index m = 0;
  Index N = 0;
  double mu = 0.0;
  std::string base = "rademacher_scaled";
  double sigma = 1.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  bool normalize = false;

  void add_to(CLI::App* app, bool with_dims) {
    app->add_option("--ensemble", kind, "gaussian | rademacher | bernoulli01 | biased");
    if (with_dims) {
      app->add_option("--m", m, "rows")->required();
      app->add_option("--N", N, "columns")->required();
    }
    app->add_option("--mu", mu, "bias of a biased ensemble");
    app->add_option("--base", base, "centered part: rademacher_scaled | uniform_bounded");
    app->add_option("--sigma", sigma, "standard deviation of the centered part");
    app->add_option("--lambda", lambda, "entry bound of the centered part");
    app->add_option("--seed", seed, "random seed");
    app->add_flag("--normalize", normalize, "scale a biased matrix by m^{-1/2}");
  }

  EnsembleConfig config() const {
    EnsembleConfig c;
    c.kind = parse_ensemble_kind(kind);
    c.m = m;
    c.N = N;
    c.mu = mu;
    c.base = parse_base_distribution(base);
    c.sigma = sigma;
    c.lambda_bound = lambda;
    c.seed = seed;
    c.normalize = normalize;
    return c;
  }
};

std::vector<Index> parse_indices(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Index>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("bad index list: " + text);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Support given inline (--support 0,3,5) or as a signal file.
struct SupportFlags {
  std::string indices;
  std::string path;
  bool given_inline = false;

  void add_to(CLI::App* app, const std::string& flag, const std::string& file_flag) {
    app->add_option(flag, indices, "comma-separated 0-based support indices")
        ->each([this](const std::string&) { given_inline = true; });
    app->add_option(file_flag, path, "signal file");
  }

  bool present() const { return given_inline || !path.empty(); }

  BinarySignal get(Index N, const std::string& what) const {
    if (!path.empty()) {
      BinarySignal s = io::load_signal(path);
      if (s.size() != N) throw ConfigError(what + ": signal length does not match the matrix");
      return s;
    }
    if (!given_inline) throw ConfigError(what + " is required");
    return BinarySignal(N, parse_indices(indices));
  }
};

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void print_value(std::ostream& out, bool as_json, const std::string& key, double value, json extra = json::object()) {
  if (as_json) {
    extra[key] = value;
    out << extra.dump() << '\n';
  } else {
    out << std::setprecision(15) << value << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recovery of sparse and saturated binary signals"};
  app.name("binrec");
  app.require_subcommand(1, 1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  // gen-matrix
  auto* gen_matrix_cmd = app.add_subcommand("gen-matrix", "draw a measurement matrix");
  EnsembleFlags gm_flags;
  gm_flags.add_to(gen_matrix_cmd, true);
  std::string gm_out;
  gen_matrix_cmd->add_option("--out", gm_out, "output file (stdout if omitted)");

  // gen-signal
  auto* gen_signal_cmd = app.add_subcommand("gen-signal", "draw a k-sparse binary signal");
  Index gs_N = 0, gs_k = 0;
  std::uint64_t gs_seed = 0;
  std::string gs_out;
  gen_signal_cmd->add_option("--N", gs_N, "length")->required();
  gen_signal_cmd->add_option("--k", gs_k, "number of ones")->required();
  gen_signal_cmd->add_option("--seed", gs_seed, "random seed");
  gen_signal_cmd->add_option("--out", gs_out, "output file (stdout if omitted)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run a recovery program");
  std::string sv_matrix, sv_rhs, sv_program = "box-bp", sv_out;
  SupportFlags sv_signal;
  std::optional<double> sv_eta, sv_noise;
  std::uint64_t sv_noise_seed = 0;
  double sv_tol = 1e-4;
  solve_cmd->add_option("--matrix", sv_matrix, "matrix file")->required();
  sv_signal.add_to(solve_cmd, "--support", "--signal");
  solve_cmd->add_option("--rhs", sv_rhs, "measurement vector file (default A x0)");
  solve_cmd->add_option("--program", sv_program, "box-bp | mirror-bp | mibi-bp | robust-bp | box-ls");
  solve_cmd->add_option("--eta", sv_eta, "noise level for robust-bp");
  solve_cmd->add_option("--noise", sv_noise, "add noise of this norm to A x0");
  solve_cmd->add_option("--noise-seed", sv_noise_seed, "seed of the noise direction");
  solve_cmd->add_option("--tol", sv_tol, "relative success tolerance");
  solve_cmd->add_option("--out", sv_out, "write the estimate to this file");

  // check
  auto* check_cmd = app.add_subcommand("check", "verify a recovery condition");
  std::string ck_matrix, ck_condition = "kernel-hk";
  SupportFlags ck_support, ck_second;
  check_cmd->add_option("--matrix", ck_matrix, "matrix file")->required();
  check_cmd->add_option("--condition", ck_condition, "kernel-hk | bnsp | hkplus | newnsp");
  ck_support.add_to(check_cmd, "--support", "--signal");
  ck_second.add_to(check_cmd, "--support-s", "--signal-s");

  // certificate
  auto* cert_cmd = app.add_subcommand("certificate", "build and verify the explicit dual certificate");
  std::string ct_matrix;
  SupportFlags ct_support;
  double ct_mu = 0.5, ct_sigma = 0.5, ct_lambda = 0.5;
  std::optional<double> ct_rho, ct_t;
  std::string ct_threshold = "36";
  cert_cmd->add_option("--matrix", ct_matrix, "matrix file")->required();
  ct_support.add_to(cert_cmd, "--support", "--signal");
  cert_cmd->add_option("--mu", ct_mu, "bias");
  cert_cmd->add_option("--sigma", ct_sigma, "standard deviation of the centered part");
  cert_cmd->add_option("--lambda", ct_lambda, "entry bound of the centered part");
  cert_cmd->add_option("--rho", ct_rho, "offset (default -sigma^2/(4 mu))");
  cert_cmd->add_option("--t", ct_t, "explicit margin threshold");
  cert_cmd->add_option("--threshold", ct_threshold, "36 | 32 | 6: t = m sigma^2 / value");

  // theory
  auto* theory_cmd = app.add_subcommand("theory", "evaluate a closed-form bound");
  std::string th_formula, th_variant;
  TheoryParams th;
  Index th_i = 0, th_j = 0;
  std::optional<double> th_rho;
  theory_cmd->add_option("--formula", th_formula,
                         "delta-bin | pij | mibi-bound | biased-bound | cert-fail | noise-bound | largern2")
      ->required();
  theory_cmd->add_option("--N", th.N, "ambient dimension");
  theory_cmd->add_option("--k", th.k, "sparsity");
  theory_cmd->add_option("--m", th.m, "measurements");
  theory_cmd->add_option("--i", th_i, "P_ij row index");
  theory_cmd->add_option("--j", th_j, "P_ij column index");
  theory_cmd->add_option("--mu", th.mu, "bias");
  theory_cmd->add_option("--sigma", th.sigma, "standard deviation");
  theory_cmd->add_option("--lambda", th.lambda_bound, "entry bound");
  theory_cmd->add_option("--eps", th.eps, "failure tolerance");
  theory_cmd->add_option("--C", th.C, "constant of the sample bound");
  theory_cmd->add_option("--rho", th_rho, "certificate offset");
  theory_cmd->add_option("--variant", th_variant,
                         "cert-fail: off_support | on_support | combined; largern2: density | rademacher");

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "run a phase-transition experiment");
  std::string ph_preset = "ci", ph_config, ph_csv = "phase.csv", ph_svg;
  std::optional<Index> ph_N, ph_trials;
  std::optional<double> ph_k_step, ph_m_step, ph_noise;
  std::optional<std::uint64_t> ph_seed;
  std::optional<unsigned> ph_threads;
  std::vector<std::string> ph_programs;
  bool ph_simultaneous = false, ph_dry_run = false;
  EnsembleFlags ph_ens;
  phase_cmd->add_option("--preset", ph_preset, "ci | paper-scale");
  phase_cmd->add_option("--config", ph_config, "experiment config JSON (overrides the preset)");
  phase_cmd->add_option("--N", ph_N, "ambient dimension");
  phase_cmd->add_option("--trials", ph_trials, "trials per cell");
  phase_cmd->add_option("--k-step", ph_k_step, "k/N grid spacing");
  phase_cmd->add_option("--m-step", ph_m_step, "m/N grid spacing");
  phase_cmd->add_option("--noise", ph_noise, "noise norm");
  phase_cmd->add_option("--master-seed", ph_seed, "master seed");
  phase_cmd->add_option("--threads", ph_threads, "worker threads");
  phase_cmd->add_option("--programs", ph_programs, "box-bp mibi-bp box-ls robust-bp")->delimiter(',');
  phase_cmd->add_flag("--simultaneous", ph_simultaneous, "also solve for 1 - x0");
  phase_cmd->add_flag("--dry-run", ph_dry_run, "print the trial plan only");
  phase_cmd->add_option("--csv", ph_csv, "CSV output path");
  phase_cmd->add_option("--svg", ph_svg, "SVG output path (default next to the CSV)");
  ph_ens.add_to(phase_cmd, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageOrDomain;
  }

  try {
    if (gen_matrix_cmd->parsed()) {
      const DenseMatrix a = gen_matrix(gm_flags.config());
      if (gm_out.empty()) {
        if (as_json) {
          json rows = json::array();
          for (Index i = 0; i < a.rows(); ++i) rows.push_back(vector_json(a.values.row(i).transpose()));
          out << json{{"m", a.rows()}, {"N", a.cols()}, {"values", rows}}.dump() << '\n';
        } else {
          io::write_matrix(out, a.values);
        }
      } else {
        io::save_matrix(gm_out, a.values);
        if (as_json) out << json{{"m", a.rows()}, {"N", a.cols()}, {"path", gm_out}}.dump() << '\n';
        else out << "wrote " << a.rows() << "x" << a.cols() << " matrix to " << gm_out << '\n';
      }
      return kOk;
    }

    if (gen_signal_cmd->parsed()) {
      const BinarySignal x = gen_sparse_binary(gs_N, gs_k, gs_seed);
      if (!gs_out.empty()) io::save_signal(gs_out, x);
      if (as_json) {
        json j{{"N", x.size()}, {"k", x.sparsity()}, {"support", x.support()}};
        if (!gs_out.empty()) j["path"] = gs_out;
        out << j.dump() << '\n';
      } else if (gs_out.empty()) {
        io::write_signal(out, x);
      } else {
        out << "wrote signal with " << x.sparsity() << " ones to " << gs_out << '\n';
      }
      return kOk;
    }

    if (solve_cmd->parsed()) {
      const Matrix A = io::load_matrix(sv_matrix);
      std::optional<BinarySignal> truth;
      if (sv_signal.present()) truth = sv_signal.get(A.cols(), "--support");
      Vector b;
      if (!sv_rhs.empty()) {
        b = io::load_vector(sv_rhs);
      } else {
        if (!truth) throw ConfigError("solve: give --rhs or the true signal");
        b = A * truth->dense();
        if (sv_noise) b += gen_noise(A.rows(), *sv_noise, sv_noise_seed);
      }
      const Program program = parse_program(sv_program);
      std::optional<double> eta = sv_eta;
      if (program == Program::robust_box_bp && !eta) eta = sv_noise.value_or(0.0);
      const RecoveryReport rep = run_program(program, RecoveryProblem{A, b, eta});
      if (!sv_out.empty() && rep.x_hat.size() > 0) io::save_vector(sv_out, rep.x_hat);

      json j{{"program", std::string(to_string(rep.program))},
             {"status", std::string(to_string(rep.status))},
             {"objective", rep.objective},
             {"iterations", rep.iterations}};
      if (rep.branch_chosen) j["branch"] = *rep.branch_chosen == Branch::plain ? "plain" : "mirror";
      if (rep.x_hat.size() > 0) j["x_hat"] = vector_json(rep.x_hat);
      if (truth && rep.x_hat.size() > 0) {
        j["success"] = recovery_success(rep.x_hat, *truth, sv_tol);
        j["l2_error"] = (rep.x_hat - truth->dense()).norm();
      }
      if (as_json) {
        out << j.dump() << '\n';
      } else {
        out << "status: " << j["status"].get<std::string>() << '\n';
        out << std::setprecision(12) << "objective: " << rep.objective << '\n';
        if (j.contains("branch")) out << "branch: " << j["branch"].get<std::string>() << '\n';
        if (j.contains("success"))
          out << "success: " << (j["success"].get<bool>() ? "yes" : "no") << '\n'
              << "l2_error: " << j["l2_error"].get<double>() << '\n';
      }
      return kOk;
    }

    if (check_cmd->parsed()) {
      const Matrix A = io::load_matrix(ck_matrix);
      const BinarySignal K = ck_support.get(A.cols(), "--support");
      CertificateResult r;
      if (ck_condition == "kernel-hk") {
        r = check_kernel_cone(A, ConeSpec::house(K));
      } else if (ck_condition == "bnsp") {
        r = check_kernel_cone(A, ConeSpec::bnsp(K));
      } else if (ck_condition == "newnsp") {
        const BinarySignal S = ck_second.get(A.cols(), "--support-s");
        r = check_kernel_cone(A, ConeSpec::house(K).intersect(ConeSpec::house(S.complement())));
      } else if (ck_condition == "hkplus") {
        r = check_hkplus_dual(A, K);
      } else {
        throw ConfigError("unknown condition: " + ck_condition);
      }
      if (as_json) {
        json j{{"condition", ck_condition}, {"verdict", std::string(to_string(r.verdict))}, {"margin", r.margin}};
        if (r.witness) j["witness"] = vector_json(*r.witness);
        out << j.dump() << '\n';
      } else {
        out << to_string(r.verdict) << '\n';
      }
      return kOk;
    }

    if (cert_cmd->parsed()) {
      const Matrix A = io::load_matrix(ct_matrix);
      const BinarySignal J = ct_support.get(A.cols(), "--support");
      const Matrix D = A.array() - ct_mu;
      const Vector nu = build_dual_certificate(D, ct_mu, ct_sigma, J, ct_rho);
      double t = 0.0;
      if (ct_t) t = *ct_t;
      else if (ct_threshold == "36") t = certificate_threshold(A.rows(), ct_sigma);
      else if (ct_threshold == "32") t = certificate_threshold_loose(A.rows(), ct_sigma);
      else if (ct_threshold == "6") t = certificate_threshold_coarse(A.rows(), ct_sigma);
      else throw ConfigError("unknown threshold: " + ct_threshold);
      const CertificateCheck check = verify_support_certificate(A, nu, J, t);

      TheoryParams p;
      p.N = A.cols();
      p.k = J.sparsity();
      p.m = A.rows();
      p.mu = ct_mu;
      p.sigma = ct_sigma;
      p.lambda_bound = ct_lambda;
      p.rho = ct_rho;
      const CertNormBound bound = cert_norm_bound(p);
      const double norm = nu.norm();
      json j{{"holds", check.holds},
             {"t", t},
             {"min_margin", check.min_margin},
             {"nu_norm", norm},
             {"nu_norm_squared", norm * norm},
             {"bound_stated", bound.stated},
             {"bound_stated_ok", norm <= bound.stated},
             {"bound_derived_squared", bound.derived_squared},
             {"bound_derived_squared_ok", norm * norm <= bound.derived_squared},
             {"margins", vector_json(check.margins)}};
      if (as_json) {
        out << j.dump() << '\n';
      } else {
        out << std::setprecision(12) << (check.holds ? "holds" : "fails") << '\n'
            << "t: " << t << '\n'
            << "min margin: " << check.min_margin << '\n'
            << "||nu||_2: " << norm << " (stated bound " << bound.stated << ")\n"
            << "||nu||_2^2: " << norm * norm << " (derived bound " << bound.derived_squared << ")\n";
      }
      return kOk;
    }

    if (theory_cmd->parsed()) {
      th.rho = th_rho;
      if (th_formula == "delta-bin") {
        print_value(out, as_json, "value", delta_bin(th.k, th.N), {{"formula", th_formula}});
      } else if (th_formula == "pij") {
        print_value(out, as_json, "value", face_survival_prob(th_i, th_j), {{"formula", th_formula}});
      } else if (th_formula == "mibi-bound") {
        print_value(out, as_json, "value", mibi_sample_bound(th.k, th.N, th.eps), {{"formula", th_formula}});
      } else if (th_formula == "biased-bound") {
        print_value(out, as_json, "value", biased_sample_bound(th), {{"formula", th_formula}});
      } else if (th_formula == "cert-fail") {
        const auto variant = parse_cert_failure_variant(th_variant.empty() ? "combined" : th_variant);
        print_value(out, as_json, "value", cert_failure_prob(th, variant), {{"formula", th_formula}});
      } else if (th_formula == "noise-bound") {
        print_value(out, as_json, "value", noise_error_bound(th), {{"formula", th_formula}});
      } else if (th_formula == "largern2") {
        const auto variant = parse_larger_half_variant(th_variant.empty() ? "density" : th_variant);
        print_value(out, as_json, "value", larger_half_success_prob(th.N, th.m, variant), {{"formula", th_formula}});
      } else {
        throw ConfigError("unknown formula: " + th_formula);
      }
      return kOk;
    }

    if (phase_cmd->parsed()) {
      ExperimentConfig config;
      if (!ph_config.empty()) {
        std::ifstream in(ph_config);
        if (!in) throw ConfigError("cannot open " + ph_config);
        std::stringstream buf;
        buf << in.rdbuf();
        config = config_from_json(buf.str());
      } else if (ph_preset == "ci") {
        config = ExperimentConfig::ci_preset();
      } else if (ph_preset == "paper-scale") {
        config = ExperimentConfig::paper_scale_preset();
      } else {
        throw ConfigError("unknown preset: " + ph_preset);
      }
      if (ph_N) config.N = *ph_N;
      if (ph_trials) config.trials = *ph_trials;
      if (ph_k_step) config.k_fractions = fraction_grid(*ph_k_step);
      if (ph_m_step) config.m_fractions = fraction_grid(*ph_m_step);
      if (ph_noise) config.noise_eps = ph_noise;
      if (ph_seed) config.master_seed = *ph_seed;
      if (ph_threads) config.threads = ph_threads;
      if (ph_simultaneous) config.record_simultaneous = true;
      if (!ph_programs.empty()) {
        config.programs.clear();
        for (const auto& p : ph_programs) config.programs.push_back(parse_program(p));
      }
      if (ph_config.empty() || phase_cmd->count("--ensemble") > 0) {
        EnsembleConfig e = ph_ens.config();
        config.ensemble = e;
      }
      config.validate();

      const std::size_t cells = config.k_fractions.size() * config.m_fractions.size();
      const auto total = static_cast<Index>(cells) * config.trials;
      if (ph_dry_run) {
        if (as_json) {
          out << json{{"N", config.N},
                      {"k_points", config.k_fractions.size()},
                      {"m_points", config.m_fractions.size()},
                      {"trials", config.trials},
                      {"total_trials", total},
                      {"config", json::parse(config_to_json(config))}}
                     .dump()
              << '\n';
        } else {
          out << "plan: N=" << config.N << ", " << config.k_fractions.size() << "x" << config.m_fractions.size()
              << "x" << config.trials << " (k points x m points x trials), " << total << " trials, "
              << config.programs.size() << " program(s)\n";
        }
        return kOk;
      }

      const PhaseDiagram d = run_phase_transition(config);
      write_csv(d, ph_csv);
      std::filesystem::path svg = ph_svg;
      if (svg.empty()) svg = std::filesystem::path(ph_csv).replace_extension(".svg");
      std::vector<std::string> svgs;
      for (Program p : config.programs) {
        std::filesystem::path target = svg;
        if (config.programs.size() > 1)
          target = svg.parent_path() / (svg.stem().string() + "_" + std::string(to_string(p)) + ".svg");
        render_heatmap(d, p, target);
        svgs.push_back(target.string());
      }
      if (as_json) {
        out << json{{"csv", ph_csv}, {"config", sidecar_path(ph_csv).string()}, {"svg", svgs}, {"trials", total}}
                   .dump()
            << '\n';
      } else {
        out << "wrote " << ph_csv << " (" << d.records.size() << " rows)\n";
        for (const auto& s : svgs) out << "wrote " << s << '\n';
      }
      return kOk;
    }
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrDomain;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrDomain;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrDomain;
  }
  return kUsageOrDomain;
}

}  // namespace binrec::cli
