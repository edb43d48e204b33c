#include "binrec/analysis.hpp"
#include "binrec/ensembles.hpp"
#include "binrec/experiments.hpp"
#include "binrec/optim.hpp"
#include "binrec/recovery.hpp"
#include "binrec/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace binrec;

namespace {

BinarySignal signal_from(Index N, const std::vector<Index>& support) {
  std::vector<Index> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  return BinarySignal(N, sorted);
}

py::dict report_dict(const RecoveryReport& r) {
  py::dict d;
  d["x"] = r.x_hat;
  d["program"] = std::string(to_string(r.program));
  d["status"] = std::string(to_string(r.status));
  d["objective"] = r.objective;
  d["iterations"] = r.iterations;
  if (r.branch_chosen) d["branch"] = *r.branch_chosen == Branch::plain ? "plain" : "mirror";
  else d["branch"] = py::none();
  return d;
}

ConeSpec cone_for(const std::string& condition, Index N, const std::vector<Index>& K,
                  const std::vector<Index>& S) {
  const BinarySignal k = signal_from(N, K);
  if (condition == "kernel-hk") return ConeSpec::house(k);
  if (condition == "bnsp") return ConeSpec::bnsp(k);
  if (condition == "newnsp") return ConeSpec::house(k).intersect(ConeSpec::house(signal_from(N, S).complement()));
  throw ConfigError("unknown condition: " + condition);
}

}  // namespace

PYBIND11_MODULE(_binrec, m) {
  m.doc() = "Sparse binary signal recovery with box-constrained programs.";

  m.def(
      "gen_matrix",
      [](const std::string& ensemble, Index m, Index N, std::uint64_t seed, double mu, double sigma,
         double lambda_bound, const std::string& base, bool normalize) {
        EnsembleConfig c;
        c.kind = parse_ensemble_kind(ensemble);
        c.m = m;
        c.N = N;
        c.seed = seed;
        c.mu = mu;
        c.sigma = sigma;
        c.lambda_bound = lambda_bound;
        c.base = parse_base_distribution(base);
        c.normalize = normalize;
        return gen_matrix(c).values;
      },
      py::arg("ensemble"), py::arg("m"), py::arg("N"), py::arg("seed") = 0, py::arg("mu") = 0.0,
      py::arg("sigma") = 1.0, py::arg("lambda_bound") = 1.0, py::arg("base") = "rademacher_scaled",
      py::arg("normalize") = false);

  m.def(
      "gen_support", [](Index N, Index k, std::uint64_t seed) { return gen_sparse_binary(N, k, seed).support(); },
      py::arg("N"), py::arg("k"), py::arg("seed") = 0, "Sorted support of a uniformly random k-subset.");
  m.def("gen_noise", &gen_noise, py::arg("m"), py::arg("eps"), py::arg("seed") = 0);

  m.def(
      "solve",
      [](const std::string& program, const Matrix& A, const Vector& b, std::optional<double> eta) {
        return report_dict(run_program(parse_program(program), {A, b, eta}));
      },
      py::arg("program"), py::arg("A"), py::arg("b"), py::arg("eta") = py::none());

  m.def(
      "recovers_uniquely",
      [](const Matrix& A, const std::vector<Index>& support) {
        return box_bp_recovers_uniquely(A, signal_from(A.cols(), support));
      },
      py::arg("A"), py::arg("support"));

  m.def(
      "check",
      [](const std::string& condition, const Matrix& A, const std::vector<Index>& support,
         const std::vector<Index>& support_s) {
        py::dict d;
        CertificateResult r;
        if (condition == "hkplus") r = check_hkplus_dual(A, signal_from(A.cols(), support));
        else r = check_kernel_cone(A, cone_for(condition, A.cols(), support, support_s));
        d["verdict"] = std::string(to_string(r.verdict));
        d["witness"] = r.witness ? py::cast(*r.witness) : py::none();
        d["margin"] = r.margin;
        return d;
      },
      py::arg("condition"), py::arg("A"), py::arg("support"), py::arg("support_s") = std::vector<Index>{});

  m.def(
      "dual_certificate",
      [](const Matrix& D, double mu, double sigma, const std::vector<Index>& support, std::optional<double> rho) {
        return build_dual_certificate(D, mu, sigma, signal_from(D.cols(), support), rho);
      },
      py::arg("D"), py::arg("mu"), py::arg("sigma"), py::arg("support"), py::arg("rho") = py::none());

  m.def(
      "verify_certificate",
      [](const Matrix& A, const Vector& nu, const std::vector<Index>& negative_on, double t) {
        const CertificateCheck c = verify_certificate(A, nu, signal_from(A.cols(), negative_on), t);
        return py::make_tuple(c.holds, c.min_margin, c.margins);
      },
      py::arg("A"), py::arg("nu"), py::arg("negative_on"), py::arg("t"));

  m.def("delta_bin", &delta_bin, py::arg("k"), py::arg("N"));
  m.def("face_survival_prob", &face_survival_prob, py::arg("i"), py::arg("j"));
  m.def("mibi_sample_bound", &mibi_sample_bound, py::arg("k"), py::arg("N"), py::arg("eps"));
  m.def(
      "noise_error_bound",
      [](Index N, Index k, Index m, double mu, double sigma) {
        TheoryParams p;
        p.N = N;
        p.k = k;
        p.m = m;
        p.mu = mu;
        p.sigma = sigma;
        return noise_error_bound(p);
      },
      py::arg("N"), py::arg("k"), py::arg("m"), py::arg("mu"), py::arg("sigma"));

  m.def(
      "phase_transition",
      [](Index N, const std::vector<double>& k_fractions, const std::vector<double>& m_fractions, Index trials,
         const std::string& ensemble, const std::vector<std::string>& programs, std::uint64_t seed, double mu,
         double sigma, std::optional<unsigned> threads) {
        ExperimentConfig c;
        c.N = N;
        c.k_fractions = k_fractions;
        c.m_fractions = m_fractions;
        c.trials = trials;
        c.ensemble.kind = parse_ensemble_kind(ensemble);
        c.ensemble.mu = mu;
        c.ensemble.sigma = sigma;
        c.ensemble.lambda_bound = sigma;
        c.programs.clear();
        for (const auto& p : programs) c.programs.push_back(parse_program(p));
        c.master_seed = seed;
        c.threads = threads;
        PhaseDiagram d;
        {
          py::gil_scoped_release release;
          d = run_phase_transition(c);
        }
        py::dict rates;
        for (Program p : c.programs) {
          Matrix r(static_cast<Index>(k_fractions.size()), static_cast<Index>(m_fractions.size()));
          for (std::size_t i = 0; i < k_fractions.size(); ++i)
            for (std::size_t j = 0; j < m_fractions.size(); ++j)
              r(static_cast<Index>(i), static_cast<Index>(j)) = d.success_rate(i, j, p);
          rates[py::str(std::string(to_string(p)))] = r;
        }
        return rates;
      },
      py::arg("N"), py::arg("k_fractions"), py::arg("m_fractions"), py::arg("trials"),
      py::arg("ensemble") = "gaussian", py::arg("programs") = std::vector<std::string>{"box_bp"},
      py::arg("seed") = 0, py::arg("mu") = 0.0, py::arg("sigma") = 1.0, py::arg("threads") = py::none(),
      "Success rates per program as a (k points x m points) array.");
}
