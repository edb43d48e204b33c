#include "binrec/io.hpp"
#include "cli.hpp"

#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <sstream>

using namespace binrec;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "binrec_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("theory delta-bin prints N/2 at k = N") {
  const auto r = invoke({"theory", "--formula", "delta-bin", "--k", "500", "--N", "500"});
  CHECK(r.code == 0);
  CHECK(r.out == "250\n");
}

TEST_CASE("theory formulas with json output") {
  auto r = invoke({"--json", "theory", "--formula", "pij", "--i", "1", "--j", "3"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == 0.25);
  r = invoke({"theory", "--formula", "largern2", "--N", "100", "--m", "50"});
  CHECK(r.code == 1);
  r = invoke({"theory", "--formula", "noise-bound", "--N", "200", "--k", "10", "--m", "150", "--mu", "0.5",
              "--sigma", "0.5", "--json"});
  CHECK(r.code == 0);
  r = invoke({"theory", "--formula", "cert-fail", "--N", "200", "--k", "10", "--m", "150", "--mu", "0.5",
              "--sigma", "0.5", "--lambda", "0.5", "--variant", "off_support"});
  CHECK(r.code == 0);
  r = invoke({"theory", "--formula", "bogus"});
  CHECK(r.code == 1);
}

TEST_CASE("check kernel-hk on [1 -1]") {
  const auto dir = temp_dir();
  io::save_matrix(dir / "a.txt", (Matrix(1, 2) << 1, -1).finished());
  auto r = invoke({"check", "--condition", "kernel-hk", "--matrix", (dir / "a.txt").string(), "--support", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "holds\n");
  io::save_matrix(dir / "b.txt", Matrix::Ones(1, 2));
  r = invoke({"--json", "check", "--condition", "kernel-hk", "--matrix", (dir / "b.txt").string(), "--support", "0"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "fails");
  CHECK(j["witness"].size() == 2);
  r = invoke({"check", "--condition", "hkplus", "--matrix", (dir / "a.txt").string(), "--support", "0"});
  CHECK(r.out == "holds\n");
  r = invoke({"check", "--condition", "newnsp", "--matrix", (dir / "a.txt").string(), "--support", "0",
              "--support-s", "1"});
  CHECK(r.code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate, solve, certificate") {
  const auto dir = temp_dir();
  const auto a = (dir / "A.txt").string();
  const auto x = (dir / "x.txt").string();
  REQUIRE(invoke({"gen-matrix", "--ensemble", "bernoulli01", "--m", "30", "--N", "40", "--seed", "3", "--out", a})
              .code == 0);
  REQUIRE(invoke({"gen-signal", "--N", "40", "--k", "3", "--seed", "5", "--out", x}).code == 0);
  const Matrix A = io::load_matrix(a);
  CHECK(A.rows() == 30);

  auto r = invoke({"--json", "solve", "--matrix", a, "--signal", x, "--program", "mibi-bp"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "optimal");
  CHECK(j["success"] == true);
  CHECK(j["program"] == "mibi_bp");

  r = invoke({"solve", "--matrix", a, "--signal", x, "--program", "robust-bp", "--noise", "0.01"});
  CHECK(r.code == 0);

  const auto am = (dir / "B.txt").string();
  REQUIRE(invoke({"gen-matrix", "--ensemble", "biased", "--mu", "0.5", "--sigma", "0.5", "--lambda", "0.5", "--m",
                  "150", "--N", "200", "--seed", "1", "--out", am})
              .code == 0);
  r = invoke({"--json", "certificate", "--matrix", am, "--support", "1,5,9"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j.contains("bound_stated"));
  CHECK(j["margins"].size() == 200);
  std::filesystem::remove_all(dir);
}

TEST_CASE("phase: dry run and a tiny sweep") {
  auto r = invoke({"phase", "--preset", "paper-scale", "--dry-run"});
  CHECK(r.code == 0);
  CHECK(r.out.find("100x100x25") != std::string::npos);

  const auto dir = temp_dir();
  const auto csv = (dir / "p.csv").string();
  r = invoke({"phase", "--N", "10", "--k-step", "0.5", "--m-step", "0.5", "--trials", "2", "--threads", "1", "--csv",
              csv, "--programs", "box-bp,box-ls"});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(csv));
  CHECK(std::filesystem::exists(dir / "p.config.json"));
  CHECK(std::filesystem::exists(dir / "p_box_bp.svg"));
  CHECK(std::filesystem::exists(dir / "p_box_ls.svg"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({"theory", "--formula", "delta-bin", "--nope"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"solve"}).code == 1);
  CHECK(invoke({"check", "--matrix", "/nonexistent/file", "--support", "0"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}
