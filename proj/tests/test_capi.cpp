#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracext/fracext.h"

namespace {

const char* kSmall = R"({"domain":"interval","s":0.4,"mesh_policy":"graded","levels":[8,16,32]})";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bad config reports a config error with a message") {
  fx_study* st = nullptr;
  CHECK(fx_study_from_json(R"({"s":0.5,"bogus":1})", &st) == FX_ERR_CONFIG);
  CHECK(st == nullptr);
  CHECK(std::string(fx_last_error()).size() > 0);
  CHECK(fx_study_from_json("{not json", &st) == FX_ERR_CONFIG);
  CHECK(fx_study_from_json(R"({"s":1.5,"levels":[8]})", &st) == FX_ERR_CONFIG);
  CHECK(fx_study_from_file("/nonexistent/cfg.json", &st) == FX_ERR_IO);
  CHECK(fx_study_from_json(nullptr, &st) == FX_ERR_ARGUMENT);
}

TEST_CASE("study run through handles") {
  fx_study* st = nullptr;
  REQUIRE(fx_study_from_json(kSmall, &st) == FX_OK);
  CHECK(fx_last_error()[0] == '\0');
  size_t levels = 0;
  CHECK(fx_study_level_count(st, &levels) == FX_OK);
  CHECK(levels == 3);
  CHECK(fx_study_set_threads(st, 0) == FX_ERR_ARGUMENT);
  CHECK(fx_study_set_threads(st, 2) == FX_OK);

  fx_table* t = nullptr;
  REQUIRE(fx_study_run(st, &t) == FX_OK);
  REQUIRE(fx_table_row_count(t) == 3);
  fx_row r{};
  double prev = INFINITY;
  for (size_t i = 0; i < 3; ++i) {
    REQUIRE(fx_table_row(t, i, &r) == FX_OK);
    CHECK(r.level == i);
    CHECK(r.err_h1w < prev);
    CHECK(std::isnan(r.solve_ms));
    prev = r.err_h1w;
  }
  CHECK(fx_table_row(t, 3, &r) == FX_ERR_ARGUMENT);
  double a = 0, b = 0;
  CHECK(fx_table_rates(t, &a, &b) == FX_OK);
  CHECK(a < 0.0);
  CHECK(b < a);

  const std::string path = "capi_table.csv";
  CHECK(fx_table_write_csv(t, path.c_str()) == FX_OK);
  const auto text = slurp(path);
  CHECK(text.rfind("level,M,cells,dofs,Y,err_h1w,err_hs,assemble_ms,solve_ms,cg_iters\n", 0) == 0);
  std::remove(path.c_str());
  CHECK(fx_table_write_csv(t, "/nonexistent/dir/x.csv") == FX_ERR_IO);

  fx_table_free(t);
  fx_study_free(st);
}

TEST_CASE("solve writes trace, matrix and summary") {
  fx_study* st = nullptr;
  REQUIRE(fx_study_from_json(kSmall, &st) == FX_OK);
  size_t needed = 0;
  CHECK(fx_study_solve(st, "capi_trace.csv", "capi_matrix.mtx", nullptr, 0, &needed) == FX_OK);
  CHECK(needed > 10);
  std::string buf(needed, '\0');
  CHECK(fx_study_solve(st, "capi_trace.csv", nullptr, buf.data(), buf.size(), nullptr) == FX_OK);
  CHECK(buf.find("\"M\":32") != std::string::npos);
  char tiny[8];
  CHECK(fx_study_solve(st, "capi_trace.csv", nullptr, tiny, sizeof tiny, nullptr) == FX_OK);
  CHECK(std::string(tiny).size() == 7);

  const auto trace = slurp("capi_trace.csv");
  CHECK(trace.rfind("x,U\n", 0) == 0);
  const auto mtx = slurp("capi_matrix.mtx");
  CHECK(mtx.rfind("%%MatrixMarket", 0) == 0);
  std::remove("capi_trace.csv");
  std::remove("capi_matrix.mtx");
  fx_study_free(st);
}

TEST_CASE("oracle compare rejects the square") {
  fx_study* st = nullptr;
  REQUIRE(fx_study_from_json(R"({"domain":"square","s":0.5,"levels":[4]})", &st) == FX_OK);
  CHECK(fx_study_oracle_compare(st, "capi_oracle.csv") == FX_ERR_CONFIG);
  fx_study_free(st);
}

TEST_CASE("special function entry points") {
  double v = 0;
  CHECK(fx_bessel_k(0.5, 1.0, &v) == FX_OK);
  CHECK(v == doctest::Approx(std::sqrt(M_PI / 2.0) * std::exp(-1.0)).epsilon(1e-14));
  CHECK(fx_bessel_k(0.5, -1.0, &v) == FX_ERR_DOMAIN);
  CHECK(fx_gamma(0.5, &v) == FX_OK);
  CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  double p = 0, dp = 0;
  CHECK(fx_psi(0.5, 4.0, 0.0, &p, &dp) == FX_OK);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fx_psi(0.5, 4.0, 0.3, &p, &dp) == FX_OK);
  CHECK(p == doctest::Approx(std::exp(-0.6)).epsilon(1e-13));
  CHECK(fx_psi(1.5, 4.0, 0.3, &p, &dp) == FX_ERR_DOMAIN);
  double worst = 1;
  CHECK(fx_selftest("capi_selftest.csv", &worst) == FX_OK);
  CHECK(worst < 1e-10);
  std::remove("capi_selftest.csv");
  CHECK(std::string(fx_version()).size() > 0);
}
