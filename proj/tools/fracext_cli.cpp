// fracext: command line front end over the C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fracext/fracext.h"

namespace {

int exit_code(fx_status st) {
  switch (st) {
    case FX_OK: return 0;
    case FX_ERR_CONFIG:
    case FX_ERR_DOMAIN:
    case FX_ERR_ARGUMENT: return 2;
    case FX_ERR_IO: return 4;
    default: return 3;
  }
}

int report(fx_status st) {
  if (st != FX_OK) std::fprintf(stderr, "fracext: %s\n", fx_last_error());
  return exit_code(st);
}

const char* out_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Study {
  fx_study* ptr = nullptr;
  ~Study() { fx_study_free(ptr); }
};

struct Table {
  fx_table* ptr = nullptr;
  ~Table() { fx_table_free(ptr); }
};

fx_status load(const std::string& path, int threads, Study& study) {
  fx_status st = fx_study_from_file(path.c_str(), &study.ptr);
  if (st != FX_OK) return st;
  return fx_study_set_threads(study.ptr, threads);
}

int run_solve(const std::string& config, const std::string& out, const std::string& matrix, int threads) {
  Study study;
  if (fx_status st = load(config, threads, study); st != FX_OK) return report(st);
  std::string summary(1 << 16, '\0');
  fx_status st = fx_study_solve(study.ptr, out_or_null(out), out_or_null(matrix), summary.data(), summary.size(), nullptr);
  if (st != FX_OK) return report(st);
  std::fprintf(stderr, "%s\n", summary.c_str());
  return 0;
}

int run_converge(const std::string& config, std::string out, int threads, bool timings) {
  Study study;
  if (fx_status st = load(config, threads, study); st != FX_OK) return report(st);
  if (timings) fx_study_set_timings(study.ptr, 1);
  fx_study_set_progress(study.ptr, 1);
  if (out.empty()) {
    const char* configured = nullptr;
    fx_study_output(study.ptr, &configured);
    out = configured;
  }
  Table table;
  if (fx_status st = fx_study_run(study.ptr, &table.ptr); st != FX_OK) return report(st);
  return report(fx_table_write_csv(table.ptr, out_or_null(out)));
}

int run_oracle(const std::string& config, const std::string& out, int threads) {
  Study study;
  if (fx_status st = load(config, threads, study); st != FX_OK) return report(st);
  return report(fx_study_oracle_compare(study.ptr, out_or_null(out)));
}

int run_selftest(const std::string& out) {
  double worst = 0.0;
  fx_status st = fx_selftest(out_or_null(out), &worst);
  if (st != FX_OK) return report(st);
  std::fprintf(stderr, "max relative error %.3e\n", worst);
  return worst < 1e-10 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional elliptic solver via the extension method"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fx_version());

  std::string config, out, matrix;
  int threads = 1;
  bool timings = false;

  auto* solve = app.add_subcommand("solve", "solve the finest level, write the bottom-face trace");
  solve->add_option("--config", config, "study config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "trace CSV (default stdout)");
  solve->add_option("--dump-matrix", matrix, "write the system matrix in Matrix Market format");
  solve->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* converge = app.add_subcommand("converge", "run every level and fit convergence rates");
  converge->add_option("--config", config, "study config (JSON)")->required()->check(CLI::ExistingFile);
  converge->add_option("--out", out, "result CSV (default: config output, else stdout)");
  converge->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  converge->add_flag("--timings", timings, "record assembly and solve times");

  auto* oracle = app.add_subcommand("oracle-compare", "compare the trace with the matrix transference oracle");
  oracle->add_option("--config", config, "study config (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--out", out, "CSV (default stdout)");
  oracle->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* selftest = app.add_subcommand("selftest", "check K_nu against its integral representation");
  selftest->add_option("--out", out, "CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*solve) return run_solve(config, out, matrix, threads);
  if (*converge) return run_converge(config, out, threads, timings);
  if (*oracle) return run_oracle(config, out, threads);
  return run_selftest(out);
}
