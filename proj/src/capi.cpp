#include "fracext/fracext.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "fracext/error.hpp"
#include "fracext/specfun.hpp"
#include "fracext/study.hpp"

struct fx_study {
  fracext::StudyConfig config;
  int threads = 1;
  bool progress = false;
};

struct fx_table {
  fracext::ConvergenceTable table;
};

namespace {

thread_local std::string last_error;

fx_status fail(fx_status code, const std::string& message) {
  last_error = message;
  return code;
}

template <class F>
fx_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return FX_OK;
  } catch (const fracext::ConfigError& e) {
    return fail(FX_ERR_CONFIG, e.what());
  } catch (const fracext::SolverError& e) {
    return fail(FX_ERR_SOLVER, e.what());
  } catch (const fracext::IoError& e) {
    return fail(FX_ERR_IO, e.what());
  } catch (const fracext::DomainError& e) {
    return fail(FX_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(FX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FX_ERR_INTERNAL, "unknown error");
  }
}

// Runs `write` on a file stream for `path`, or on stdout when path is null.
template <class W>
void with_output(const char* path, W&& write) {
  if (!path) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw fracext::IoError(std::string("cannot open '") + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw fracext::IoError(std::string("write to '") + path + "' failed");
}

}  // namespace

extern "C" {

const char* fx_version(void) { return "0.1.0"; }

const char* fx_last_error(void) { return last_error.c_str(); }

fx_status fx_study_from_json(const char* text, fx_study** out) {
  if (!text || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new fx_study{fracext::StudyConfig::from_json_text(text)}; });
}

fx_status fx_study_from_file(const char* path, fx_study** out) {
  if (!path || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new fx_study{fracext::StudyConfig::from_file(path)}; });
}

void fx_study_free(fx_study* study) { delete study; }

fx_status fx_study_set_threads(fx_study* study, int threads) {
  if (!study) return fail(FX_ERR_ARGUMENT, "null study");
  if (threads < 1) return fail(FX_ERR_ARGUMENT, "thread count must be positive");
  study->threads = threads;
  return FX_OK;
}

fx_status fx_study_set_timings(fx_study* study, int enabled) {
  if (!study) return fail(FX_ERR_ARGUMENT, "null study");
  study->config.record_timings = enabled != 0;
  return FX_OK;
}

fx_status fx_study_set_progress(fx_study* study, int enabled) {
  if (!study) return fail(FX_ERR_ARGUMENT, "null study");
  study->progress = enabled != 0;
  return FX_OK;
}

fx_status fx_study_level_count(const fx_study* study, size_t* out) {
  if (!study || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  *out = study->config.levels.size();
  return FX_OK;
}

fx_status fx_study_output(const fx_study* study, const char** out) {
  if (!study || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  *out = study->config.output.c_str();
  return FX_OK;
}

fx_status fx_study_run(const fx_study* study, fx_table** out) {
  if (!study || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::function<void(const fracext::StudyRow&)> progress;
    if (study->progress)
      progress = [](const fracext::StudyRow& r) {
        std::cerr << "level " << r.level << ": M=" << r.M << " dofs=" << r.dofs << " cg_iters=" << r.cg_iters << '\n';
      };
    auto t = fracext::run_study(study->config, study->threads, progress);
    *out = new fx_table{std::move(t)};
  });
}

fx_status fx_study_solve(const fx_study* study, const char* trace_path, const char* matrix_path, char* summary,
                         size_t capacity, size_t* needed) {
  if (!study) return fail(FX_ERR_ARGUMENT, "null study");
  return guarded([&] {
    const auto level = fracext::solve_level(study->config, study->config.levels.size() - 1, study->threads);
    with_output(trace_path, [&](std::ostream& os) { fracext::write_trace_csv(level, os); });
    if (matrix_path) level.system.matrix.write_matrix_market(matrix_path);
    const auto json = level.mesh.summary_json();
    if (needed) *needed = json.size() + 1;
    if (summary && capacity > 0) {
      const size_t n = std::min(capacity - 1, json.size());
      std::memcpy(summary, json.data(), n);
      summary[n] = '\0';
    }
  });
}

fx_status fx_study_oracle_compare(const fx_study* study, const char* path) {
  if (!study) return fail(FX_ERR_ARGUMENT, "null study");
  return guarded([&] {
    const auto rows = fracext::oracle_compare(study->config, study->threads);
    with_output(path, [&](std::ostream& os) { fracext::write_oracle_csv(rows, os); });
  });
}

size_t fx_table_row_count(const fx_table* table) { return table ? table->table.rows.size() : 0; }

fx_status fx_table_row(const fx_table* table, size_t index, fx_row* out) {
  if (!table || !out) return fail(FX_ERR_ARGUMENT, "null argument");
  if (index >= table->table.rows.size()) return fail(FX_ERR_ARGUMENT, "row index out of range");
  const auto& r = table->table.rows[index];
  *out = fx_row{r.level, r.M, r.cells, r.dofs, r.Y, r.err_h1w, r.err_hs, r.assemble_ms, r.solve_ms, r.cg_iters};
  return FX_OK;
}

fx_status fx_table_rates(const fx_table* table, double* rate_h1w, double* rate_hs) {
  if (!table) return fail(FX_ERR_ARGUMENT, "null table");
  if (rate_h1w) *rate_h1w = table->table.rate_h1w;
  if (rate_hs) *rate_hs = table->table.rate_hs;
  return FX_OK;
}

fx_status fx_table_write_csv(const fx_table* table, const char* path) {
  if (!table) return fail(FX_ERR_ARGUMENT, "null table");
  return guarded([&] { with_output(path, [&](std::ostream& os) { fracext::write_csv(table->table, os); }); });
}

void fx_table_free(fx_table* table) { delete table; }

fx_status fx_selftest(const char* path, double* max_rel_err) {
  return guarded([&] {
    const auto rows = fracext::bessel_selftest();
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.rel_err);
    with_output(path, [&](std::ostream& os) { fracext::write_selftest_csv(rows, os); });
    if (max_rel_err) *max_rel_err = worst;
  });
}

fx_status fx_bessel_k(double nu, double z, double* out) {
  if (!out) return fail(FX_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = fracext::bessel_k(nu, z); });
}

fx_status fx_gamma(double x, double* out) {
  if (!out) return fail(FX_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = fracext::gamma_fn(x); });
}

fx_status fx_psi(double s, double lambda, double y, double* psi, double* dpsi) {
  return guarded([&] {
    if (!(s > 0.0 && s < 1.0)) throw fracext::DomainError("s must lie in (0, 1)");
    if (!(lambda > 0.0)) throw fracext::DomainError("lambda must be positive");
    const auto p = fracext::psi_pair(fracext::FracParams::from_s(s), lambda, y);
    if (psi) *psi = p.psi;
    if (dpsi) *dpsi = p.dpsi;
  });
}

}  // extern "C"
