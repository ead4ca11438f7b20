#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracext/assembly.hpp"
#include "fracext/error_norms.hpp"
#include "fracext/linalg.hpp"
#include "fracext/mesh.hpp"
#include "fracext/spectral.hpp"

namespace fracext {

/// Polynomial sum_k coeffs[k] x^k.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  /// Minimum over 1001 equispaced samples of [0, 1].
  double sampled_min() const;
};

enum class MeshPolicy { uniform, graded };
enum class SolverChoice { tensor, jacobi, none };

struct StudyConfig {
  DomainKind domain = DomainKind::unit_interval;
  double s = 0.5;
  MeshPolicy mesh_policy = MeshPolicy::graded;
  std::optional<double> gamma;  ///< graded only; empty selects 1.05 * 3 / (1 - alpha)
  std::vector<std::size_t> levels;
  bool auto_truncation = true;
  double truncation_constant = 1.0;  ///< C in the automatic rule
  double fixed_truncation = 0.0;     ///< Y when auto_truncation is false
  std::optional<Polynomial> op_a;    ///< diffusion a(x), interval only
  std::optional<Polynomial> op_c;    ///< reaction c(x), interval only
  std::vector<SpectralMode> rhs;     ///< f in the normalized eigenbasis; empty selects the manufactured source
  double solver_tol = 1e-12;
  SolverChoice solver = SolverChoice::tensor;
  QuadRule quadrature;
  std::string output;
  bool record_timings = false;
  std::size_t mtt_grid_factor = 4;

  /// Parses the JSON form.  Unknown keys, wrong types and invalid values throw ConfigError.
  static StudyConfig from_json_text(const std::string& text);
  static StudyConfig from_file(const std::string& path);
  std::string to_json_text() const;

  int dimension() const { return domain == DomainKind::unit_interval ? 1 : 2; }
  bool has_operator() const { return op_a.has_value() || op_c.has_value(); }
  OperatorCoeffs coefficients() const;
  /// Source modes: `rhs`, or lambda_1^s times the first eigenfunction scaled to prod sin(pi x_i).
  std::vector<SpectralMode> source_modes() const;
  /// Lower bound on the first eigenvalue of L: a_min n pi^2 + c_min.
  double lambda1_lower_bound() const;
};

struct StudyRow {
  std::size_t level = 0;
  std::size_t M = 0;
  std::size_t cells = 0;
  std::size_t dofs = 0;
  double Y = 0.0;
  double err_h1w = 0.0;
  double err_hs = 0.0;
  double assemble_ms = 0.0;
  double solve_ms = 0.0;
  std::size_t cg_iters = 0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log10(y) against log10(x).  Throws ConfigError for fewer
/// than two points or mismatched lengths, DomainError for nonpositive values.
RateFit fit_rate(std::span<const double> x, std::span<const double> y);

struct ConvergenceTable {
  std::vector<StudyRow> rows;
  double rate_h1w = 0.0;
  double rate_hs = 0.0;
};

/// Slopes of both error columns against cells over the last max(3, ceil(L/2))
/// rows; NaN with fewer than three rows or any non-finite error.
void fit_table_rates(ConvergenceTable& table);

/// One solved level.
struct LevelSolution {
  CylinderMesh mesh;
  FracParams params;
  std::vector<double> nodal;  ///< all nodes, Dirichlet entries zero
  SolveReport report;
  double assemble_ms = 0.0;
  double solve_ms = 0.0;
  SparseSystem system;
};

/// Truncation height used at level `index` of the config.
double level_truncation(const StudyConfig& config, std::size_t index);

/// Builds, assembles and solves level `index`.  Throws SolverError with level
/// diagnostics when CG does not converge.
LevelSolution solve_level(const StudyConfig& config, std::size_t index, int threads = 1);

/// Runs every level; `progress` (optional) sees each finished row.
ConvergenceTable run_study(const StudyConfig& config, int threads = 1,
                           const std::function<void(const StudyRow&)>& progress = {});

/// CSV with header `level,M,cells,dofs,Y,err_h1w,err_hs,assemble_ms,solve_ms,cg_iters`,
/// floats with 16 significant digits, then `# rate_h1w=` and `# rate_hs=` lines.
void write_csv(const ConvergenceTable& table, std::ostream& out);
void emit_csv(const ConvergenceTable& table, const std::string& path);
/// Inverse of write_csv.  Throws ConfigError on malformed input.
ConvergenceTable read_csv(std::istream& in);

/// Bottom-face values of a level as CSV: `x,U` or `x1,x2,U`.
void write_trace_csv(const LevelSolution& level, std::ostream& out);

/// Extension trace against the matrix transference oracle (interval only).
struct OracleRow {
  std::size_t n_omega = 0;  ///< oracle grid cells
  std::size_t m_cyl = 0;    ///< extension level M
  double l2_gap = 0.0;
};
std::vector<OracleRow> oracle_compare(const StudyConfig& config, int threads = 1);
void write_oracle_csv(std::span<const OracleRow> rows, std::ostream& out);

/// K_nu on the grid nu in {0.1, ..., 0.9} x 40 log-spaced z in [1e-3, 30]
/// against the integral representation.
struct SelftestRow {
  double nu = 0.0;
  double z = 0.0;
  double value = 0.0;
  double reference = 0.0;
  double rel_err = 0.0;
};
std::vector<SelftestRow> bessel_selftest();
void write_selftest_csv(std::span<const SelftestRow> rows, std::ostream& out);

}  // namespace fracext
