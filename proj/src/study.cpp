#include "fracext/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracext/error.hpp"
#include "fracext/oracle_mtt.hpp"
#include "fracext/tensor_precond.hpp"

namespace fracext {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

Polynomial get_polynomial(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of coefficients");
  Polynomial p;
  for (const auto& c : j) p.coeffs.push_back(get_number(c, where));
  return p;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "nan") return kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("CSV: cannot parse number '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("CSV: cannot parse number '" + text + "'");
  return v;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

double Polynomial::sampled_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000; ++i) m = std::min(m, (*this)(i / 1000.0));
  return m;
}

StudyConfig StudyConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"domain", "s", "mesh_policy", "levels", "truncation", "operator", "rhs", "solver_tol", "solver",
              "quadrature", "output", "record_timings", "mtt_grid_factor"},
             "config");
  StudyConfig c;

  if (!j.contains("domain") || !j["domain"].is_string()) throw ConfigError("config: 'domain' must be a string");
  const auto domain = j["domain"].get<std::string>();
  if (domain == "interval") {
    c.domain = DomainKind::unit_interval;
  } else if (domain == "square") {
    c.domain = DomainKind::unit_square;
  } else {
    throw ConfigError("config: 'domain' must be \"interval\" or \"square\"");
  }

  if (!j.contains("s")) throw ConfigError("config: 's' is required");
  c.s = get_number(j["s"], "config.s");
  if (!(c.s > 0.0 && c.s < 1.0)) throw ConfigError("config: 's' must lie in (0, 1)");

  if (j.contains("mesh_policy")) {
    const auto& mp = j["mesh_policy"];
    if (mp.is_string()) {
      const auto kind = mp.get<std::string>();
      if (kind == "uniform") {
        c.mesh_policy = MeshPolicy::uniform;
      } else if (kind == "graded") {
        c.mesh_policy = MeshPolicy::graded;
      } else {
        throw ConfigError("config.mesh_policy: expected \"uniform\" or \"graded\"");
      }
    } else {
      check_keys(mp, {"kind", "gamma"}, "config.mesh_policy");
      if (!mp.contains("kind") || !mp["kind"].is_string()) throw ConfigError("config.mesh_policy: 'kind' is required");
      const auto kind = mp["kind"].get<std::string>();
      if (kind == "uniform") {
        c.mesh_policy = MeshPolicy::uniform;
        if (mp.contains("gamma")) throw ConfigError("config.mesh_policy: 'gamma' is only valid for graded meshes");
      } else if (kind == "graded") {
        c.mesh_policy = MeshPolicy::graded;
        if (mp.contains("gamma")) {
          const auto& g = mp["gamma"];
          if (g.is_string()) {
            if (g.get<std::string>() != "auto") throw ConfigError("config.mesh_policy.gamma: expected a number or \"auto\"");
          } else {
            c.gamma = get_number(g, "config.mesh_policy.gamma");
            if (!(*c.gamma >= 1.0)) throw ConfigError("config.mesh_policy.gamma: must be at least 1");
          }
        }
      } else {
        throw ConfigError("config.mesh_policy.kind: expected \"uniform\" or \"graded\"");
      }
    }
  }

  if (!j.contains("levels") || !j["levels"].is_array() || j["levels"].empty())
    throw ConfigError("config: 'levels' must be a nonempty array");
  for (const auto& v : j["levels"]) c.levels.push_back(get_count(v, "config.levels"));
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 2) throw ConfigError("config.levels: every level must be at least 2");
    if (i > 0 && c.levels[i] <= c.levels[i - 1]) throw ConfigError("config.levels: must be strictly increasing");
  }

  if (j.contains("truncation")) {
    const auto& t = j["truncation"];
    check_keys(t, {"kind", "C", "Y"}, "config.truncation");
    if (!t.contains("kind") || !t["kind"].is_string()) throw ConfigError("config.truncation: 'kind' is required");
    const auto kind = t["kind"].get<std::string>();
    if (kind == "auto") {
      c.auto_truncation = true;
      if (t.contains("Y")) throw ConfigError("config.truncation: 'Y' is only valid for kind \"fixed\"");
      if (t.contains("C")) c.truncation_constant = get_number(t["C"], "config.truncation.C");
      if (!(c.truncation_constant > 0.0)) throw ConfigError("config.truncation.C: must be positive");
    } else if (kind == "fixed") {
      c.auto_truncation = false;
      if (t.contains("C")) throw ConfigError("config.truncation: 'C' is only valid for kind \"auto\"");
      if (!t.contains("Y")) throw ConfigError("config.truncation: fixed truncation needs 'Y'");
      c.fixed_truncation = get_number(t["Y"], "config.truncation.Y");
      if (!(c.fixed_truncation > 0.0)) throw ConfigError("config.truncation.Y: must be positive");
    } else {
      throw ConfigError("config.truncation.kind: expected \"auto\" or \"fixed\"");
    }
  }

  if (j.contains("operator")) {
    const auto& op = j["operator"];
    check_keys(op, {"a", "c"}, "config.operator");
    if (c.domain != DomainKind::unit_interval) throw ConfigError("config.operator: only supported on the interval");
    if (op.contains("a")) c.op_a = get_polynomial(op["a"], "config.operator.a");
    if (op.contains("c")) c.op_c = get_polynomial(op["c"], "config.operator.c");
    if (c.op_a && !(c.op_a->sampled_min() > 0.0)) throw ConfigError("config.operator.a: must be positive on [0, 1]");
    if (c.op_c && !(c.op_c->sampled_min() >= 0.0)) throw ConfigError("config.operator.c: must be nonnegative on [0, 1]");
  }

  if (j.contains("rhs")) {
    const auto& r = j["rhs"];
    if (r.is_string()) {
      if (r.get<std::string>() != "manufactured") throw ConfigError("config.rhs: expected \"manufactured\" or a list");
    } else if (r.is_array()) {
      for (const auto& term : r) {
        check_keys(term, {"index", "coeff"}, "config.rhs[]");
        if (!term.contains("index") || !term["index"].is_array()) throw ConfigError("config.rhs[]: 'index' is required");
        if (!term.contains("coeff")) throw ConfigError("config.rhs[]: 'coeff' is required");
        const auto& idx = term["index"];
        const double coeff = get_number(term["coeff"], "config.rhs[].coeff");
        const std::size_t want = c.domain == DomainKind::unit_interval ? 1 : 2;
        if (idx.size() != want) throw ConfigError("config.rhs[].index: expected " + std::to_string(want) + " entries");
        const int m = static_cast<int>(get_count(idx[0], "config.rhs[].index"));
        try {
          if (want == 1) {
            c.rhs.push_back(SpectralMode::interval(m, coeff));
          } else {
            c.rhs.push_back(SpectralMode::square(m, static_cast<int>(get_count(idx[1], "config.rhs[].index")), coeff));
          }
        } catch (const DomainError& e) {
          throw ConfigError(std::string("config.rhs[].index: ") + e.what());
        }
      }
      if (c.rhs.empty()) throw ConfigError("config.rhs: list must not be empty");
    } else {
      throw ConfigError("config.rhs: expected \"manufactured\" or a list");
    }
  }

  if (j.contains("solver_tol")) {
    c.solver_tol = get_number(j["solver_tol"], "config.solver_tol");
    if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0)) throw ConfigError("config.solver_tol: must lie in (0, 1)");
  }
  if (j.contains("solver")) {
    if (!j["solver"].is_string()) throw ConfigError("config.solver: expected a string");
    const auto v = j["solver"].get<std::string>();
    if (v == "tensor") {
      c.solver = SolverChoice::tensor;
    } else if (v == "jacobi") {
      c.solver = SolverChoice::jacobi;
    } else if (v == "none") {
      c.solver = SolverChoice::none;
    } else {
      throw ConfigError("config.solver: expected \"tensor\", \"jacobi\" or \"none\"");
    }
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    check_keys(q, {"x_order", "y_order", "jacobi_order"}, "config.quadrature");
    auto order = [&](const char* key, int& dst) {
      if (!q.contains(key)) return;
      const auto v = get_count(q[key], std::string("config.quadrature.") + key);
      if (v < 1 || v > 40) throw ConfigError(std::string("config.quadrature.") + key + ": must lie in [1, 40]");
      dst = static_cast<int>(v);
    };
    order("x_order", c.quadrature.x_order);
    order("y_order", c.quadrature.y_order);
    order("jacobi_order", c.quadrature.jacobi_order);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("config.output: expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("record_timings")) {
    if (!j["record_timings"].is_boolean()) throw ConfigError("config.record_timings: expected a boolean");
    c.record_timings = j["record_timings"].get<bool>();
  }
  if (j.contains("mtt_grid_factor")) {
    c.mtt_grid_factor = get_count(j["mtt_grid_factor"], "config.mtt_grid_factor");
    if (c.mtt_grid_factor < 1) throw ConfigError("config.mtt_grid_factor: must be positive");
  }
  return c;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string StudyConfig::to_json_text() const {
  ordered_json j;
  j["domain"] = domain == DomainKind::unit_interval ? "interval" : "square";
  j["s"] = s;
  if (mesh_policy == MeshPolicy::uniform) {
    j["mesh_policy"] = {{"kind", "uniform"}};
  } else if (gamma) {
    j["mesh_policy"] = {{"kind", "graded"}, {"gamma", *gamma}};
  } else {
    j["mesh_policy"] = {{"kind", "graded"}, {"gamma", "auto"}};
  }
  j["levels"] = levels;
  if (auto_truncation) {
    j["truncation"] = {{"kind", "auto"}, {"C", truncation_constant}};
  } else {
    j["truncation"] = {{"kind", "fixed"}, {"Y", fixed_truncation}};
  }
  if (has_operator()) {
    ordered_json op = ordered_json::object();
    if (op_a) op["a"] = op_a->coeffs;
    if (op_c) op["c"] = op_c->coeffs;
    j["operator"] = op;
  }
  if (rhs.empty()) {
    j["rhs"] = "manufactured";
  } else {
    ordered_json list = ordered_json::array();
    for (const auto& m : rhs) {
      ordered_json term;
      term["index"] = m.n == 0 ? std::vector<int>{m.m} : std::vector<int>{m.m, m.n};
      term["coeff"] = m.coeff;
      list.push_back(term);
    }
    j["rhs"] = list;
  }
  j["solver_tol"] = solver_tol;
  j["solver"] = solver == SolverChoice::tensor ? "tensor" : solver == SolverChoice::jacobi ? "jacobi" : "none";
  j["quadrature"] = {{"x_order", quadrature.x_order},
                     {"y_order", quadrature.y_order},
                     {"jacobi_order", quadrature.jacobi_order}};
  if (!output.empty()) j["output"] = output;
  j["record_timings"] = record_timings;
  j["mtt_grid_factor"] = mtt_grid_factor;
  return j.dump(2);
}

OperatorCoeffs StudyConfig::coefficients() const {
  OperatorCoeffs c;
  if (op_a) {
    const Polynomial a = *op_a;
    c.diffusion.push_back([a](std::array<double, 2> x) { return a(x[0]); });
  }
  if (op_c) {
    const Polynomial r = *op_c;
    c.reaction = [r](std::array<double, 2> x) { return r(x[0]); };
  }
  return c;
}

std::vector<SpectralMode> StudyConfig::source_modes() const {
  if (!rhs.empty()) return rhs;
  if (domain == DomainKind::unit_interval) {
    const auto mode = SpectralMode::interval(1, 1.0);
    return {SpectralMode::interval(1, std::pow(mode.lambda, s) / std::sqrt(2.0))};
  }
  const auto mode = SpectralMode::square(1, 1, 1.0);
  return {SpectralMode::square(1, 1, std::pow(mode.lambda, s) / 2.0)};
}

double StudyConfig::lambda1_lower_bound() const {
  const double a = op_a ? op_a->sampled_min() : 1.0;
  const double c = op_c ? std::max(0.0, op_c->sampled_min()) : 0.0;
  return a * dimension() * kPi * kPi + c;
}

RateFit fit_rate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("fit_rate: length mismatch");
  if (x.size() < 2) throw ConfigError("fit_rate: need at least two points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_rate: values must be positive");
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate: abscissae must not all coincide");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

void fit_table_rates(ConvergenceTable& table) {
  table.rate_h1w = table.rate_hs = kNaN;
  const std::size_t total = table.rows.size();
  if (total < 3) return;
  const std::size_t used = std::min(total, std::max<std::size_t>(3, (total + 1) / 2));
  auto rate = [&](auto member) {
    std::vector<double> x, y;
    for (std::size_t i = total - used; i < total; ++i) {
      const double e = table.rows[i].*member;
      if (!std::isfinite(e) || !(e > 0.0)) return kNaN;
      x.push_back(static_cast<double>(table.rows[i].cells));
      y.push_back(e);
    }
    return fit_rate(x, y).slope;
  };
  table.rate_h1w = rate(&StudyRow::err_h1w);
  table.rate_hs = rate(&StudyRow::err_hs);
}

double level_truncation(const StudyConfig& config, std::size_t index) {
  if (index >= config.levels.size()) throw ConfigError("level index out of range");
  if (!config.auto_truncation) return config.fixed_truncation;
  // epsilon from the previous level's cell count; the first level uses its own
  const std::size_t ref = index == 0 ? index : index - 1;
  const double cells = static_cast<double>(OmegaSpec{config.domain, config.levels[ref]}.cell_count()) *
                       static_cast<double>(config.levels[ref]);
  const double eps = std::pow(cells, -1.0 / (config.dimension() + 1));
  return choose_truncation(eps, config.lambda1_lower_bound(), config.truncation_constant);
}

LevelSolution solve_level(const StudyConfig& config, std::size_t index, int threads) {
  if (index >= config.levels.size()) throw ConfigError("level index out of range");
  const std::size_t M = config.levels[index];
  const auto params = FracParams::from_s(config.s);
  const double Y = level_truncation(config, index);
  const double gamma =
      config.mesh_policy == MeshPolicy::uniform ? 1.0 : config.gamma.value_or(default_grading(params.alpha));
  CylinderMesh mesh({config.domain, M}, make_y_partition(M, Y, gamma));

  const auto coeffs = config.coefficients();
  AssemblyOptions aopts;
  aopts.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  auto system = assemble_extension_system(mesh, params, config.source_modes(), coeffs, aopts);
  const double assemble_ms = elapsed_ms(t0);

  const auto t1 = std::chrono::steady_clock::now();
  CgOptions copts;
  copts.tol = config.solver_tol;
  copts.threads = threads;
  copts.precond = config.solver == SolverChoice::none ? Preconditioner::none : Preconditioner::jacobi;
  std::optional<TensorPreconditioner> tensor;
  if (config.solver == SolverChoice::tensor) {
    tensor.emplace(mesh, params, coeffs, aopts);
    copts.custom = tensor->function();
  }
  std::vector<double> x;
  const auto report = cg_solve(system.matrix, system.rhs, x, copts);
  const double solve_ms = elapsed_ms(t1);
  if (!report.converged) {
    throw SolverError("level " + std::to_string(index) + " (M=" + std::to_string(M) +
                      ", dofs=" + std::to_string(mesh.free_count()) + "): CG did not converge after " +
                      std::to_string(report.iterations) + " iterations, residual " +
                      format_double(report.scaled_residual));
  }
  auto nodal = expand_free(mesh, x);
  return LevelSolution{std::move(mesh), params, std::move(nodal), report, assemble_ms, solve_ms, std::move(system)};
}

ConvergenceTable run_study(const StudyConfig& config, int threads,
                           const std::function<void(const StudyRow&)>& progress) {
  ConvergenceTable table;
  const auto exact = spectral_fractional_solve(config.source_modes(), config.s);
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const auto level = solve_level(config, i, threads);
    StudyRow row;
    row.level = i;
    row.M = config.levels[i];
    row.cells = level.mesh.cell_count();
    row.dofs = level.mesh.free_count();
    row.Y = level.mesh.ypart().truncation();
    if (config.has_operator()) {
      row.err_h1w = row.err_hs = kNaN;
    } else {
      row.err_h1w = weighted_h1_error(level.mesh, level.nodal, exact, config.quadrature, threads);
      row.err_hs = trace_hs_error(level.mesh.omega(), bottom_trace(level.mesh, level.nodal), exact.modes, config.s);
    }
    row.assemble_ms = config.record_timings ? level.assemble_ms : kNaN;
    row.solve_ms = config.record_timings ? level.solve_ms : kNaN;
    row.cg_iters = level.report.iterations;
    table.rows.push_back(row);
    if (progress) progress(row);
  }
  fit_table_rates(table);
  return table;
}

void write_csv(const ConvergenceTable& table, std::ostream& out) {
  out << "level,M,cells,dofs,Y,err_h1w,err_hs,assemble_ms,solve_ms,cg_iters\n";
  for (const auto& r : table.rows) {
    out << r.level << ',' << r.M << ',' << r.cells << ',' << r.dofs << ',' << format_double(r.Y) << ','
        << format_double(r.err_h1w) << ',' << format_double(r.err_hs) << ',' << format_double(r.assemble_ms) << ','
        << format_double(r.solve_ms) << ',' << r.cg_iters << '\n';
  }
  out << "# rate_h1w=" << format_double(table.rate_h1w) << '\n';
  out << "# rate_hs=" << format_double(table.rate_hs) << '\n';
}

void emit_csv(const ConvergenceTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(table, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

ConvergenceTable read_csv(std::istream& in) {
  ConvergenceTable table;
  table.rate_h1w = table.rate_hs = kNaN;
  std::string line;
  if (!std::getline(in, line) || line != "level,M,cells,dofs,Y,err_h1w,err_hs,assemble_ms,solve_ms,cg_iters")
    throw ConfigError("CSV: unexpected header");
  auto parse_count = [](const std::string& t) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("CSV: cannot parse integer '" + t + "'");
    return static_cast<std::size_t>(std::stoull(t));
  };
  while (std::getline(in, line)) {
    if (line.rfind("# rate_h1w=", 0) == 0) {
      table.rate_h1w = parse_double(line.substr(11));
      continue;
    }
    if (line.rfind("# rate_hs=", 0) == 0) {
      table.rate_hs = parse_double(line.substr(10));
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw ConfigError("CSV: expected 10 fields in '" + line + "'");
    StudyRow r;
    r.level = parse_count(f[0]);
    r.M = parse_count(f[1]);
    r.cells = parse_count(f[2]);
    r.dofs = parse_count(f[3]);
    r.Y = parse_double(f[4]);
    r.err_h1w = parse_double(f[5]);
    r.err_hs = parse_double(f[6]);
    r.assemble_ms = parse_double(f[7]);
    r.solve_ms = parse_double(f[8]);
    r.cg_iters = parse_count(f[9]);
    table.rows.push_back(r);
  }
  return table;
}

void write_trace_csv(const LevelSolution& level, std::ostream& out) {
  const auto& mesh = level.mesh;
  const bool square = mesh.dimension() == 2;
  out << (square ? "x1,x2,U\n" : "x,U\n");
  for (std::size_t b = 0; b < mesh.base_node_count(); ++b) {
    const auto x = mesh.base_coords(b);
    out << format_double(x[0]) << ',';
    if (square) out << format_double(x[1]) << ',';
    out << format_double(level.nodal[mesh.node_index(b, 0)]) << '\n';
  }
}

std::vector<OracleRow> oracle_compare(const StudyConfig& config, int threads) {
  if (config.domain != DomainKind::unit_interval) throw ConfigError("oracle-compare: only the interval is supported");
  Operator1D op;
  if (config.op_a) {
    const Polynomial a = *config.op_a;
    op.a = [a](double x) { return a(x); };
  }
  if (config.op_c) {
    const Polynomial c = *config.op_c;
    op.c = [c](double x) { return c(x); };
  }
  const auto modes = config.source_modes();
  const auto f = [&modes](double x) { return evaluate_modes(modes, {x, 0.0}); };
  std::vector<OracleRow> rows;
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const std::size_t n = config.mtt_grid_factor * config.levels[i];
    if (n > 2000) throw ConfigError("oracle-compare: oracle grid " + std::to_string(n) + " exceeds 2000 cells");
    const auto level = solve_level(config, i, threads);
    const auto mtt = MttOracle(op, n).solve(f, config.s);
    rows.push_back({n, config.levels[i], l2_distance_p1(bottom_trace(level.mesh, level.nodal), mtt)});
  }
  return rows;
}

void write_oracle_csv(std::span<const OracleRow> rows, std::ostream& out) {
  out << "N_omega,M_cyl,l2_gap\n";
  for (const auto& r : rows) out << r.n_omega << ',' << r.m_cyl << ',' << format_double(r.l2_gap) << '\n';
}

std::vector<SelftestRow> bessel_selftest() {
  std::vector<SelftestRow> rows;
  for (int i = 1; i <= 9; ++i) {
    const double nu = 0.1 * i;
    for (int k = 0; k < 40; ++k) {
      const double z = 1e-3 * std::pow(30.0 / 1e-3, k / 39.0);
      SelftestRow r;
      r.nu = nu;
      r.z = z;
      r.value = bessel_k(nu, z);
      r.reference = bessel_k_integral(nu, z);
      r.rel_err = std::abs(r.value - r.reference) / std::abs(r.reference);
      rows.push_back(r);
    }
  }
  return rows;
}

void write_selftest_csv(std::span<const SelftestRow> rows, std::ostream& out) {
  out << "nu,z,bessel_k,integral,rel_err\n";
  for (const auto& r : rows) {
    out << format_double(r.nu) << ',' << format_double(r.z) << ',' << format_double(r.value) << ','
        << format_double(r.reference) << ',' << format_double(r.rel_err) << '\n';
  }
}

}  // namespace fracext
