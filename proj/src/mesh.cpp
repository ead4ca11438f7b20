#include "fracext/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "fracext/error.hpp"
#include "json.hpp"

namespace fracext {

std::size_t OmegaSpec::node_count() const {
  const std::size_t n = nodes_per_direction();
  return kind == DomainKind::unit_interval ? n : n * n;
}

std::size_t OmegaSpec::cell_count() const {
  return kind == DomainKind::unit_interval ? subdivisions : subdivisions * subdivisions;
}

YPartition::YPartition(std::vector<double> points, double gamma) : points_(std::move(points)), gamma_(gamma) {
  if (points_.size() < 2 || points_.front() != 0.0) throw ConfigError("YPartition: must start at 0");
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (!(points_[k] > points_[k - 1])) throw ConfigError("YPartition: points must be strictly increasing");
  }
}

double YPartition::max_neighbor_ratio() const {
  double worst = 1.0;
  for (std::size_t k = 0; k + 1 < intervals(); ++k) {
    const double r = width(k + 1) / width(k);
    worst = std::max({worst, r, 1.0 / r});
  }
  return worst;
}

YPartition make_y_partition(std::size_t intervals, double truncation, double gamma) {
  if (intervals < 2) throw ConfigError("y partition needs at least 2 intervals");
  if (!(truncation > 0.0) || !std::isfinite(truncation)) throw ConfigError("truncation height must be positive");
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw ConfigError("grading exponent must be >= 1");
  std::vector<double> pts(intervals + 1);
  const double m = static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k) {
    pts[k] = std::pow(static_cast<double>(k) / m, gamma) * truncation;
  }
  pts.front() = 0.0;
  pts.back() = truncation;
  return YPartition(std::move(pts), gamma);
}

double minimal_grading(double alpha) { return 3.0 / (1.0 - alpha); }

double default_grading(double alpha) { return 1.05 * minimal_grading(alpha); }

bool grading_too_weak(double gamma, double alpha) { return gamma <= minimal_grading(alpha); }

double choose_truncation(double eps, double lambda1, double constant) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("truncation tolerance must lie in (0, 1)");
  if (!(lambda1 > 0.0)) throw ConfigError("first eigenvalue must be positive");
  if (!(constant > 0.0)) throw ConfigError("truncation constant must be positive");
  const double y0 = 2.0 / std::sqrt(lambda1) * (std::log(constant) + 2.0 * std::log(1.0 / eps));
  return std::max(1.0, y0);
}

CylinderMesh::CylinderMesh(OmegaSpec omega, YPartition ypart) : omega_(omega), ypart_(std::move(ypart)) {
  if (omega_.subdivisions < 1) throw ConfigError("Omega grid needs at least one subdivision");
  const std::size_t layers = ypart_.intervals() + 1;
  const std::size_t base = omega_.node_count();
  dirichlet_.assign(base * layers, false);
  free_index_.assign(base * layers, npos);
  for (std::size_t layer = 0; layer < layers; ++layer) {
    for (std::size_t b = 0; b < base; ++b) {
      const std::size_t g = node_index(b, layer);
      dirichlet_[g] = base_on_boundary(b) || layer + 1 == layers;
      if (!dirichlet_[g]) {
        free_index_[g] = free_nodes_.size();
        free_nodes_.push_back(g);
      }
    }
  }
}

std::array<double, 2> CylinderMesh::base_coords(std::size_t base) const {
  const std::size_t n = omega_.nodes_per_direction();
  const double h = omega_.width();
  if (omega_.kind == DomainKind::unit_interval) return {static_cast<double>(base) * h, 0.0};
  return {static_cast<double>(base % n) * h, static_cast<double>(base / n) * h};
}

std::vector<std::size_t> CylinderMesh::base_cell_nodes(std::size_t cell) const {
  if (omega_.kind == DomainKind::unit_interval) return {cell, cell + 1};
  const std::size_t m = omega_.subdivisions;
  const std::size_t n = m + 1;
  const std::size_t i = cell % m;
  const std::size_t j = cell / m;
  const std::size_t b = j * n + i;
  return {b, b + 1, b + n, b + n + 1};
}

std::array<double, 2> CylinderMesh::base_cell_origin(std::size_t cell) const {
  const double h = omega_.width();
  if (omega_.kind == DomainKind::unit_interval) return {static_cast<double>(cell) * h, 0.0};
  const std::size_t m = omega_.subdivisions;
  return {static_cast<double>(cell % m) * h, static_cast<double>(cell / m) * h};
}

bool CylinderMesh::base_on_boundary(std::size_t base) const {
  const std::size_t n = omega_.nodes_per_direction();
  if (omega_.kind == DomainKind::unit_interval) return base == 0 || base + 1 == n;
  const std::size_t i = base % n;
  const std::size_t j = base / n;
  return i == 0 || j == 0 || i + 1 == n || j + 1 == n;
}

std::string CylinderMesh::summary_json() const {
  nlohmann::ordered_json j;
  j["n"] = dimension();
  j["M_omega"] = omega_.subdivisions;
  j["M"] = ypart_.intervals();
  j["Y"] = ypart_.truncation();
  j["gamma"] = ypart_.gamma();
  j["nodes"] = node_count();
  j["cells"] = cell_count();
  j["free_dofs"] = free_count();
  j["neighbor_ratio"] = ypart_.max_neighbor_ratio();
  return j.dump();
}

}  // namespace fracext
