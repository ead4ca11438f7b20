#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace fracext {

enum class DomainKind { unit_interval, unit_square };

/// Quasi-uniform grid of the base domain Omega: `subdivisions` congruent cells
/// per coordinate direction.
struct OmegaSpec {
  DomainKind kind = DomainKind::unit_interval;
  std::size_t subdivisions = 1;

  int dimension() const { return kind == DomainKind::unit_interval ? 1 : 2; }
  std::size_t nodes_per_direction() const { return subdivisions + 1; }
  std::size_t node_count() const;
  std::size_t cell_count() const;
  double width() const { return 1.0 / static_cast<double>(subdivisions); }
};

/// Partition 0 = y_0 < ... < y_M = Y of the extended direction,
/// y_k = (k/M)^gamma * Y.  gamma = 1 gives the uniform partition.
class YPartition {
 public:
  YPartition(std::vector<double> points, double gamma);

  std::size_t intervals() const { return points_.size() - 1; }
  double truncation() const { return points_.back(); }
  double gamma() const { return gamma_; }
  const std::vector<double>& points() const { return points_; }
  double width(std::size_t k) const { return points_[k + 1] - points_[k]; }

  /// Largest ratio of neighboring interval lengths, taken in both directions.
  double max_neighbor_ratio() const;

 private:
  std::vector<double> points_;
  double gamma_;
};

/// Power-law partition y_k = (k/M)^gamma * Y.  Throws ConfigError for M < 2,
/// Y <= 0 or gamma < 1.
YPartition make_y_partition(std::size_t intervals, double truncation, double gamma);

/// Lower bound 3/(1 - alpha) on the grading exponent for the optimal rate.
double minimal_grading(double alpha);

/// Default grading exponent: 5% above minimal_grading(alpha).
double default_grading(double alpha);

/// True when gamma does not exceed minimal_grading(alpha).
bool grading_too_weak(double gamma, double alpha);

/// Truncation height max(1, (2 / sqrt(lambda1)) (ln C + 2 ln(1/eps))).
/// Throws ConfigError unless 0 < eps < 1, lambda1 > 0, C > 0.
double choose_truncation(double eps, double lambda1, double constant = 1.0);

/// Tensor-product grid of the truncated cylinder Omega x (0, Y) with
/// lexicographic node numbering (x fastest, y slowest).
class CylinderMesh {
 public:
  CylinderMesh(OmegaSpec omega, YPartition ypart);

  const OmegaSpec& omega() const { return omega_; }
  const YPartition& ypart() const { return ypart_; }
  int dimension() const { return omega_.dimension(); }

  std::size_t node_count() const { return omega_.node_count() * (ypart_.intervals() + 1); }
  std::size_t cell_count() const { return omega_.cell_count() * ypart_.intervals(); }
  std::size_t base_node_count() const { return omega_.node_count(); }

  /// Global index of base node `base` on layer k (y = y_k).
  std::size_t node_index(std::size_t base, std::size_t layer) const {
    return layer * omega_.node_count() + base;
  }

  /// Coordinates of base node `base` (x, or (x1, x2)).
  std::array<double, 2> base_coords(std::size_t base) const;

  /// Base node indices of base cell `cell`, in the order (0,0),(1,0)[,(0,1),(1,1)].
  std::vector<std::size_t> base_cell_nodes(std::size_t cell) const;

  /// Lower-left corner of base cell `cell`.
  std::array<double, 2> base_cell_origin(std::size_t cell) const;

  bool base_on_boundary(std::size_t base) const;

  /// Dirichlet nodes: lateral boundary (d Omega x [0, Y]) and the top face Omega x {Y}.
  const std::vector<bool>& dirichlet() const { return dirichlet_; }

  /// Free (non-Dirichlet) node -> global node, and global -> free (npos if Dirichlet).
  const std::vector<std::size_t>& free_nodes() const { return free_nodes_; }
  const std::vector<std::size_t>& free_index() const { return free_index_; }
  std::size_t free_count() const { return free_nodes_.size(); }

  /// {"n", "M_omega", "M", "Y", "gamma", "nodes", "cells", "free_dofs", "neighbor_ratio"}.
  std::string summary_json() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  OmegaSpec omega_;
  YPartition ypart_;
  std::vector<bool> dirichlet_;
  std::vector<std::size_t> free_nodes_;
  std::vector<std::size_t> free_index_;
};

}  // namespace fracext
