#pragma once

#include "embedfem/mesh.hpp"
#include "embedfem/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace embedfem {

struct MetricRow {
  std::string name;
  double value = 0.0;
  std::string unit;
};

/// Ordered (name, value, unit) rows with unique names.
class MetricTable {
 public:
  void add(const std::string& name, double value, const std::string& unit = "");
  [[nodiscard]] const std::vector<MetricRow>& rows() const { return rows_; }
  [[nodiscard]] std::optional<double> find(const std::string& name) const;
  [[nodiscard]] double at(const std::string& name) const;
  /// CSV with header `name,value,unit`, values printed with %.17g.
  [[nodiscard]] std::string to_csv() const;

 private:
  std::vector<MetricRow> rows_;
};

/// %.17g formatting.
std::string format_double(double v);

/// max |u_c| over a node set (all nodes if the name is "all").
double max_abs_component(const SolidMesh& mesh, const Vector& u, const std::string& node_set, int component);

/// max |u| over a node set.
double max_norm(const SolidMesh& mesh, const Vector& u, const std::string& node_set);

/// Relative H1-type distance between a field on `mesh` and a reference on
/// `ref_mesh`, integrated with 2x2x2 Gauss points of the reference mesh:
/// sqrt(int |du|^2 + ell^2 |D du|^2) / sqrt(int |u_ref|^2 + ell^2 |D u_ref|^2).
double h1_mismatch(const SolidMesh& ref_mesh, const Vector& u_ref, const SolidMesh& mesh, const Vector& u,
                   double ell);

/// Absolute H1-type norm of a solid field.
double h1_norm(const SolidMesh& mesh, const Vector& u, double ell);

}  // namespace embedfem
