#pragma once

#include "embedfem/problem.hpp"

#include <string>
#include <vector>

namespace embedfem {

/// Writes legacy-VTK ASCII files into `out_dir` (created if needed):
/// solid.vtk (unstructured hexahedra, POINT_DATA displacement) and one
/// <structure name>.vtk per structure (polydata lines, quads or a vertex,
/// POINT_DATA Sigma and theta in global components). Numbers use %.17g,
/// so identical solutions give identical bytes. Returns the paths written.
/// Throws IoError if the directory or a file cannot be written.
std::vector<std::string> export_fields(const CoupledProblem& problem, const Solution& solution,
                                       const std::string& out_dir);

std::string solid_vtk(const SolidMesh& mesh, const Vector& u);
std::string structure_vtk(const StructureModel& model, const Vector& field, const std::string& title);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace embedfem
