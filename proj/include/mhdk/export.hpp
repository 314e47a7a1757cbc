#pragma once

#include "mhdk/postproc.hpp"

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhdk {

// Columns: h,e_J,ord_J,e_phi,ord_phi,e_Acurl,ord_Acurl,e_AL2,ord_AL2,divJ.
// Missing orders are empty fields.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
nlohmann::json convergence_json(const std::vector<ConvergenceRow>& rows);

// Legacy VTK 3.0 ASCII unstructured grid of the mesh, with cell data
// B (curl A_h), J (cell average of J_h) and phi.
std::string vtk_string(const Mesh& mesh, const FieldFunction& j_h, const FieldFunction& phi_h,
                       const FieldFunction& a_h);

// Writes the whole buffer or throws std::runtime_error naming the path. A
// failed open leaves nothing behind.
void write_text_file(const std::string& path, const std::string& content);

// True when the parent directory of path exists (empty parent = cwd).
bool output_path_usable(const std::string& path);

}  // namespace mhdk
