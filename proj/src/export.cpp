#include "mhdk/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mhdk {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "h,e_J,ord_J,e_phi,ord_phi,e_Acurl,ord_Acurl,e_AL2,ord_AL2,divJ\n";
  for (const ConvergenceRow& r : rows) {
    out << num(r.h) << ',' << num(r.e_J) << ',' << opt_num(r.ord_J) << ',' << num(r.e_phi) << ','
        << opt_num(r.ord_phi) << ',' << num(r.e_Acurl) << ',' << opt_num(r.ord_Acurl) << ',' << num(r.e_AL2)
        << ',' << opt_num(r.ord_AL2) << ',' << num(r.divJ) << '\n';
  }
  return out.str();
}

nlohmann::json convergence_json(const std::vector<ConvergenceRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ConvergenceRow& r : rows) arr.push_back(to_json(r));
  return arr;
}

std::string vtk_string(const Mesh& mesh, const FieldFunction& j_h, const FieldFunction& phi_h,
                       const FieldFunction& a_h) {
  if (j_h.dofmap == nullptr || phi_h.dofmap == nullptr || a_h.dofmap == nullptr) {
    throw InvalidArgument("vtk_string: field without a space");
  }
  std::ostringstream out;
  out << std::setprecision(12);
  out << "# vtk DataFile Version 3.0\n";
  out << "mhd kinematics solution\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& x = mesh.vertex(v);
    out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
  }
  const Index nc = mesh.num_cells();
  out << "CELLS " << nc << ' ' << 5 * nc << '\n';
  for (Index c = 0; c < nc; ++c) {
    const auto& cv = mesh.cell(c);
    out << "4 " << cv[0] << ' ' << cv[1] << ' ' << cv[2] << ' ' << cv[3] << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (Index c = 0; c < nc; ++c) out << "10\n";

  const Vec3 centroid(0.25, 0.25, 0.25);
  out << "CELL_DATA " << nc << '\n';
  out << "VECTORS B double\n";
  for (Index c = 0; c < nc; ++c) {
    const Vec3 b = a_h.curl(c);
    out << b.x() << ' ' << b.y() << ' ' << b.z() << '\n';
  }
  // J_h is affine per cell, so the centroid value is the cell average.
  out << "VECTORS J double\n";
  for (Index c = 0; c < nc; ++c) {
    const Vec3 j = j_h.vector_value(c, centroid);
    out << j.x() << ' ' << j.y() << ' ' << j.z() << '\n';
  }
  out << "SCALARS phi double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (Index c = 0; c < nc; ++c) out << phi_h.scalar_value(c, centroid) << '\n';
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  out.close();
  if (!out) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw std::runtime_error("write failed: " + path);
  }
}

bool output_path_usable(const std::string& path) {
  if (path.empty()) return false;
  const std::filesystem::path p(path);
  const std::filesystem::path parent = p.parent_path();
  std::error_code ec;
  if (parent.empty()) return true;
  return std::filesystem::is_directory(parent, ec);
}

}  // namespace mhdk
