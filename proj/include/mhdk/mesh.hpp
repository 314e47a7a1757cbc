#pragma once

#include "mhdk/types.hpp"

#include <array>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhdk {

// Reference tetrahedron (0,0,0),(1,0,0),(0,1,0),(0,0,1).
// Local edge k joins kLocalEdges[k][0] -> kLocalEdges[k][1];
// local face k is opposite local vertex k, listed in ascending local order.
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

struct CellGeometry {
  Mat3 jacobian;           // columns x1-x0, x2-x0, x3-x0
  double det = 0.0;
  Mat3 inverse_transpose;  // J^{-T}
  Vec3 origin;             // x0

  Vec3 map(const Vec3& ref) const { return origin + jacobian * ref; }
};

// Global orientation of a local edge: the global edge index and whether the
// local direction (lower local -> higher local vertex) agrees with the global
// one (ascending global vertex index).
struct EdgeIncidence {
  Index edge = -1;
  int sign = 1;
};

// Global orientation of a local face: slot[p] is the position of local face
// vertex p inside the globally sorted vertex triple; sign is the parity of
// that permutation (the face normal flips with it).
struct FaceIncidence {
  Index face = -1;
  std::array<int, 3> slot{0, 1, 2};
  int sign = 1;
};

// How each subcube is cut into six tetrahedra around one of its diagonals.
//   Uniform:   every subcube along its (0,0,0)->(1,1,1) diagonal.
//   Reflected: subcube (i,j,k) is the Uniform split mirrored in every axis
//              whose index is odd, so neighbours are mirror images across
//              their shared face.
enum class SubcubeSplit { Reflected, Uniform };

// Freudenthal (Kuhn) type triangulation of the unit cube with n^3 subcubes,
// six tetrahedra each. Immutable after construction.
class Mesh {
public:
  explicit Mesh(int n, SubcubeSplit split = SubcubeSplit::Reflected);

  int n() const { return n_; }
  SubcubeSplit split() const { return split_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  Index num_faces() const { return static_cast<Index>(faces_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }

  const Vec3& vertex(Index v) const { return vertices_[v]; }
  const std::array<Index, 4>& cell(Index c) const { return cells_[c]; }
  const std::array<Index, 2>& edge(Index e) const { return edges_[e]; }
  const std::array<Index, 3>& face(Index f) const { return faces_[f]; }

  const std::array<EdgeIncidence, 6>& cell_edges(Index c) const { return cell_edges_[c]; }
  const std::array<FaceIncidence, 4>& cell_faces(Index c) const { return cell_faces_[c]; }

  // Cells incident to a face; second entry is -1 on the boundary.
  const std::array<Index, 2>& face_cells(Index f) const { return face_cells_[f]; }

  bool boundary_vertex(Index v) const { return boundary_vertex_[v] != 0; }
  bool boundary_edge(Index e) const { return boundary_edge_[e] != 0; }
  bool boundary_face(Index f) const { return boundary_face_[f] != 0; }

  Index count_boundary_vertices() const;
  Index count_boundary_edges() const;
  Index count_boundary_faces() const;

  // Unit normal of a face oriented by ascending vertex order (right-hand rule).
  Vec3 face_normal(Index f) const;
  double face_area(Index f) const;
  double cell_volume(Index c) const;
  Vec3 cell_centroid(Index c) const;

  // Cell containing a physical point of the closed cube, with the point's
  // reference coordinates in that cell. Points on shared entities resolve to
  // one of the incident cells.
  std::pair<Index, Vec3> locate(const Vec3& x) const;

private:
  int n_;
  SubcubeSplit split_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<Index, 4>> cells_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<std::array<Index, 3>> faces_;
  std::vector<std::array<EdgeIncidence, 6>> cell_edges_;
  std::vector<std::array<FaceIncidence, 4>> cell_faces_;
  std::vector<std::array<Index, 2>> face_cells_;
  std::vector<char> boundary_vertex_;
  std::vector<char> boundary_edge_;
  std::vector<char> boundary_face_;
  std::vector<std::array<Index, 6>> subcube_cells_;
};

Mesh build_cube_mesh(int n, SubcubeSplit split = SubcubeSplit::Reflected);

// Longest edge length.
double mesh_size(const Mesh& mesh);

// Affine map from the reference tetrahedron; throws NumericalError when the
// cell is degenerate or inverted.
CellGeometry cell_geometry(const Mesh& mesh, Index cell);
CellGeometry cell_geometry(const std::array<Vec3, 4>& vertices);

nlohmann::json mesh_summary(const Mesh& mesh);

}  // namespace mhdk
