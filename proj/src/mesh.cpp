#include "mhdk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

namespace mhdk {

namespace {

template <std::size_t N>
Index find_sorted(const std::vector<std::array<Index, N>>& list,
                  const std::array<Index, N>& key) {
  auto it = std::lower_bound(list.begin(), list.end(), key);
  if (it == list.end() || *it != key) {
    throw NumericalError("mesh: entity lookup failed");
  }
  return static_cast<Index>(it - list.begin());
}

double signed_det(const std::array<Vec3, 4>& x) {
  Mat3 jac;
  jac.col(0) = x[1] - x[0];
  jac.col(1) = x[2] - x[0];
  jac.col(2) = x[3] - x[0];
  return jac.determinant();
}

}  // namespace

Mesh::Mesh(int n, SubcubeSplit split) : n_(n), split_(split) {
  if (n < 1) {
    throw InvalidArgument("build_cube_mesh: n must be >= 1, got " + std::to_string(n));
  }
  const Index np = n + 1;
  auto vid = [np](Index i, Index j, Index k) { return (i * np + j) * np + k; };

  vertices_.reserve(static_cast<std::size_t>(np * np * np));
  for (Index i = 0; i <= n; ++i) {
    for (Index j = 0; j <= n; ++j) {
      for (Index k = 0; k <= n; ++k) {
        vertices_.emplace_back(double(i) / n, double(j) / n, double(k) / n);
      }
    }
  }

  // Six tetrahedra per subcube, one per monotone lattice path between two
  // opposite corners of the subcube. Mirrored subcubes walk down the
  // reflected axes.
  static constexpr std::array<std::array<int, 3>, 6> kPaths{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  cells_.reserve(static_cast<std::size_t>(6 * n * n * n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        for (const auto& path : kPaths) {
          std::array<Index, 3> p{i, j, k};
          std::array<Index, 3> step{1, 1, 1};
          if (split == SubcubeSplit::Reflected) {
            for (int d = 0; d < 3; ++d) {
              if (p[d] % 2 == 1) {
                step[d] = -1;
                ++p[d];
              }
            }
          }
          std::array<Index, 4> tet{};
          tet[0] = vid(p[0], p[1], p[2]);
          for (int s = 0; s < 3; ++s) {
            p[path[s]] += step[path[s]];
            tet[s + 1] = vid(p[0], p[1], p[2]);
          }
          std::array<Vec3, 4> x{vertices_[tet[0]], vertices_[tet[1]], vertices_[tet[2]],
                                vertices_[tet[3]]};
          if (signed_det(x) < 0.0) std::swap(tet[2], tet[3]);
          cells_.push_back(tet);
        }
      }
    }
  }
  std::sort(cells_.begin(), cells_.end(), [](const auto& a, const auto& b) {
    auto sa = a;
    auto sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa < sb;
  });

  subcube_cells_.assign(static_cast<std::size_t>(n * n * n), {});
  {
    std::vector<int> filled(subcube_cells_.size(), 0);
    for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
      const Vec3 centroid = 0.25 * (vertices_[cells_[ci][0]] + vertices_[cells_[ci][1]] +
                                    vertices_[cells_[ci][2]] + vertices_[cells_[ci][3]]);
      const Index i = static_cast<Index>(std::floor(centroid.x() * n));
      const Index j = static_cast<Index>(std::floor(centroid.y() * n));
      const Index k = static_cast<Index>(std::floor(centroid.z() * n));
      const Index s = (i * n + j) * n + k;
      subcube_cells_[s][filled[s]++] = static_cast<Index>(ci);
    }
  }

  for (const auto& c : cells_) {
    for (const auto& le : kLocalEdges) {
      edges_.push_back({std::min(c[le[0]], c[le[1]]), std::max(c[le[0]], c[le[1]])});
    }
    for (const auto& lf : kLocalFaces) {
      std::array<Index, 3> f{c[lf[0]], c[lf[1]], c[lf[2]]};
      std::sort(f.begin(), f.end());
      faces_.push_back(f);
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  std::sort(faces_.begin(), faces_.end());
  faces_.erase(std::unique(faces_.begin(), faces_.end()), faces_.end());

  cell_edges_.resize(cells_.size());
  cell_faces_.resize(cells_.size());
  face_cells_.assign(faces_.size(), {-1, -1});
  for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
    const auto& c = cells_[ci];
    for (int le = 0; le < 6; ++le) {
      const Index a = c[kLocalEdges[le][0]];
      const Index b = c[kLocalEdges[le][1]];
      auto& inc = cell_edges_[ci][le];
      inc.edge = find_sorted(edges_, {std::min(a, b), std::max(a, b)});
      inc.sign = a < b ? 1 : -1;
    }
    for (int lf = 0; lf < 4; ++lf) {
      std::array<Index, 3> g{c[kLocalFaces[lf][0]], c[kLocalFaces[lf][1]],
                             c[kLocalFaces[lf][2]]};
      std::array<Index, 3> sorted = g;
      std::sort(sorted.begin(), sorted.end());
      auto& inc = cell_faces_[ci][lf];
      inc.face = find_sorted(faces_, sorted);
      for (int p = 0; p < 3; ++p) {
        inc.slot[p] = static_cast<int>(std::find(sorted.begin(), sorted.end(), g[p]) -
                                       sorted.begin());
      }
      int inversions = 0;
      for (int p = 0; p < 3; ++p) {
        for (int q = p + 1; q < 3; ++q) inversions += inc.slot[p] > inc.slot[q] ? 1 : 0;
      }
      inc.sign = inversions % 2 == 0 ? 1 : -1;
      auto& fc = face_cells_[inc.face];
      if (fc[0] < 0) {
        fc[0] = static_cast<Index>(ci);
      } else if (fc[1] < 0) {
        fc[1] = static_cast<Index>(ci);
      } else {
        throw NumericalError("mesh: face shared by more than two cells");
      }
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  boundary_edge_.assign(edges_.size(), 0);
  boundary_face_.assign(faces_.size(), 0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (face_cells_[f][1] >= 0) continue;
    boundary_face_[f] = 1;
    const auto& fv = faces_[f];
    for (int p = 0; p < 3; ++p) {
      boundary_vertex_[fv[p]] = 1;
      const std::array<Index, 2> e{fv[p], fv[(p + 1) % 3]};
      boundary_edge_[find_sorted(edges_, {std::min(e[0], e[1]), std::max(e[0], e[1])})] = 1;
    }
  }
}

Index Mesh::count_boundary_vertices() const {
  return std::count(boundary_vertex_.begin(), boundary_vertex_.end(), 1);
}
Index Mesh::count_boundary_edges() const {
  return std::count(boundary_edge_.begin(), boundary_edge_.end(), 1);
}
Index Mesh::count_boundary_faces() const {
  return std::count(boundary_face_.begin(), boundary_face_.end(), 1);
}

Vec3 Mesh::face_normal(Index f) const {
  const auto& v = faces_[f];
  return (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).normalized();
}

double Mesh::face_area(Index f) const {
  const auto& v = faces_[f];
  return 0.5 * (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).norm();
}

double Mesh::cell_volume(Index c) const { return std::abs(cell_geometry(*this, c).det) / 6.0; }

Vec3 Mesh::cell_centroid(Index c) const {
  const auto& v = cells_[c];
  return 0.25 * (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]] + vertices_[v[3]]);
}

std::pair<Index, Vec3> Mesh::locate(const Vec3& x) const {
  auto sub = [this](double t) {
    const auto i = static_cast<Index>(std::floor(t * n_));
    return std::clamp<Index>(i, 0, n_ - 1);
  };
  const Index s = (sub(x.x()) * n_ + sub(x.y())) * n_ + sub(x.z());
  Index best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Vec3 best_ref = Vec3::Zero();
  for (Index c : subcube_cells_[s]) {
    const CellGeometry g = cell_geometry(*this, c);
    const Vec3 ref = g.jacobian.inverse() * (x - g.origin);
    const double lam = std::min({1.0 - ref.sum(), ref.x(), ref.y(), ref.z()});
    if (lam > best_min) {
      best_min = lam;
      best = c;
      best_ref = ref;
    }
  }
  if (best_min < -1e-10) {
    throw InvalidArgument("Mesh::locate: point outside the unit cube");
  }
  return {best, best_ref};
}

Mesh build_cube_mesh(int n, SubcubeSplit split) { return Mesh(n, split); }

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const auto& ev = mesh.edge(e);
    h = std::max(h, (mesh.vertex(ev[1]) - mesh.vertex(ev[0])).norm());
  }
  return h;
}

CellGeometry cell_geometry(const std::array<Vec3, 4>& x) {
  CellGeometry g;
  g.origin = x[0];
  g.jacobian.col(0) = x[1] - x[0];
  g.jacobian.col(1) = x[2] - x[0];
  g.jacobian.col(2) = x[3] - x[0];
  g.det = g.jacobian.determinant();
  if (!(g.det > 0.0)) {
    throw NumericalError("cell_geometry: degenerate or inverted cell (det = " +
                         std::to_string(g.det) + ")");
  }
  g.inverse_transpose = g.jacobian.inverse().transpose();
  return g;
}

CellGeometry cell_geometry(const Mesh& mesh, Index cell) {
  if (cell < 0 || cell >= mesh.num_cells()) {
    throw InvalidArgument("cell_geometry: cell index out of range");
  }
  const auto& c = mesh.cell(cell);
  return cell_geometry({mesh.vertex(c[0]), mesh.vertex(c[1]), mesh.vertex(c[2]), mesh.vertex(c[3])});
}

nlohmann::json mesh_summary(const Mesh& mesh) {
  nlohmann::json j;
  j["n"] = mesh.n();
  j["h"] = mesh_size(mesh);
  j["split"] = mesh.split() == SubcubeSplit::Reflected ? "reflected" : "uniform";
  j["counts"] = {{"vertices", mesh.num_vertices()},
                 {"edges", mesh.num_edges()},
                 {"faces", mesh.num_faces()},
                 {"cells", mesh.num_cells()}};
  j["boundary_counts"] = {{"vertices", mesh.count_boundary_vertices()},
                          {"edges", mesh.count_boundary_edges()},
                          {"faces", mesh.count_boundary_faces()}};
  return j;
}

}  // namespace mhdk
