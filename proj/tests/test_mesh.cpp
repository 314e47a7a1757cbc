#include <doctest.h>

#include "mhdk/mesh.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

using namespace mhdk;

namespace {

Index expected_edges(Index n) { return 3 * n * (n + 1) * (n + 1) + 3 * n * n * (n + 1) + n * n * n; }
Index expected_faces(Index n) { return 12 * n * n * n + 6 * n * n; }

const SubcubeSplit kSplits[] = {SubcubeSplit::Reflected, SubcubeSplit::Uniform};

}  // namespace

TEST_CASE("entity counts follow the closed forms") {
  for (SubcubeSplit split : kSplits) {
    for (int n : {1, 2, 3, 4, 8, 16}) {
      CAPTURE(n);
      const Mesh m = build_cube_mesh(n, split);
      const Index N = n;
      CHECK(m.num_vertices() == (N + 1) * (N + 1) * (N + 1));
      CHECK(m.num_cells() == 6 * N * N * N);
      CHECK(m.num_edges() == expected_edges(N));
      CHECK(m.num_faces() == expected_faces(N));
      CHECK(m.num_vertices() - m.num_edges() + m.num_faces() - m.num_cells() == 1);
      CHECK(m.count_boundary_faces() == 12 * N * N);
    }
  }
}

TEST_CASE("small meshes") {
  const Mesh m1 = build_cube_mesh(1);
  CHECK(m1.num_vertices() == 8);
  CHECK(m1.num_edges() == 19);
  CHECK(m1.num_faces() == 18);
  CHECK(m1.num_cells() == 6);
  const Mesh m2 = build_cube_mesh(2);
  CHECK(m2.num_vertices() == 27);
  CHECK(m2.num_edges() == 98);
  CHECK(m2.num_faces() == 120);
  CHECK(m2.num_cells() == 48);
  const Mesh m4 = build_cube_mesh(4);
  CHECK(m4.num_edges() == 604);
  CHECK(m4.num_faces() == 864);
  CHECK(m4.num_cells() == 384);
}

TEST_CASE("n below one is rejected") {
  CHECK_THROWS_AS(build_cube_mesh(0), InvalidArgument);
  CHECK_THROWS_AS(build_cube_mesh(-3), InvalidArgument);
}

TEST_CASE("cells have positive volume summing to one") {
  for (SubcubeSplit split : kSplits) {
    for (int n : {1, 2, 3, 5}) {
      const Mesh m = build_cube_mesh(n, split);
      double total = 0.0;
      for (Index c = 0; c < m.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(m, c);
        REQUIRE(g.det > 0.0);
        CHECK(g.det / 6.0 == doctest::Approx(1.0 / (6.0 * n * n * n)).epsilon(1e-12));
        total += m.cell_volume(c);
      }
      CHECK(std::abs(total - 1.0) < 1e-13);
    }
  }
  const Mesh m = build_cube_mesh(2);
  CHECK(m.cell_volume(17) == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
}

TEST_CASE("mesh size is the longest edge") {
  CHECK(mesh_size(build_cube_mesh(2)) == doctest::Approx(0.8660).epsilon(1e-4));
  CHECK(mesh_size(build_cube_mesh(4)) == doctest::Approx(0.4330).epsilon(1e-4));
  CHECK(mesh_size(build_cube_mesh(16)) == doctest::Approx(0.1083).epsilon(1e-3));
  CHECK(mesh_size(build_cube_mesh(3, SubcubeSplit::Uniform)) == doctest::Approx(std::sqrt(3.0) / 3).epsilon(1e-14));
}

TEST_CASE("reference cell geometry is the identity") {
  const std::array<Vec3, 4> x{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const CellGeometry g = cell_geometry(x);
  CHECK((g.jacobian - Mat3::Identity()).norm() < 1e-15);
  CHECK(g.det == doctest::Approx(1.0));
  CHECK((g.inverse_transpose - Mat3::Identity()).norm() < 1e-15);
  const std::array<Vec3, 4> flat{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  CHECK_THROWS_AS(cell_geometry(flat), NumericalError);
  const std::array<Vec3, 4> inverted{Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)};
  CHECK_THROWS_AS(cell_geometry(inverted), NumericalError);
}

TEST_CASE("entities are stored in ascending vertex order and deduplicated") {
  for (SubcubeSplit split : kSplits) {
    const Mesh m = build_cube_mesh(3, split);
    std::vector<std::array<Index, 2>> edges;
    for (Index e = 0; e < m.num_edges(); ++e) {
      CHECK(m.edge(e)[0] < m.edge(e)[1]);
      edges.push_back(m.edge(e));
    }
    CHECK(std::is_sorted(edges.begin(), edges.end()));
    CHECK(std::adjacent_find(edges.begin(), edges.end()) == edges.end());
    std::vector<std::array<Index, 3>> faces;
    for (Index f = 0; f < m.num_faces(); ++f) {
      CHECK(m.face(f)[0] < m.face(f)[1]);
      CHECK(m.face(f)[1] < m.face(f)[2]);
      faces.push_back(m.face(f));
    }
    CHECK(std::is_sorted(faces.begin(), faces.end()));
    CHECK(std::adjacent_find(faces.begin(), faces.end()) == faces.end());
  }
}

TEST_CASE("cell incidences match the stored entities") {
  for (SubcubeSplit split : kSplits) {
    const Mesh m = build_cube_mesh(2, split);
    for (Index c = 0; c < m.num_cells(); ++c) {
      const auto& cv = m.cell(c);
      for (int le = 0; le < 6; ++le) {
        const EdgeIncidence& inc = m.cell_edges(c)[le];
        const Index a = cv[kLocalEdges[le][0]];
        const Index b = cv[kLocalEdges[le][1]];
        CHECK(m.edge(inc.edge) == std::array<Index, 2>{std::min(a, b), std::max(a, b)});
        CHECK(inc.sign == (a < b ? 1 : -1));
      }
      for (int lf = 0; lf < 4; ++lf) {
        const FaceIncidence& inc = m.cell_faces(c)[lf];
        const auto& gf = m.face(inc.face);
        for (int p = 0; p < 3; ++p) CHECK(gf[inc.slot[p]] == cv[kLocalFaces[lf][p]]);
        // parity of the slot permutation
        int inversions = 0;
        for (int p = 0; p < 3; ++p) {
          for (int q = p + 1; q < 3; ++q) inversions += inc.slot[p] > inc.slot[q] ? 1 : 0;
        }
        CHECK(inc.sign == (inversions % 2 == 0 ? 1 : -1));
      }
    }
  }
}

TEST_CASE("interior faces have two cells on opposite sides") {
  for (SubcubeSplit split : kSplits) {
    const Mesh m = build_cube_mesh(3, split);
    std::map<Index, int> seen;
    for (Index c = 0; c < m.num_cells(); ++c) {
      for (const auto& inc : m.cell_faces(c)) ++seen[inc.face];
    }
    for (Index f = 0; f < m.num_faces(); ++f) {
      const auto& fc = m.face_cells(f);
      CHECK(seen[f] == (m.boundary_face(f) ? 1 : 2));
      CHECK((fc[1] < 0) == m.boundary_face(f));
      const Vec3 n = m.face_normal(f);
      const Vec3 p = m.vertex(m.face(f)[0]);
      const double s0 = n.dot(m.cell_centroid(fc[0]) - p);
      if (fc[1] >= 0) {
        const double s1 = n.dot(m.cell_centroid(fc[1]) - p);
        CHECK(s0 * s1 < 0.0);
      } else {
        // boundary faces lie in a cube side
        const Vec3 a = m.vertex(m.face(f)[0]);
        const Vec3 b = m.vertex(m.face(f)[1]);
        const Vec3 c = m.vertex(m.face(f)[2]);
        bool planar_side = false;
        for (int d = 0; d < 3; ++d) {
          for (double side : {0.0, 1.0}) {
            planar_side = planar_side || (a[d] == side && b[d] == side && c[d] == side);
          }
        }
        CHECK(planar_side);
      }
    }
  }
}

TEST_CASE("boundary flags") {
  const Mesh m = build_cube_mesh(2);
  CHECK(m.count_boundary_vertices() == 26);
  CHECK(m.count_boundary_faces() == 48);
  for (Index v = 0; v < m.num_vertices(); ++v) {
    const Vec3& x = m.vertex(v);
    const bool on = x.minCoeff() == 0.0 || x.maxCoeff() == 1.0;
    CHECK(m.boundary_vertex(v) == on);
  }
  for (Index e = 0; e < m.num_edges(); ++e) {
    if (!m.boundary_edge(e)) continue;
    CHECK(m.boundary_vertex(m.edge(e)[0]));
    CHECK(m.boundary_vertex(m.edge(e)[1]));
  }
}

TEST_CASE("reflected neighbours are mirror images") {
  const Mesh m = build_cube_mesh(2, SubcubeSplit::Reflected);
  // The subcube diagonals alternate, so the cube centre is a vertex shared by
  // all eight subcubes and every subcube diagonal passes through it.
  const Vec3 centre(0.5, 0.5, 0.5);
  Index centre_id = -1;
  for (Index v = 0; v < m.num_vertices(); ++v) {
    if ((m.vertex(v) - centre).norm() < 1e-15) centre_id = v;
  }
  REQUIRE(centre_id >= 0);
  int cells_at_centre = 0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& cv = m.cell(c);
    cells_at_centre += std::count(cv.begin(), cv.end(), centre_id) > 0 ? 1 : 0;
  }
  CHECK(cells_at_centre == 48);
  const Mesh u = build_cube_mesh(2, SubcubeSplit::Uniform);
  int uniform_at_centre = 0;
  for (Index c = 0; c < u.num_cells(); ++c) {
    const auto& cv = u.cell(c);
    uniform_at_centre += std::count(cv.begin(), cv.end(), centre_id) > 0 ? 1 : 0;
  }
  CHECK(uniform_at_centre < 48);
}

TEST_CASE("locate returns a containing cell") {
  std::mt19937 rng(7);
  for (SubcubeSplit split : kSplits) {
    const Mesh m = build_cube_mesh(3, split);
    for (int k = 0; k < 200; ++k) {
      const Vec3 x = test::random_point(rng);
      const auto [c, ref] = m.locate(x);
      CHECK(ref.minCoeff() > -1e-12);
      CHECK(ref.sum() < 1.0 + 1e-12);
      CHECK((cell_geometry(m, c).map(ref) - x).norm() < 1e-13);
    }
    CHECK_NOTHROW(m.locate(Vec3(1.0, 1.0, 1.0)));
    CHECK_NOTHROW(m.locate(Vec3(0.0, 0.0, 0.0)));
    CHECK_THROWS_AS(m.locate(Vec3(1.5, 0.2, 0.2)), InvalidArgument);
  }
}

TEST_CASE("summary json") {
  const nlohmann::json j = mesh_summary(build_cube_mesh(2));
  CHECK(j["n"] == 2);
  CHECK(j["counts"]["vertices"] == 27);
  CHECK(j["counts"]["edges"] == 98);
  CHECK(j["counts"]["faces"] == 120);
  CHECK(j["counts"]["cells"] == 48);
  CHECK(j["boundary_counts"]["faces"] == 48);
  CHECK(j["h"].get<double>() == doctest::Approx(std::sqrt(3.0) / 2));
}
