#include "mhdk/assembly.hpp"

#include <fstream>
#include <iomanip>
#include <map>

namespace mhdk {

namespace {

struct ReferenceTables {
  const QuadratureRule* rule = nullptr;
  std::vector<std::array<Vec3, 12>> hdiv;
  std::array<double, 12> hdiv_div{};
  std::vector<std::array<Vec3, 12>> hcurl;
  std::array<Vec3, 12> hcurl_curl{};
  std::vector<std::array<double, 10>> p2;
  std::vector<std::array<Vec3, 10>> p2_grad;
};

const ReferenceTables& reference_tables() {
  static const ReferenceTables tables = [] {
    ReferenceTables t;
    t.rule = &default_tet_rule();
    const auto& hd = reference_hdiv_basis();
    const auto& hc = reference_hcurl_basis();
    const auto& p2 = reference_p2_basis();
    for (int i = 0; i < 12; ++i) {
      t.hdiv_div[i] = hd[i].divergence();
      t.hcurl_curl[i] = hc[i].curl();
    }
    for (const Vec3& x : t.rule->points) {
      std::array<Vec3, 12> a;
      std::array<Vec3, 12> b;
      for (int i = 0; i < 12; ++i) {
        a[i] = hd[i](x);
        b[i] = hc[i](x);
      }
      t.hdiv.push_back(a);
      t.hcurl.push_back(b);
      std::array<double, 10> s;
      std::array<Vec3, 10> gs;
      for (int i = 0; i < 10; ++i) {
        s[i] = p2[i](x);
        gs[i] = p2[i].gradient(x);
      }
      t.p2.push_back(s);
      t.p2_grad.push_back(gs);
    }
    return t;
  }();
  return tables;
}

// Piola-mapped, sign-corrected basis data of one cell at the quadrature points.
struct CellValues {
  CellGeometry geo;
  double volume = 0.0;
  std::vector<Vec3> points;
  std::vector<double> weights;  // quadrature weight * det J
  std::vector<std::array<Vec3, 12>> j_val;
  std::array<double, 12> j_div{};
  std::vector<std::array<Vec3, 12>> a_val;
  std::array<Vec3, 12> a_curl{};
  std::vector<std::array<Vec3, 10>> s_grad;

  CellValues(const MixedSpaces& spaces, Index cell) {
    const ReferenceTables& t = reference_tables();
    const Mesh& mesh = spaces.D.mesh();
    geo = cell_geometry(mesh, cell);
    volume = geo.det / 6.0;
    const std::size_t nq = t.rule->size();
    points.resize(nq);
    weights.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      points[q] = geo.map(t.rule->points[q]);
      weights[q] = t.rule->weights[q] * geo.det;
    }
    const auto jd = spaces.D.cell_dofs(cell);
    const auto ad = spaces.C.cell_dofs(cell);
    j_val.resize(nq);
    a_val.resize(nq);
    s_grad.resize(nq);
    const Mat3 jac_over_det = geo.jacobian / geo.det;
    for (int i = 0; i < 12; ++i) {
      j_div[i] = jd[i].sign * t.hdiv_div[i] / geo.det;
      a_curl[i] = ad[i].sign * jac_over_det * t.hcurl_curl[i];
    }
    for (std::size_t q = 0; q < nq; ++q) {
      for (int i = 0; i < 12; ++i) {
        j_val[q][i] = jd[i].sign * jac_over_det * t.hdiv[q][i];
        a_val[q][i] = ad[i].sign * geo.inverse_transpose * t.hcurl[q][i];
      }
      for (int i = 0; i < 10; ++i) s_grad[q][i] = geo.inverse_transpose * t.p2_grad[q][i];
    }
  }
};

using LocalMatrix = Eigen::MatrixXd;

struct BlockBuilder {
  Index rows;
  Index cols;
  std::vector<Triplet> triplets;

  void scatter(std::span<const LocalDof> row_dofs, std::span<const LocalDof> col_dofs,
               const LocalMatrix& local) {
    for (std::size_t i = 0; i < row_dofs.size(); ++i) {
      for (std::size_t j = 0; j < col_dofs.size(); ++j) {
        triplets.push_back({row_dofs[i].global, col_dofs[j].global, local(i, j)});
      }
    }
  }

  CsrMatrix finish() { return CsrMatrix::from_triplets(rows, cols, std::move(triplets)); }
};

std::map<BlockId, CsrMatrix> assemble_blocks(const std::vector<BlockId>& ids,
                                             const MixedSpaces& spaces, double sigma, double rm,
                                             const VectorField* w) {
  if (!(sigma > 0.0) || !(rm > 0.0)) throw InvalidArgument("assemble: sigma and Rm must be positive");
  const Mesh& mesh = spaces.D.mesh();
  if (&spaces.S.mesh() != &mesh || &spaces.C.mesh() != &mesh || &spaces.R.mesh() != &mesh) {
    throw InvalidArgument("assemble: spaces are built on different meshes");
  }
  const double eta = 1.0 / sigma;
  const double nu = 1.0 / rm;
  const Index nD = spaces.D.total_dofs();
  const Index nS = spaces.S.total_dofs();
  const Index nC = spaces.C.total_dofs();
  const Index nR = spaces.R.total_dofs();

  std::map<BlockId, BlockBuilder> builders;
  for (BlockId id : ids) {
    switch (id) {
      case BlockId::M:
      case BlockId::Mhat: builders[id] = {nD, nD, {}}; break;
      case BlockId::G: builders[id] = {nS, nD, {}}; break;
      case BlockId::K:
        if (w == nullptr || !*w) throw InvalidArgument("assemble_block: K requires a velocity field");
        builders[id] = {nD, nC, {}};
        break;
      case BlockId::X: builders[id] = {nC, nD, {}}; break;
      case BlockId::F:
      case BlockId::Fhat: builders[id] = {nC, nC, {}}; break;
      case BlockId::B: builders[id] = {nR, nC, {}}; break;
      case BlockId::Qhat: builders[id] = {nS, nS, {}}; break;
      case BlockId::L: builders[id] = {nR, nR, {}}; break;
    }
  }
  for (auto& [id, b] : builders) b.triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * 144);

  const std::size_t nq = reference_tables().rule->size();
  LocalMatrix local;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv(spaces, c);
    const auto jd = spaces.D.cell_dofs(c);
    const auto sd = spaces.S.cell_dofs(c);
    const auto ad = spaces.C.cell_dofs(c);
    const auto rd = spaces.R.cell_dofs(c);
    for (auto& [id, builder] : builders) {
      switch (id) {
        case BlockId::M:
        case BlockId::Mhat: {
          local = LocalMatrix::Zero(12, 12);
          for (std::size_t q = 0; q < nq; ++q) {
            for (int i = 0; i < 12; ++i) {
              for (int j = 0; j < 12; ++j) {
                local(i, j) += cv.weights[q] * cv.j_val[q][i].dot(cv.j_val[q][j]);
              }
            }
          }
          if (id == BlockId::Mhat) {
            for (int i = 0; i < 12; ++i) {
              for (int j = 0; j < 12; ++j) local(i, j) += cv.volume * cv.j_div[i] * cv.j_div[j];
            }
          }
          local *= eta;
          builder.scatter(jd, jd, local);
          break;
        }
        case BlockId::G: {
          local = LocalMatrix::Zero(1, 12);
          for (int j = 0; j < 12; ++j) local(0, j) = -cv.volume * cv.j_div[j];
          builder.scatter(sd, jd, local);
          break;
        }
        case BlockId::K: {
          local = LocalMatrix::Zero(12, 12);
          for (std::size_t q = 0; q < nq; ++q) {
            const Vec3 wq = (*w)(cv.points[q]);
            for (int j = 0; j < 12; ++j) {
              const Vec3 cw = cv.a_curl[j].cross(wq);
              for (int i = 0; i < 12; ++i) local(i, j) += cv.weights[q] * cw.dot(cv.j_val[q][i]);
            }
          }
          builder.scatter(jd, ad, local);
          break;
        }
        case BlockId::X: {
          local = LocalMatrix::Zero(12, 12);
          for (std::size_t q = 0; q < nq; ++q) {
            for (int i = 0; i < 12; ++i) {
              for (int j = 0; j < 12; ++j) {
                local(i, j) -= cv.weights[q] * cv.j_val[q][j].dot(cv.a_val[q][i]);
              }
            }
          }
          builder.scatter(ad, jd, local);
          break;
        }
        case BlockId::F:
        case BlockId::Fhat: {
          local = LocalMatrix::Zero(12, 12);
          for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 12; ++j) local(i, j) = nu * cv.volume * cv.a_curl[i].dot(cv.a_curl[j]);
          }
          if (id == BlockId::Fhat) {
            for (std::size_t q = 0; q < nq; ++q) {
              for (int i = 0; i < 12; ++i) {
                for (int j = 0; j < 12; ++j) {
                  local(i, j) += cv.weights[q] * cv.a_val[q][i].dot(cv.a_val[q][j]);
                }
              }
            }
          }
          builder.scatter(ad, ad, local);
          break;
        }
        case BlockId::B: {
          local = LocalMatrix::Zero(10, 12);
          for (std::size_t q = 0; q < nq; ++q) {
            for (int i = 0; i < 10; ++i) {
              for (int j = 0; j < 12; ++j) {
                local(i, j) += cv.weights[q] * cv.a_val[q][j].dot(cv.s_grad[q][i]);
              }
            }
          }
          builder.scatter(rd, ad, local);
          break;
        }
        case BlockId::Qhat: {
          local = LocalMatrix::Constant(1, 1, sigma * cv.volume);
          builder.scatter(sd, sd, local);
          break;
        }
        case BlockId::L: {
          local = LocalMatrix::Zero(10, 10);
          for (std::size_t q = 0; q < nq; ++q) {
            for (int i = 0; i < 10; ++i) {
              for (int j = 0; j < 10; ++j) {
                local(i, j) += cv.weights[q] * cv.s_grad[q][i].dot(cv.s_grad[q][j]);
              }
            }
          }
          builder.scatter(rd, rd, local);
          break;
        }
      }
    }
  }

  std::map<BlockId, CsrMatrix> out;
  for (auto& [id, builder] : builders) out.emplace(id, builder.finish());
  return out;
}

}  // namespace

MixedSpaces build_mixed_spaces(const Mesh& mesh, const ProblemSpec& problem) {
  MixedSpaces s{build_space(mesh, SpaceFamily::HdivLinear), build_space(mesh, SpaceFamily::L2Constant),
                build_space(mesh, SpaceFamily::HcurlNedelec2Deg1), build_space(mesh, SpaceFamily::H1P2)};
  const VectorField zero_vec = [](const Vec3&) { return Vec3::Zero().eval(); };
  s.C = constrained_dofs(s.C, problem.A_w ? problem.A_w : zero_vec);
  s.R = constrained_dofs(s.R, ScalarField([](const Vec3&) { return 0.0; }));
  return s;
}

MixedSpaces build_mixed_spaces(const Mesh& mesh) {
  ProblemSpec p;
  return build_mixed_spaces(mesh, p);
}

BlockPartition make_partition(const MixedSpaces& spaces) {
  BlockPartition p;
  p.offsets[1] = spaces.D.total_dofs();
  p.offsets[2] = p.offsets[1] + spaces.S.total_dofs();
  p.offsets[3] = p.offsets[2] + spaces.C.total_dofs();
  p.offsets[4] = p.offsets[3] + spaces.R.total_dofs();
  return p;
}

std::string_view to_string(BlockId id) {
  switch (id) {
    case BlockId::M: return "M";
    case BlockId::G: return "G";
    case BlockId::K: return "K";
    case BlockId::X: return "X";
    case BlockId::F: return "F";
    case BlockId::B: return "B";
    case BlockId::Mhat: return "Mhat";
    case BlockId::Qhat: return "Qhat";
    case BlockId::Fhat: return "Fhat";
    case BlockId::L: return "L";
  }
  return "?";
}

CsrMatrix assemble_block(BlockId id, const MixedSpaces& spaces, double sigma, double rm,
                         const VectorField* w) {
  auto blocks = assemble_blocks({id}, spaces, sigma, rm, w);
  return std::move(blocks.at(id));
}

Vector assemble_rhs(const ProblemSpec& problem, const MixedSpaces& spaces) {
  const Mesh& mesh = spaces.D.mesh();
  const BlockPartition part = make_partition(spaces);
  Vector rhs = Vector::Zero(part.total());
  const std::size_t nq = reference_tables().rule->size();

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv(spaces, c);
    const auto jd = spaces.D.cell_dofs(c);
    const auto ad = spaces.C.cell_dofs(c);
    for (std::size_t q = 0; q < nq; ++q) {
      const Vec3 fq = problem.f ? problem.f(cv.points[q]) : Vec3::Zero();
      const Vec3 gq = problem.g ? problem.g(cv.points[q]) : Vec3::Zero();
      for (int i = 0; i < 12; ++i) {
        rhs[part.offsets[kJ] + jd[i].global] += cv.weights[q] * fq.dot(cv.j_val[q][i]);
        rhs[part.offsets[kA] + ad[i].global] += cv.weights[q] * gq.dot(cv.a_val[q][i]);
      }
    }
  }

  // Natural boundary datum for phi in the H(div) equation.
  if (problem.phi_w) {
    const QuadratureRule& tri = default_triangle_rule();
    const auto& basis = reference_hdiv_basis();
    static const std::array<Vec3, 4> ref{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    for (Index f = 0; f < mesh.num_faces(); ++f) {
      if (!mesh.boundary_face(f)) continue;
      const Index c = mesh.face_cells(f)[0];
      const auto& faces = mesh.cell_faces(c);
      int lf = 0;
      while (faces[lf].face != f) ++lf;
      const CellGeometry g = cell_geometry(mesh, c);
      const auto& lv = kLocalFaces[lf];
      const Vec3 e1 = ref[lv[1]] - ref[lv[0]];
      const Vec3 e2 = ref[lv[2]] - ref[lv[0]];
      Vec3 area_normal = (g.jacobian * e1).cross(g.jacobian * e2);
      const Vec3 centroid = mesh.cell_centroid(c);
      const Vec3 face_point = g.map(ref[lv[0]]);
      if (area_normal.dot(face_point - centroid) < 0.0) area_normal = -area_normal;
      const auto jd = spaces.D.cell_dofs(c);
      for (std::size_t q = 0; q < tri.size(); ++q) {
        const Vec3 xr = ref[lv[0]] + tri.points[q].x() * e1 + tri.points[q].y() * e2;
        const Vec3 x = g.map(xr);
        const double phi = problem.phi_w(x);
        if (phi == 0.0) continue;
        for (int i = 0; i < 12; ++i) {
          const Vec3 v = jd[i].sign * g.jacobian * basis[i](xr) / g.det;
          rhs[part.offsets[kJ] + jd[i].global] -= tri.weights[q] * phi * v.dot(area_normal);
        }
      }
    }
  }
  return rhs;
}

BlockSystem assemble_system(const ProblemSpec& problem, const MixedSpaces& spaces) {
  BlockSystem sys;
  sys.sigma = problem.sigma;
  sys.rm = problem.rm;
  sys.partition = make_partition(spaces);
  const VectorField zero_w = [](const Vec3&) { return Vec3::Zero().eval(); };
  const VectorField& w = problem.w ? problem.w : zero_w;
  auto blocks = assemble_blocks({BlockId::M, BlockId::G, BlockId::K, BlockId::X, BlockId::F, BlockId::B,
                                 BlockId::Mhat, BlockId::Qhat, BlockId::Fhat, BlockId::L},
                                spaces, problem.sigma, problem.rm, &w);
  sys.M = std::move(blocks.at(BlockId::M));
  sys.G = std::move(blocks.at(BlockId::G));
  sys.K = std::move(blocks.at(BlockId::K));
  sys.X = std::move(blocks.at(BlockId::X));
  sys.F = std::move(blocks.at(BlockId::F));
  sys.B = std::move(blocks.at(BlockId::B));
  sys.Mhat = std::move(blocks.at(BlockId::Mhat));
  sys.Qhat = std::move(blocks.at(BlockId::Qhat));
  sys.Fhat = std::move(blocks.at(BlockId::Fhat));
  sys.L = std::move(blocks.at(BlockId::L));
  sys.r_diag = Vector::Zero(spaces.R.total_dofs());
  sys.rhs = assemble_rhs(problem, spaces);
  return sys;
}

void apply_constraints(BlockSystem& sys, const MixedSpaces& spaces) {
  if (sys.constrained) return;
  const BlockPartition& part = sys.partition;
  const Index nC = spaces.C.total_dofs();
  const Index nR = spaces.R.total_dofs();
  std::vector<char> a_mask(static_cast<std::size_t>(nC), 0);
  std::vector<char> r_mask(static_cast<std::size_t>(nR), 0);
  Vector a_vals = Vector::Zero(nC);
  Vector r_vals = Vector::Zero(nR);
  for (Index i = 0; i < nC; ++i) {
    if (spaces.C.is_constrained(i)) {
      a_mask[i] = 1;
      a_vals[i] = spaces.C.constrained_value(i);
    }
  }
  for (Index i = 0; i < nR; ++i) {
    if (spaces.R.is_constrained(i)) {
      r_mask[i] = 1;
      r_vals[i] = spaces.R.constrained_value(i);
    }
  }

  // Move prescribed columns to the right-hand side.
  Vector bJ = part.segment(sys.rhs, kJ);
  Vector bA = part.segment(sys.rhs, kA);
  Vector br = part.segment(sys.rhs, kR);
  spmv_add(sys.K, a_vals, -1.0, bJ);
  spmv_add(sys.F, a_vals, -1.0, bA);
  spmv_add(sys.B, a_vals, -1.0, br);
  spmv_transpose_add(sys.B, r_vals, -1.0, bA);

  sys.K.zero_columns(a_mask);
  sys.B.zero_columns(a_mask);
  sys.F.zero_columns(a_mask);
  sys.Fhat.zero_columns(a_mask);
  sys.L.zero_columns(r_mask);
  for (Index i = 0; i < nC; ++i) {
    if (!a_mask[i]) continue;
    sys.X.zero_row(i);
    sys.F.zero_row(i);
    sys.F.set_diagonal(i, 1.0);
    sys.Fhat.zero_row(i);
    sys.Fhat.set_diagonal(i, 1.0);
    bA[i] = a_vals[i];
  }
  for (Index i = 0; i < nR; ++i) {
    if (!r_mask[i]) continue;
    sys.B.zero_row(i);
    sys.L.zero_row(i);
    sys.L.set_diagonal(i, 1.0);
    sys.r_diag[i] = -1.0;
    br[i] = -r_vals[i];
  }
  part.segment(sys.rhs, kJ) = bJ;
  part.segment(sys.rhs, kA) = bA;
  part.segment(sys.rhs, kR) = br;
  sys.constrained = true;
}

void apply_operator(const BlockSystem& sys, const Vector& x, Vector& y) {
  const BlockPartition& p = sys.partition;
  if (x.size() != p.total()) throw InvalidArgument("apply_operator: dimension mismatch");
  y = Vector::Zero(p.total());
  const Vector xJ = p.segment(x, kJ);
  const Vector xPhi = p.segment(x, kPhi);
  const Vector xA = p.segment(x, kA);
  const Vector xR = p.segment(x, kR);
  Vector yJ = Vector::Zero(p.size(kJ));
  Vector yPhi = Vector::Zero(p.size(kPhi));
  Vector yA = Vector::Zero(p.size(kA));
  Vector yR = Vector::Zero(p.size(kR));
  spmv_add(sys.M, xJ, 1.0, yJ);
  spmv_transpose_add(sys.G, xPhi, 1.0, yJ);
  spmv_add(sys.K, xA, 1.0, yJ);
  spmv_add(sys.G, xJ, 1.0, yPhi);
  spmv_add(sys.X, xJ, 1.0, yA);
  spmv_add(sys.F, xA, 1.0, yA);
  spmv_transpose_add(sys.B, xR, 1.0, yA);
  spmv_add(sys.B, xA, 1.0, yR);
  yR += sys.r_diag.cwiseProduct(xR);
  p.segment(y, kJ) = yJ;
  p.segment(y, kPhi) = yPhi;
  p.segment(y, kA) = yA;
  p.segment(y, kR) = yR;
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  const auto& off = a.row_offsets();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = off[i]; k < off[i + 1]; ++k) {
      out << i + 1 << ' ' << a.col_indices()[k] + 1 << ' ' << a.values()[k] << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mhdk
