#include "fsi/stokes_lame.hpp"

#include "fsi/kernels.hpp"
#include "fsi/state_space.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace fsi {

void MaterialParams::validate() const {
  require(mu > 0.0, "material: mu must be positive");
  require(lambda >= 0.0, "material: lambda must be nonnegative");
  require(viscosity > 0.0, "material: viscosity must be positive");
}

namespace element {

namespace {

using Pts = std::array<std::array<double, 2>, 3>;
using Grad = std::array<double, 2>;

double area_of(const Pts& p) {
  return 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
}

std::array<Grad, 3> bary_gradients(const Pts& p) {
  const double a2 = 2.0 * area_of(p);
  return {{{(p[1][1] - p[2][1]) / a2, (p[2][0] - p[1][0]) / a2},
           {(p[2][1] - p[0][1]) / a2, (p[0][0] - p[2][0]) / a2},
           {(p[0][1] - p[1][1]) / a2, (p[1][0] - p[0][0]) / a2}}};
}

constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};

// gradients of the six P2 basis functions at barycentric point l
std::array<Grad, 6> p2_gradients(const std::array<Grad, 3>& g, const std::array<double, 3>& l) {
  std::array<Grad, 6> out{};
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 2; ++c) out[i][c] = (4.0 * l[i] - 1.0) * g[i][c];
  for (int e = 0; e < 3; ++e) {
    const int i = kEdge[e][0], j = kEdge[e][1];
    for (int c = 0; c < 2; ++c) out[3 + e][c] = 4.0 * (l[j] * g[i][c] + l[i] * g[j][c]);
  }
  return out;
}

// edge-midpoint rule, exact for quadratics
constexpr std::array<std::array<double, 3>, 3> kMid = {{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};

}  // namespace

Eigen::Matrix<double, 12, 12> p2_viscous(const Pts& p, double viscosity) {
  const double area = area_of(p);
  const auto g = bary_gradients(p);
  Eigen::Matrix<double, 12, 12> K = Eigen::Matrix<double, 12, 12>::Zero();
  for (const auto& l : kMid) {
    const auto G = p2_gradients(g, l);
    const double w = viscosity * area / 3.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double dot = G[a][0] * G[b][0] + G[a][1] * G[b][1];
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            K(2 * a + c, 2 * b + d) += w * 0.5 * ((c == d ? dot : 0.0) + G[a][d] * G[b][c]);
      }
  }
  return K;
}

Eigen::Matrix<double, 6, 6> p2_mass(double area) {
  Eigen::Matrix<double, 6, 6> M;
  M << 6, -1, -1, 0, -4, 0,
      -1, 6, -1, 0, 0, -4,
      -1, -1, 6, -4, 0, 0,
      0, 0, -4, 32, 16, 16,
      -4, 0, 0, 16, 32, 16,
      0, -4, 0, 16, 16, 32;
  return M * (area / 180.0);
}

Eigen::Matrix<double, 6, 6> p1_elastic(const Pts& p, double lambda, double mu) {
  const double area = area_of(p);
  const auto g = bary_gradients(p);
  Eigen::Matrix<double, 6, 6> K;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double dot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          K(2 * a + c, 2 * b + d) =
              area * (lambda * g[a][c] * g[b][d] + mu * ((c == d ? dot : 0.0) + g[a][d] * g[b][c]));
    }
  return K;
}

// -(lambda_i, d_c phi_a) for P1 pressure i and P2 velocity (a, c): 3 x 12
Eigen::Matrix<double, 3, 12> p2_divergence(const Pts& p) {
  const double area = area_of(p);
  const auto g = bary_gradients(p);
  Eigen::Matrix<double, 3, 12> D = Eigen::Matrix<double, 3, 12>::Zero();
  for (const auto& l : kMid) {
    const auto G = p2_gradients(g, l);
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 2; ++c) D(i, 2 * a + c) -= area / 3.0 * l[i] * G[a][c];
  }
  return D;
}

}  // namespace element

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

SpMat from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

std::array<std::array<double, 2>, 3> corners(const Mesh& mesh, const std::array<int, 3>& tri) {
  return {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
}

}  // namespace

SaddleSystem assemble_saddle(const Mesh& mesh, const MaterialParams& params, bool parallel) {
  params.validate();
  require(mesh.triangles.size() == mesh.regions.size(), "saddle: mesh regions do not match triangles");

  // tag consistency
  std::map<EdgeKey, std::array<int, 2>> edge_use;  // fluid count, solid count
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    require(mesh.signed_area(t) > 0.0, "saddle: triangle " + std::to_string(t) + " is not positively oriented");
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto& use = edge_use[key(tri[e], tri[(e + 1) % 3])];
      use[mesh.regions[t] == Region::solid ? 1 : 0] += 1;
    }
  }
  std::set<EdgeKey> outer_edges, iface_edges;
  std::set<int> outer_vertices, iface_vertex_set;
  for (const auto& e : mesh.boundary_edges) {
    const auto it = edge_use.find(key(e.a, e.b));
    require(it != edge_use.end(), "saddle: tagged edge is not a mesh edge");
    const auto use = it->second;
    if (e.tag == EdgeTag::outer) {
      require(use[0] == 1 && use[1] == 0, "saddle: outer edge must belong to exactly one fluid triangle");
      outer_edges.insert(key(e.a, e.b));
      outer_vertices.insert(e.a);
      outer_vertices.insert(e.b);
    } else {
      require(use[0] == 1 && use[1] == 1,
              "saddle: interface edge must be shared by one fluid and one solid triangle");
      iface_edges.insert(key(e.a, e.b));
      iface_vertex_set.insert(e.a);
      iface_vertex_set.insert(e.b);
    }
  }
  require(!iface_edges.empty(), "saddle: mesh has no interface edges");

  SaddleSystem s;
  SaddleDofMaps& dm = s.dofs;

  // fluid P2 nodes
  std::vector<int> fluid_tris;
  std::set<int> fluid_vertex_set;
  std::set<EdgeKey> fluid_edge_set;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != Region::fluid) continue;
    fluid_tris.push_back(int(t));
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      fluid_vertex_set.insert(tri[e]);
      fluid_edge_set.insert(key(tri[e], tri[(e + 1) % 3]));
    }
  }
  std::map<int, int> vnode;
  std::map<EdgeKey, int> enode;
  for (int v : fluid_vertex_set) {
    vnode[v] = int(dm.fluid_node_xy.size());
    dm.fluid_node_xy.push_back(mesh.vertices[v]);
    const bool fixed = outer_vertices.count(v) > 0;
    dm.fluid_node_free.push_back(fixed ? -1 : 0);
  }
  for (const auto& ek : fluid_edge_set) {
    enode[ek] = int(dm.fluid_node_xy.size());
    const auto& a = mesh.vertices[ek.first];
    const auto& b = mesh.vertices[ek.second];
    dm.fluid_node_xy.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    const bool fixed = outer_edges.count(ek) > 0 || iface_edges.count(ek) > 0;
    dm.fluid_node_free.push_back(fixed ? -1 : 0);
  }
  for (std::size_t k = 0; k < dm.fluid_node_free.size(); ++k) {
    if (dm.fluid_node_free[k] < 0) continue;
    dm.fluid_node_free[k] = int(dm.free_nodes.size());
    dm.free_nodes.push_back(int(k));
  }
  const Index n_nodes = Index(dm.fluid_node_xy.size());
  const Index n_phys = 2 * n_nodes;
  const Index n_u = 2 * Index(dm.free_nodes.size());

  // lift: all P2 values from the free ones
  std::vector<Triplet> lift_t;
  for (Index k = 0; k < n_nodes; ++k) {
    const int f = dm.fluid_node_free[k];
    for (int c = 0; c < 2; ++c)
      if (f >= 0) lift_t.emplace_back(2 * k + c, 2 * f + c, 1.0);
  }
  for (const auto& ek : iface_edges) {
    const Index k = enode.at(ek);
    for (int end : {ek.first, ek.second}) {
      const int f = dm.fluid_node_free[vnode.at(end)];
      require(f >= 0, "saddle: interface vertex touches the outer boundary");
      for (int c = 0; c < 2; ++c) lift_t.emplace_back(2 * k + c, 2 * f + c, 0.5);
    }
  }
  s.lift = from_triplets(n_phys, n_u, lift_t);

  // pressure on fluid vertices
  std::map<int, int> pidx;
  for (int v : fluid_vertex_set) {
    pidx[v] = int(dm.pressure_vertices.size());
    dm.pressure_vertices.push_back(v);
  }
  const Index n_p = Index(dm.pressure_vertices.size());

  auto local_phys = [&](const std::array<int, 3>& tri) {
    std::array<Index, 12> idx{};
    const int nodes[6] = {vnode.at(tri[0]), vnode.at(tri[1]), vnode.at(tri[2]),
                          enode.at(key(tri[0], tri[1])), enode.at(key(tri[1], tri[2])),
                          enode.at(key(tri[2], tri[0]))};
    for (int a = 0; a < 6; ++a)
      for (int c = 0; c < 2; ++c) idx[2 * a + c] = 2 * Index(nodes[a]) + c;
    return idx;
  };

  const Index nft = Index(fluid_tris.size());
  const kernels::ElementKernel viscous = [&](Index e, std::vector<Triplet>& out) {
    const auto& tri = mesh.triangles[fluid_tris[e]];
    const auto K = element::p2_viscous(corners(mesh, tri), params.viscosity);
    const auto idx = local_phys(tri);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) out.emplace_back(idx[i], idx[j], K(i, j));
  };
  const kernels::ElementKernel mass = [&](Index e, std::vector<Triplet>& out) {
    const auto t = std::size_t(fluid_tris[e]);
    const auto M = element::p2_mass(mesh.signed_area(t));
    const auto idx = local_phys(mesh.triangles[t]);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 2; ++c) out.emplace_back(idx[2 * a + c], idx[2 * b + c], M(a, b));
  };
  const kernels::ElementKernel divergence = [&](Index e, std::vector<Triplet>& out) {
    const auto& tri = mesh.triangles[fluid_tris[e]];
    const auto D = element::p2_divergence(corners(mesh, tri));
    const auto idx = local_phys(tri);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 12; ++j) out.emplace_back(pidx.at(tri[i]), idx[j], D(i, j));
  };
  auto run = [&](const kernels::ElementKernel& k) {
    return parallel ? kernels::assemble_omp(nft, k) : kernels::assemble_serial(nft, k);
  };
  const SpMat K_phys = from_triplets(n_phys, n_phys, run(viscous));
  s.M_phys = from_triplets(n_phys, n_phys, run(mass));
  s.D_phys = from_triplets(n_p, n_phys, run(divergence));
  const SpMat liftT = s.lift.transpose();
  s.K_u = liftT * K_phys * s.lift;
  s.M_u = liftT * s.M_phys * s.lift;
  s.D = s.D_phys * s.lift;
  s.K_u.prune(0.0);
  s.M_u.prune(0.0);
  s.D.prune(0.0);

  // solid
  std::set<int> solid_set;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (mesh.regions[t] == Region::solid)
      for (int v : mesh.triangles[t]) solid_set.insert(v);
  std::map<int, int> sidx;
  for (int v : solid_set) {
    sidx[v] = int(dm.solid_vertices.size());
    dm.solid_vertices.push_back(v);
    dm.solid_vertex_xy.push_back(mesh.vertices[v]);
    if (!iface_vertex_set.count(v)) dm.solid_interior.push_back(sidx[v]);
  }
  const Index n_w = 2 * Index(dm.solid_vertices.size());
  const Index n_wt = 2 * Index(dm.solid_interior.size());
  std::vector<Triplet> mw_t, kw_t;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != Region::solid) continue;
    const auto& tri = mesh.triangles[t];
    const auto K = element::p1_elastic(corners(mesh, tri), params.lambda, params.mu);
    const double area = mesh.signed_area(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double mab = area / 12.0 * (a == b ? 2.0 : 1.0);
        for (int c = 0; c < 2; ++c) {
          mw_t.emplace_back(2 * sidx[tri[a]] + c, 2 * sidx[tri[b]] + c, mab);
          for (int d = 0; d < 2; ++d)
            kw_t.emplace_back(2 * sidx[tri[a]] + c, 2 * sidx[tri[b]] + d, K(2 * a + c, 2 * b + d));
        }
      }
  }
  s.M_w = from_triplets(n_w, n_w, mw_t);
  s.K_w = from_triplets(n_w, n_w, kw_t);

  // solid vertex velocities from (u_free, w_t interior)
  std::vector<Triplet> c_t;
  std::map<int, int> interior_pos;
  for (std::size_t i = 0; i < dm.solid_interior.size(); ++i) interior_pos[dm.solid_interior[i]] = int(i);
  for (std::size_t j = 0; j < dm.solid_vertices.size(); ++j) {
    const int v = dm.solid_vertices[j];
    for (int c = 0; c < 2; ++c) {
      Index col;
      if (iface_vertex_set.count(v)) {
        col = 2 * Index(dm.fluid_node_free[vnode.at(v)]) + c;
      } else {
        col = n_u + 2 * Index(interior_pos.at(int(j))) + c;
      }
      c_t.emplace_back(2 * Index(j) + c, col, 1.0);
    }
  }
  s.C = from_triplets(n_w, n_u + n_wt, c_t);

  // interface trace and boundary mass
  dm.interface_vertices.assign(iface_vertex_set.begin(), iface_vertex_set.end());
  std::map<int, int> cidx;
  for (std::size_t i = 0; i < dm.interface_vertices.size(); ++i) cidx[dm.interface_vertices[i]] = int(i);
  const Index m = 2 * Index(dm.interface_vertices.size());
  s.M_gamma = Mat::Zero(m, m);
  for (const auto& ek : iface_edges) {
    const auto& a = mesh.vertices[ek.first];
    const auto& b = mesh.vertices[ek.second];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    const int ia = cidx[ek.first], ib = cidx[ek.second];
    for (int c = 0; c < 2; ++c) {
      s.M_gamma(2 * ia + c, 2 * ia + c) += len / 3.0;
      s.M_gamma(2 * ib + c, 2 * ib + c) += len / 3.0;
      s.M_gamma(2 * ia + c, 2 * ib + c) += len / 6.0;
      s.M_gamma(2 * ib + c, 2 * ia + c) += len / 6.0;
    }
  }
  s.Tr_u = Mat::Zero(m, n_u);
  for (std::size_t i = 0; i < dm.interface_vertices.size(); ++i) {
    const int f = dm.fluid_node_free[vnode.at(dm.interface_vertices[i])];
    for (int c = 0; c < 2; ++c) s.Tr_u(2 * Index(i) + c, 2 * Index(f) + c) = 1.0;
  }
  s.B_g = s.Tr_u.transpose() * s.M_gamma;
  return s;
}

Mat solenoidal_basis(const SpMat& D) {
  const Index n_u = D.cols();
  const Mat Dt = Mat(D).transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(Dt);
  const Index rank = qr.rank();
  if (D.rows() - rank > 1) {
    throw NumericalError("solenoidal basis: divergence has rank " + std::to_string(rank) + " for " +
                         std::to_string(D.rows()) +
                         " pressure dofs; deficiency beyond the constant mode signals a defective mesh");
  }
  const Mat Q = qr.householderQ();
  return Q.rightCols(n_u - rank);
}

SystemOperators project_solenoidal(const SaddleSystem& s) {
  const Mat Z = solenoidal_basis(s.D);
  const Index n_u = s.n_u();
  const Index n_z = Z.cols();
  const Index n_w = s.n_w();
  const Index n_wt = s.n_wt();
  const Index n_x = n_z + n_wt;
  const Index n = n_x + n_w;

  Mat Zbig = Mat::Zero(n_u + n_wt, n_x);
  Zbig.topLeftCorner(n_u, n_z) = Z;
  Zbig.bottomRightCorner(n_wt, n_wt).setIdentity();

  const Mat Cd = Mat(s.C);
  Mat M_V = Cd.transpose() * Mat(s.M_w) * Cd;
  M_V.topLeftCorner(n_u, n_u) += Mat(s.M_u);
  // congruences are symmetric in exact arithmetic; make them so in floating point
  auto sym = [](const Mat& X) -> Mat { return 0.5 * (X + X.transpose()); };
  const Mat M_x = sym(Zbig.transpose() * M_V * Zbig);
  const Mat Zt = Z.transpose();
  const Mat K_zz = sym(Zt * Mat(s.K_u) * Z);
  Mat K_x = Mat::Zero(n_x, n_x);
  K_x.topLeftCorner(n_z, n_z) = K_zz;
  const Mat C_x = Cd * Zbig;  // n_w x n_x
  const Mat K_w = Mat(s.K_w);
  const Mat M_w = Mat(s.M_w);
  Mat B_x = Mat::Zero(n_x, s.B_g.cols());
  B_x.topRows(n_z) = Zt * s.B_g;

  SystemOperators sys;
  sys.model = "stokes_lame";
  sys.blocks.u = {0, n_z};
  sys.blocks.w = {n_z, n_w};
  sys.blocks.wt = {n_z + n_w, n_wt};

  // x ordering (c, w_t) -> state positions
  std::vector<Index> xpos(n_x);
  for (Index i = 0; i < n_z; ++i) xpos[i] = i;
  for (Index i = 0; i < n_wt; ++i) xpos[n_z + i] = n_z + n_w + i;
  auto scatter_xx = [&](Mat& dst, const Mat& src) {
    for (Index c = 0; c < n_x; ++c)
      for (Index r = 0; r < n_x; ++r) dst(xpos[r], xpos[c]) = src(r, c);
  };

  Mat M = Mat::Zero(n, n), A = Mat::Zero(n, n), E = Mat::Zero(n, n);
  scatter_xx(M, M_x);
  M.block(n_z, n_z, n_w, n_w).setIdentity();
  Mat negK = -K_x;
  scatter_xx(A, negK);
  const Mat force = -(C_x.transpose() * K_w);  // n_x x n_w
  for (Index r = 0; r < n_x; ++r) {
    A.block(xpos[r], n_z, 1, n_w) = force.row(r);
    for (Index c = 0; c < n_w; ++c) A(n_z + c, xpos[r]) = C_x(c, r);
  }
  scatter_xx(E, M_x);
  E.block(n_z, n_z, n_w, n_w) = K_w;
  Mat G = E;
  G.block(n_z, n_z, n_w, n_w) += M_w;

  sys.M = M.sparseView(0.0, 0.0);
  sys.A = A.sparseView(0.0, 0.0);
  sys.energy = E.sparseView(0.0, 0.0);
  sys.y_gram = G.sparseView(0.0, 0.0);
  sys.B = Mat::Zero(n, B_x.cols());
  for (Index r = 0; r < n_x; ++r) sys.B.row(xpos[r]) = B_x.row(r);
  sys.Tr = Mat::Zero(s.Tr_u.rows(), n);
  sys.Tr.leftCols(n_z) = s.Tr_u * Z;
  sys.boundary_mass = s.M_gamma;
  sys.R = observation_factor(sys.energy);

  sys.fluid_mass = sym(Zt * Mat(s.M_u) * Z).sparseView(0.0, 0.0);
  sys.fluid_stiffness = K_zz.sparseView(0.0, 0.0);
  sys.frac_fluid = {sys.fluid_stiffness, sys.fluid_mass};
  sys.frac_displacement = {SpMat(s.K_w + s.M_w), s.M_w};
  const Mat K_vel = sym(K_x + C_x.transpose() * K_w * C_x);
  sys.frac_velocity = {K_vel.sparseView(0.0, 0.0), M_x.sparseView(0.0, 0.0)};

  sys.lift = Mat(s.lift) * Z;
  sys.divergence = s.D_phys;

  // deterministic profiles: M_V-projection of a nodal velocity field
  const Eigen::LDLT<Mat> mx_ldlt(M_x);
  auto project_field = [&](const Vec& V) {
    const Vec x = mx_ldlt.solve(Zbig.transpose() * (M_V * V));
    Vec y = Vec::Zero(n);
    for (Index r = 0; r < n_x; ++r) y[xpos[r]] = x[r];
    return y;
  };
  const double pi = std::numbers::pi;
  auto stream_velocity = [pi](double x, double y) {
    // psi = sin^2(pi x) sin^2(pi y), u = (psi_y, -psi_x)
    const double sx = std::sin(pi * x), sy = std::sin(pi * y);
    return std::array<double, 2>{2.0 * pi * sx * sx * sy * std::cos(pi * y),
                                 -2.0 * pi * sy * sy * sx * std::cos(pi * x)};
  };
  Vec V = Vec::Zero(n_u + n_wt);
  for (std::size_t f = 0; f < s.dofs.free_nodes.size(); ++f) {
    const auto& xy = s.dofs.fluid_node_xy[s.dofs.free_nodes[f]];
    const auto u = stream_velocity(xy[0], xy[1]);
    V[2 * f] = u[0];
    V[2 * f + 1] = u[1];
  }
  for (std::size_t i = 0; i < s.dofs.solid_interior.size(); ++i) {
    const auto& xy = s.dofs.solid_vertex_xy[s.dofs.solid_interior[i]];
    const auto u = stream_velocity(xy[0], xy[1]);
    V[n_u + 2 * Index(i)] = u[0];
    V[n_u + 2 * Index(i) + 1] = u[1];
  }
  sys.smooth_profile = project_field(V);

  // spike at the free fluid vertex nearest (1/2, 1/8)
  Index best = 0;
  double best_d = INFINITY;
  for (std::size_t f = 0; f < s.dofs.free_nodes.size(); ++f) {
    const auto& xy = s.dofs.fluid_node_xy[s.dofs.free_nodes[f]];
    const double d = std::hypot(xy[0] - 0.5, xy[1] - 0.125);
    if (d < best_d) {
      best_d = d;
      best = Index(f);
    }
  }
  Vec spike = Vec::Zero(n_u + n_wt);
  spike[2 * best] = 1.0;
  sys.delta_profile = project_field(spike);
  return sys;
}

SystemOperators assemble_stokes_lame(const StokesLameConfig& config) {
  require(config.T > 0.0, "stokes_lame: T must be positive");
  const Mesh mesh = generate_annulus_mesh(config.resolution);
  const SaddleSystem saddle = assemble_saddle(mesh, config.material);
  SystemOperators sys = project_solenoidal(saddle);
  sys.level = config.resolution;
  sys.h = 1.0 / config.resolution;
  return sys;
}

}  // namespace fsi
