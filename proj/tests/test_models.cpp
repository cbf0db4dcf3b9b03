#include "fsi/heatwave.hpp"
#include "fsi/mesh.hpp"
#include "fsi/state_space.hpp"
#include "fsi/stokes_lame.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <utility>

using namespace fsi;

namespace {

using Tri = std::array<std::array<double, 2>, 3>;

// Six-point rule, exact for degree 4 on the reference triangle (weights sum to 1).
struct QuadPoint {
  double l0, l1, l2, w;
};

std::vector<QuadPoint> degree4_rule() {
  const double a = 0.445948490915965, wa = 0.223381589678011;
  const double b = 0.091576213509771, wb = 0.109951743655322;
  return {{a, a, 1 - 2 * a, wa}, {a, 1 - 2 * a, a, wa}, {1 - 2 * a, a, a, wa},
          {b, b, 1 - 2 * b, wb}, {b, 1 - 2 * b, b, wb}, {1 - 2 * b, b, b, wb}};
}

struct Geometry {
  double area;
  std::array<std::array<double, 2>, 3> grad_l;  // gradients of barycentrics
};

Geometry geometry(const Tri& p) {
  const double det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                     (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
  Geometry g;
  g.area = 0.5 * det;
  for (int i = 0; i < 3; ++i) {
    const auto& q = p[(i + 1) % 3];
    const auto& r = p[(i + 2) % 3];
    g.grad_l[i] = {(q[1] - r[1]) / det, (r[0] - q[0]) / det};
  }
  return g;
}

// P2 shape values and gradients at barycentric point l; node order v0 v1 v2 e01 e12 e20.
void p2_basis(const Geometry& g, const double l[3], double N[6], double dN[6][2]) {
  for (int i = 0; i < 3; ++i) {
    N[i] = l[i] * (2 * l[i] - 1);
    for (int d = 0; d < 2; ++d) dN[i][d] = (4 * l[i] - 1) * g.grad_l[i][d];
  }
  const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int k = 0; k < 3; ++k) {
    const int i = e[k][0], j = e[k][1];
    N[3 + k] = 4 * l[i] * l[j];
    for (int d = 0; d < 2; ++d) dN[3 + k][d] = 4 * (l[i] * g.grad_l[j][d] + l[j] * g.grad_l[i][d]);
  }
}

// Counts mesh edges by their adjacent triangles' regions.
struct EdgeCensus {
  int outer = 0;      // one fluid triangle
  int interface = 0;  // one fluid and one solid triangle
  int solid_boundary = 0;
};

EdgeCensus edge_census(const Mesh& mesh) {
  std::map<std::pair<int, int>, std::vector<Region>> adj;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      adj[{a, b}].push_back(mesh.regions[t]);
    }
  }
  EdgeCensus c;
  for (const auto& [e, r] : adj) {
    if (r.size() == 1) {
      if (r[0] == Region::fluid) ++c.outer;
      else ++c.solid_boundary;
    } else if (r[0] != r[1]) {
      ++c.interface;
    }
  }
  return c;
}

double max_abs(const Mat& X) { return X.size() ? X.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("mesh at resolution 8 has the expected census") {
  const Mesh mesh = generate_annulus_mesh(8);
  CHECK(mesh.triangles.size() == 128);
  CHECK(mesh.count(Region::solid) == 8);
  CHECK(mesh.count(Region::fluid) == 120);
  CHECK(mesh.count(EdgeTag::interface) == 8);
  CHECK(mesh.count(EdgeTag::outer) == 32);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) CHECK(mesh.signed_area(t) > 0.0);

  const EdgeCensus c = edge_census(mesh);
  CHECK(c.interface == 8);
  CHECK(c.outer == 32);
  CHECK(c.solid_boundary == 0);
}

TEST_CASE("mesh tags match an independent edge walk at resolution 16") {
  const Mesh mesh = generate_annulus_mesh(16);
  CHECK(mesh.count(Region::solid) == 32);
  const EdgeCensus c = edge_census(mesh);
  CHECK(c.interface == mesh.count(EdgeTag::interface));
  CHECK(c.outer == mesh.count(EdgeTag::outer));
  CHECK(c.interface == 16);
  // no fluid triangle has all three vertices on the outer boundary
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != Region::fluid) continue;
    const auto& tri = mesh.triangles[t];
    CHECK_FALSE((mesh.on_outer_boundary(tri[0]) && mesh.on_outer_boundary(tri[1]) &&
                 mesh.on_outer_boundary(tri[2])));
  }
}

TEST_CASE("mesh resolution must be a positive multiple of 8") {
  CHECK_THROWS_AS(generate_annulus_mesh(12), InvalidArgument);
  CHECK_THROWS_AS(generate_annulus_mesh(4), InvalidArgument);
  CHECK_THROWS_AS(generate_annulus_mesh(0), InvalidArgument);
}

TEST_CASE("P2 viscous and mass element blocks match a degree-4 quadrature") {
  const Tri p{{{0.1, 0.2}, {0.9, 0.35}, {0.3, 0.8}}};
  const double nu = 1.7;
  const Geometry g = geometry(p);
  Eigen::Matrix<double, 12, 12> K = Eigen::Matrix<double, 12, 12>::Zero();
  Eigen::Matrix<double, 6, 6> Mm = Eigen::Matrix<double, 6, 6>::Zero();
  for (const auto& q : degree4_rule()) {
    const double l[3] = {q.l0, q.l1, q.l2};
    double N[6], dN[6][2];
    p2_basis(g, l, N, dN);
    const double w = q.w * g.area;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        Mm(a, b) += w * N[a] * N[b];
        const double dot = dN[a][0] * dN[b][0] + dN[a][1] * dN[b][1];
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            // eps(N_a e_c) : eps(N_b e_d)
            const double v = 0.5 * ((c == d ? dot : 0.0) + dN[a][d] * dN[b][c]);
            K(2 * a + c, 2 * b + d) += w * nu * v;
          }
      }
  }
  CHECK(max_abs(element::p2_viscous(p, nu) - K) <= 1e-12);
  CHECK(max_abs(element::p2_mass(g.area) - Mm) <= 1e-12);
}

TEST_CASE("P1 elastic element matches sigma(w):eps(psi)") {
  const Tri p{{{0.0, 0.0}, {0.5, 0.1}, {0.2, 0.4}}};
  const double lam = 1.3, mu = 0.7;
  const Geometry g = geometry(p);
  Eigen::Matrix<double, 6, 6> K;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 2; ++c)
      for (int b = 0; b < 3; ++b)
        for (int d = 0; d < 2; ++d) {
          const auto& ga = g.grad_l[a];
          const auto& gb = g.grad_l[b];
          const double dot = ga[0] * gb[0] + ga[1] * gb[1];
          const double div = ga[c] * gb[d];
          const double epseps = 0.5 * ((c == d ? dot : 0.0) + ga[d] * gb[c]);
          K(2 * a + c, 2 * b + d) = g.area * (lam * div + 2 * mu * epseps);
        }
  CHECK(max_abs(element::p1_elastic(p, lam, mu) - K) <= 1e-12);
}

TEST_CASE("saddle system structure at resolution 8") {
  const Mesh mesh = generate_annulus_mesh(8);
  const SaddleSystem s = assemble_saddle(mesh, MaterialParams{});
  for (const SpMat* X : {&s.K_u, &s.K_w, &s.M_u, &s.M_w}) {
    const Mat D(*X);
    CHECK(max_abs(D - D.transpose()) <= 1e-14 * max_abs(D));
  }
  CHECK(s.D.rows() == Index(s.dofs.pressure_vertices.size()));
  CHECK(s.D.cols() == s.n_u());
  CHECK(s.n_u() == Index(2 * s.dofs.free_nodes.size()));

  const Mat Z = solenoidal_basis(s.D);
  CHECK(max_abs(Mat(s.D) * Z) <= 1e-12);
  const Eigen::JacobiSVD<Mat> svd(Mat(s.D));
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  CHECK(Z.cols() == s.n_u() - rank);
  CHECK(max_abs(Z.transpose() * Z - Mat::Identity(Z.cols(), Z.cols())) <= 1e-12);
}

TEST_CASE("reduced 2D energy equals the energy of the lifted physical state") {
  const Mesh mesh = generate_annulus_mesh(8);
  const SaddleSystem s = assemble_saddle(mesh, MaterialParams{});
  const SystemOperators sys = project_solenoidal(s);
  const Mat Z = solenoidal_basis(s.D);
  const IndexMap& b = sys.blocks;
  CHECK(b.total() == sys.state_dim());
  CHECK(b.u.size == Z.cols());
  CHECK(b.w.size == s.n_w());
  CHECK(b.wt.size == s.n_wt());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Vec y(sys.state_dim());
    for (Index i = 0; i < y.size(); ++i) y[i] = nd(rng);
    const Vec c = y.segment(b.u.start, b.u.size);
    const Vec w = y.segment(b.w.start, b.w.size);
    const Vec wt = y.segment(b.wt.start, b.wt.size);
    const Vec u_free = Z * c;
    Vec x(s.n_u() + s.n_wt());
    x << u_free, wt;
    const Vec v_solid = s.C * x;
    const Vec u_phys = s.lift * u_free;
    const double kinetic_fluid = u_phys.dot(s.M_phys * u_phys);
    CHECK(std::abs(kinetic_fluid - u_free.dot(s.M_u * u_free)) <= 1e-12 * (1 + kinetic_fluid));
    const double e_phys =
        0.5 * (kinetic_fluid + w.dot(s.K_w * w) + v_solid.dot(s.M_w * v_solid));
    CHECK(std::abs(energy_of(sys, y) - e_phys) <= 1e-12 * std::max(1.0, e_phys));
  }
}

TEST_CASE("2D viscous operator is positive on the solenoidal space and mesh-stable") {
  auto lambda_min = [](int res) {
    const SaddleSystem s = assemble_saddle(generate_annulus_mesh(res), MaterialParams{});
    const Mat Z = solenoidal_basis(s.D);
    const Mat K = Z.transpose() * Mat(s.K_u) * Z;
    const Mat M = Z.transpose() * Mat(s.M_u) * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (K + K.transpose()),
                                                     0.5 * (M + M.transpose()));
    return es.eigenvalues()[0];
  };
  const double l8 = lambda_min(8), l16 = lambda_min(16);
  CHECK(l8 > 0.0);
  CHECK(l16 > 0.0);
  CHECK(l16 / l8 > 0.5);
  CHECK(l16 / l8 < 2.0);
}

TEST_CASE("2D model assembles for lambda 0 and 1 and dissipates energy") {
  for (double lam : {0.0, 1.0}) {
    StokesLameConfig cfg;
    cfg.material.lambda = lam;
    const SystemOperators sys = assemble_stokes_lame(cfg);
    CHECK(sys.state_dim() > 0);
    const StateVector y0 = make_initial_state(sys, InitialKind::random_energy_unit, 5);
    const Trajectory tr = propagate_free(sys, y0, 0.2, 1e-3, 1.0);
    CHECK(max_energy_increase(sys, tr) <= 1e-12);
    CHECK(divergence_residual(sys, tr) <= 1e-10);
  }
  StokesLameConfig bad;
  bad.material.viscosity = 0.0;
  CHECK_THROWS_AS(assemble_stokes_lame(bad), InvalidArgument);
}

TEST_CASE("heatwave dimensions, stencil and control injection") {
  HeatWaveConfig cfg;
  cfg.n_f = 4;
  cfg.n_s = 4;
  const SystemOperators sys = assemble_heatwave(cfg);
  CHECK(sys.state_dim() == 13);
  CHECK(sys.blocks.u.size == 4);
  CHECK(sys.blocks.w.size == 5);
  CHECK(sys.blocks.wt.size == 4);

  const Mat A(sys.A);
  const double h = 0.25;
  for (Index i = 1; i + 1 < 4; ++i) {
    CHECK(A(i, i - 1) == doctest::Approx(1.0 / h).epsilon(1e-14));
    CHECK(A(i, i) == doctest::Approx(-2.0 / h).epsilon(1e-14));
    CHECK(A(i, i + 1) == doctest::Approx(1.0 / h).epsilon(1e-14));
  }
  CHECK(sys.B.rows() == 13);
  CHECK(sys.B.cols() == 1);
  CHECK(sys.B(3, 0) == 1.0);
  CHECK(sys.B.cwiseAbs().sum() == 1.0);
  CHECK(heatwave_fluid_nodes(cfg)[3] == doctest::Approx(1.0));
}

TEST_CASE("heatwave rejects invalid configurations") {
  HeatWaveConfig cfg;
  cfg.n_f = 1;
  CHECK_THROWS_AS(assemble_heatwave(cfg), InvalidArgument);
  cfg = {};
  cfg.kappa = -1.0;
  CHECK_THROWS_AS(assemble_heatwave(cfg), InvalidArgument);
  cfg = {};
  cfg.c2 = 0.0;
  CHECK_THROWS_AS(assemble_heatwave(cfg), InvalidArgument);
}

TEST_CASE("heatwave energy Gram is consistent with the mass and the solid stiffness") {
  HeatWaveConfig cfg;
  cfg.n_f = 6;
  cfg.n_s = 5;
  const SystemOperators sys = assemble_heatwave(cfg);
  const Mat E(sys.energy), M(sys.M);
  const auto& b = sys.blocks;
  // kinetic rows of E equal those of M; E is symmetric and R'R reproduces it
  CHECK(max_abs(E.block(0, 0, b.u.size, b.u.size) - M.block(0, 0, b.u.size, b.u.size)) == 0.0);
  CHECK(max_abs(E - E.transpose()) == 0.0);
  CHECK(max_abs(sys.R.transpose() * sys.R - E) <= 1e-12);
  // rigid solid translation has zero elastic energy
  Vec y = Vec::Zero(sys.state_dim());
  y.segment(b.w.start, b.w.size).setOnes();
  CHECK(energy_of(sys, y) <= 1e-14);
}

TEST_CASE("initial states are deterministic and normalized") {
  HeatWaveConfig cfg;
  cfg.n_f = 64;
  cfg.n_s = 64;
  const SystemOperators sys = assemble_heatwave(cfg);
  const StateVector a = make_initial_state(sys, InitialKind::random_energy_unit, 9);
  const StateVector b = make_initial_state(sys, InitialKind::random_energy_unit, 9);
  const StateVector c = make_initial_state(sys, InitialKind::random_energy_unit, 10);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.0);
  CHECK(energy_norm(sys, a) == doctest::Approx(1.0).epsilon(1e-12));

  const StateVector s = make_initial_state(sys, InitialKind::smooth, 1);
  CHECK(energy_norm(sys, s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.segment(sys.blocks.w.start, sys.blocks.w.size + sys.blocks.wt.size).norm() == 0.0);

  const StateVector d = make_initial_state(sys, InitialKind::delta_like, 1);
  Index nonzero = 0;
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) ++nonzero;
  CHECK(nonzero == 1);
  CHECK_THROWS_AS(parse_initial_kind("rough"), InvalidArgument);
}

TEST_CASE("both models satisfy the adjoint trace identity") {
  HeatWaveConfig hw;
  hw.n_f = 12;
  hw.n_s = 9;
  CHECK(adjoint_identity_error(assemble_heatwave(hw)) <= 1e-12);
  CHECK(adjoint_identity_error(assemble_stokes_lame(StokesLameConfig{})) <= 1e-12);
}
