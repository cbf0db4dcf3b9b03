#pragma once

#include "fsi/mesh.hpp"
#include "fsi/system.hpp"

#include <array>
#include <vector>

namespace fsi {

struct MaterialParams {
  double lambda = 1.0;
  double mu = 1.0;
  double viscosity = 1.0;

  void validate() const;
};

struct StokesLameConfig {
  int resolution = 8;
  MaterialParams material;
  double T = 1.0;
};

/// Index sets of the saddle-point discretization.
struct SaddleDofMaps {
  // fluid P2 nodes: fluid vertices first, then fluid edges (as midpoints)
  std::vector<std::array<double, 2>> fluid_node_xy;
  std::vector<int> fluid_node_free;  // free-node index or -1 (outer or interface midpoint)
  std::vector<int> interface_vertices;  // mesh vertex ids on Gamma_s, sorted
  std::vector<int> solid_vertices;      // mesh vertex ids of the solid, sorted
  std::vector<std::array<double, 2>> solid_vertex_xy;
  std::vector<int> solid_interior;      // positions in solid_vertices not on Gamma_s
  std::vector<int> pressure_vertices;   // mesh vertex ids carrying P1 pressure
  // u_free entry k is component (k % 2) of free node free_nodes[k / 2]
  std::vector<int> free_nodes;          // fluid node index per free node
};

/// Stokes (Taylor-Hood P2/P1) in the fluid, P1 vector elasticity in the solid.
/// Fluid velocity unknowns are the free P2 values: Gamma_f values are removed
/// and Gamma_s edge midpoints are tied to their endpoints, so the interface
/// trace is linear and equals the solid velocity trace.
struct SaddleSystem {
  SpMat M_u;     // fluid mass on free velocity dofs
  SpMat K_u;     // viscosity * (eps(u), eps(v))_f
  SpMat D;       // n_p x n_u, -(q, div u)_f
  SpMat M_w;     // solid mass, 2 per solid vertex
  SpMat K_w;     // (sigma(w), eps(psi))_s
  SpMat C;       // solid vertex velocities from (u_free, w_t interior): n_w x (n_u + n_wt)
  Mat B_g;       // n_u x m, Tr_u' M_gamma
  Mat Tr_u;      // m x n_u, interface vertex values
  Mat M_gamma;   // m x m interface boundary mass
  SpMat lift;    // n_phys x n_u, all P2 fluid values from the free ones
  SpMat D_phys;  // n_p x n_phys
  SpMat M_phys;  // fluid mass on all P2 fluid values
  SaddleDofMaps dofs;

  Index n_u() const { return M_u.rows(); }
  Index n_p() const { return D.rows(); }
  Index n_w() const { return M_w.rows(); }
  Index n_wt() const { return C.cols() - M_u.rows(); }
};

SaddleSystem assemble_saddle(const Mesh& mesh, const MaterialParams& params,
                             bool parallel = true);

/// Null-space basis of D (orthonormal columns) and the reduced coupled system
/// on (c, w, w_t_interior) with fluid velocity u_free = Z c.
SystemOperators project_solenoidal(const SaddleSystem& saddle);

/// Null-space basis used by project_solenoidal.
Mat solenoidal_basis(const SpMat& D);

SystemOperators assemble_stokes_lame(const StokesLameConfig& config);

/// Element matrices on one triangle (exposed for testing).
namespace element {
/// P2 vector viscous block, 12x12, dof order (node, component) with node
/// order v0, v1, v2, e01, e12, e20.
Eigen::Matrix<double, 12, 12> p2_viscous(const std::array<std::array<double, 2>, 3>& p,
                                         double viscosity);
Eigen::Matrix<double, 6, 6> p2_mass(double area);
Eigen::Matrix<double, 6, 6> p1_elastic(const std::array<std::array<double, 2>, 3>& p,
                                       double lambda, double mu);
}  // namespace element

}  // namespace fsi
