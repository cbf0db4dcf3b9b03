#include "fsi/heatwave.hpp"

#include "fsi/state_space.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace fsi {

void HeatWaveConfig::validate() const {
  require(n_f >= 2, "heatwave: n_f must be >= 2 (got " + std::to_string(n_f) + ")");
  require(n_s >= 2, "heatwave: n_s must be >= 2 (got " + std::to_string(n_s) + ")");
  require(kappa > 0.0, "heatwave: kappa must be positive");
  require(c2 > 0.0, "heatwave: c2 must be positive");
  require(T > 0.0, "heatwave: T must be positive");
}

Vec heatwave_fluid_nodes(const HeatWaveConfig& config) {
  const double h = 1.0 / config.n_f;
  Vec x(config.n_f);
  for (int i = 0; i < config.n_f; ++i) x[i] = (i + 1) * h;
  return x;
}

namespace {

constexpr double kMass[2][2] = {{2.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 6.0}};
constexpr double kStiff[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};

SpMat from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SystemOperators assemble_heatwave(const HeatWaveConfig& config) {
  config.validate();
  const int nf = config.n_f;
  const int ns = config.n_s;
  const double hf = 1.0 / nf;
  const double hs = 1.0 / ns;

  SystemOperators sys;
  sys.model = "heatwave";
  sys.level = nf;
  sys.h = 1.0 / nf;
  sys.blocks.u = {0, nf};
  sys.blocks.w = {nf, ns + 1};
  sys.blocks.wt = {nf + ns + 1, ns};
  const Index n = sys.blocks.total();

  // Velocity field: fluid node i (1..nf) and solid node j (0..ns), with
  // solid node 0 identified with fluid node nf.
  auto fluid_dof = [](int i) -> Index { return i - 1; };
  auto solid_vel_dof = [&](int j) -> Index {
    return j == 0 ? Index(nf - 1) : sys.blocks.wt.start + j - 1;
  };
  auto solid_disp_dof = [&](int j) -> Index { return sys.blocks.w.start + j; };
  // Position of a state velocity index inside the concatenated (u, w_t) vector.
  auto vel_field_pos = [&](Index state) -> Index {
    return state < nf ? state : nf + (state - sys.blocks.wt.start);
  };

  std::vector<Triplet> m_t, a_t, e_t, g_t;
  std::vector<Triplet> fm_t, fk_t;          // fluid alone, u block
  std::vector<Triplet> sk_t, sm_t;          // solid on w block (local 0..ns)
  std::vector<Triplet> vk_t, vm_t;          // velocity field (u, w_t)

  for (int e = 0; e < nf; ++e) {
    const int nodes[2] = {e, e + 1};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (nodes[a] == 0 || nodes[b] == 0) continue;  // u(0) = 0
        const Index ra = fluid_dof(nodes[a]);
        const Index cb = fluid_dof(nodes[b]);
        const double mab = hf * kMass[a][b];
        const double kab = config.kappa / hf * kStiff[a][b];
        m_t.emplace_back(ra, cb, mab);
        e_t.emplace_back(ra, cb, mab);
        g_t.emplace_back(ra, cb, mab);
        a_t.emplace_back(ra, cb, -kab);
        fm_t.emplace_back(ra, cb, mab);
        fk_t.emplace_back(ra, cb, kab);
        vm_t.emplace_back(vel_field_pos(ra), vel_field_pos(cb), mab);
        vk_t.emplace_back(vel_field_pos(ra), vel_field_pos(cb), kab);
      }
    }
  }

  for (int e = 0; e < ns; ++e) {
    const int nodes[2] = {e, e + 1};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const Index va = solid_vel_dof(nodes[a]);
        const Index vb = solid_vel_dof(nodes[b]);
        const Index wb = solid_disp_dof(nodes[b]);
        const Index wa = solid_disp_dof(nodes[a]);
        const double mab = hs * kMass[a][b];
        const double kab = config.c2 / hs * kStiff[a][b];
        m_t.emplace_back(va, vb, mab);
        e_t.emplace_back(va, vb, mab);
        g_t.emplace_back(va, vb, mab);
        // velocity rows see the elastic force of the displacement
        a_t.emplace_back(va, wb, -kab);
        e_t.emplace_back(wa, wb, kab);
        g_t.emplace_back(wa, wb, kab + mab);
        sk_t.emplace_back(nodes[a], nodes[b], kab);
        sm_t.emplace_back(nodes[a], nodes[b], mab);
        vm_t.emplace_back(vel_field_pos(va), vel_field_pos(vb), mab);
        vk_t.emplace_back(vel_field_pos(va), vel_field_pos(vb), kab);
      }
    }
  }

  // w' = solid velocity (identity mass on the w rows)
  for (int j = 0; j <= ns; ++j) {
    m_t.emplace_back(solid_disp_dof(j), solid_disp_dof(j), 1.0);
    a_t.emplace_back(solid_disp_dof(j), solid_vel_dof(j), 1.0);
  }

  sys.M = from_triplets(n, n, m_t);
  sys.A = from_triplets(n, n, a_t);
  sys.energy = from_triplets(n, n, e_t);
  sys.y_gram = from_triplets(n, n, g_t);

  const Index iface = fluid_dof(nf);
  sys.B = Mat::Zero(n, 1);
  sys.B(iface, 0) = 1.0;
  sys.Tr = Mat::Zero(1, n);
  sys.Tr(0, iface) = 1.0;
  sys.boundary_mass = Mat::Identity(1, 1);
  sys.R = observation_factor(sys.energy);

  sys.fluid_mass = from_triplets(nf, nf, fm_t);
  sys.fluid_stiffness = from_triplets(nf, nf, fk_t);

  sys.frac_fluid = {sys.fluid_stiffness, sys.fluid_mass};
  SpMat solid_k = from_triplets(ns + 1, ns + 1, sk_t);
  SpMat solid_m = from_triplets(ns + 1, ns + 1, sm_t);
  sys.frac_displacement = {SpMat(solid_k + solid_m), solid_m};
  const Index nv = nf + ns;
  sys.frac_velocity = {from_triplets(nv, nv, vk_t), from_triplets(nv, nv, vm_t)};

  sys.smooth_profile = Vec::Zero(n);
  const Vec x = heatwave_fluid_nodes(config);
  for (int i = 0; i < nf; ++i) sys.smooth_profile[i] = std::sin(std::numbers::pi * x[i]);
  sys.delta_profile = Vec::Zero(n);
  sys.delta_profile[fluid_dof(std::max(1, nf / 2))] = 1.0;
  return sys;
}

}  // namespace fsi
