#pragma once

#include "fsi/system.hpp"

namespace fsi {

/// 1D heat-wave interface problem: heat equation on (0,1), wave equation on
/// (1,2), interface at x = 1 with shared velocity and controlled stress.
struct HeatWaveConfig {
  int n_f = 16;        // intervals on the fluid segment
  int n_s = 16;        // intervals on the solid segment
  double kappa = 1.0;  // diffusivity
  double c2 = 1.0;     // wave speed squared
  double T = 1.0;      // horizon

  void validate() const;
};

/// P1 elements on both segments, u(0) = 0, natural condition at x = 2.
/// State layout: u on fluid nodes x_1..x_{n_f} (the last one is the
/// interface), w on solid nodes x = 1..2, w_t on solid nodes strictly right of
/// the interface. The interface velocity is u's last entry.
SystemOperators assemble_heatwave(const HeatWaveConfig& config);

/// Fluid node coordinates for the u block (x_1 .. x_{n_f}).
Vec heatwave_fluid_nodes(const HeatWaveConfig& config);

}  // namespace fsi
