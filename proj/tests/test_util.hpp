// Shared fixtures for the test suites: the reference Otter vessel dataset
// (kept in sync with scenarios/otter.params) and the reference sea state.
#pragma once

#include <random>

#include "usv/vessel.hpp"
#include "usv/wave.hpp"

namespace usv::test {

inline VesselParams otter_params() {
  VesselParams p;
  p.m = 80.0;
  p.g = 9.81;
  p.rho = 1025.0;
  p.r_g = Vec3(0.153125, 0.0, -0.246875);
  p.I_b << 10.65103875, 0.0, -0.38671875,
           0.0, 14.5234375, 0.0,
           -0.38671875, 0.0, 14.13671875;
  p.X_udot = -5.5;
  p.Y_vdot = -82.5;
  p.Z_wdot = -55.0;
  p.K_pdot = -3.105364;
  p.M_qdot = -17.02;
  p.N_rdot = -27.22125;
  p.d_lin << 77.5544323, 20.0, 605.4038838, 53.6988367, 208.3602198, 43.23375;
  p.d_quad << 23.0, 440.0, 0.0, 0.0, 0.0, 432.3375;
  p.displaced_volume = 0.0780487805;
  p.GM_T = 1.2325002450;
  p.GM_L = 2.2570884146;
  p.heave_stiffness = 7541.4375;
  p.tau_X_max = 239.364;
  p.tau_N_max = 73.62405;
  return p;
}

// Sea state 4 reference wave.
inline WaveParams reference_wave() {
  WaveParams w;
  w.H_w = 1.75;
  w.lambda = 35.0;
  w.T_w = 6.0;
  return w;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20260808u);
  return gen;
}

}  // namespace usv::test
