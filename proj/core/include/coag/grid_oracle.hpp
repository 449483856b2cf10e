#pragma once

#include <limits>
#include <span>
#include <vector>

#include "coag/fibre_dynamics.hpp"
#include "coag/model_geometry.hpp"

namespace coag {

/// Direct discretization of h(t, .) on a uniform grid whose unit delay is exactly
/// P = 1/dx cells.
struct GridState {
  ModelParams params;
  double x0 = 0.0;
  double dx = 1.0 / 256.0;
  int P = 256;
  std::vector<double> h;
  double t = 0.0;
  /// Value assumed left of the grid by the delay term. 0 for data vanishing on the
  /// left, the plateau for profile-type data (the plateau is a fixed point).
  double left_pad = 0.0;

  double x_at(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  double x_last() const noexcept { return x_at(h.size() - 1); }
};

/// Samples h0 on [x_left, x_right]; x_left is rounded down to a multiple of dx so grid
/// points align with integer offsets.
GridState make_grid_state(const InitialData& h0, double x_left, double x_right, double dx,
                          const ModelParams& params, double left_pad = 0.0);

struct GridOptions {
  /// Test hooks; with both disabled only the transport term remains.
  bool coagulation = true;
  bool linear_growth = true;
  double negative_tolerance = 1e-12;
};

/// One RK4 step of the method of lines. Transport and linear growth are upwinded
/// together from the right neighbour in conservative form; the delay is read at an
/// exact P-cell offset. Zero padding at both ends.
void step_grid(GridState& state, double dt, const GridOptions& options = {});

/// Steps with dt (the last step shortened) until state.t == horizon.
void evolve_grid(GridState& state, double horizon, double dt, const GridOptions& options = {});

/// Trapezoid weighted mass with the leakage flag.
WeightedMass grid_weighted_mass(const GridState& state);

/// Linear interpolation between grid points (exact at grid points); zero outside.
double grid_value_at(const GridState& state, double x);

struct FibreGridDiscrepancy {
  double sup = 0.0;
  /// (1/Q) sum over fibres and indices of e^{alpha x} |phi - h_grid|
  double weighted_l1 = 0.0;
  std::size_t points = 0;
  /// Fibre points that did not coincide with a grid node and were interpolated.
  std::size_t interpolated = 0;
};

/// Compares every fibre value phi_k with h_grid(t, k + 1 - psi) at points x >= x_min.
FibreGridDiscrepancy compare_with_fibres(const GridState& grid, std::span<const FibreState> fibres,
                                         double x_min = -std::numeric_limits<double>::infinity());

/// Tabulated solution in the original variables at tau = e^{alpha t}.
struct OriginalSnapshot {
  double tau = 1.0;
  std::vector<double> eta;
  std::vector<double> xi;
  std::vector<double> G;
  std::vector<double> F;
  /// int e^{alpha x} h dx
  double mass_h = 0.0;
  /// int xi F dxi, trapezoid in eta with dxi = xi ln2 deta. The substitution gives
  /// mass_original = (ln2 / alpha) mass_h, so the two agree only for gamma = 0.
  double mass_original = 0.0;
};

OriginalSnapshot to_original_variables(const GridState& state);

}  // namespace coag
