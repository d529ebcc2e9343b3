#pragma once

#include <cstdint>
#include <vector>

#include "impactflow/impact_model.hpp"

namespace impactflow {

// ===== Backward dynamic program for optimal liquidation, quadratic impact =====
//
// Discrete deterministic control problem: k remaining steps of length 1/n, a
// trader holding phi sells psi in one step, pays the impact cost exponent
// I(psi), and the remainder is discounted by exp(-mu_tilde/n):
//
//   f_k(phi) = max over psi in [0, phi] of
//                exp(-I(psi)) * (psi + exp(-mu_tilde/n) * f_{k-1}(phi - psi)),
//   f_0 = 0,
//
// with I(psi) = n*gamma*alpha0*psi^2 + (alpha1/n) * log(n^2*alpha0*beta1*psi^2 + 1).
// The risk-neutral value of the execution problem is then w + s * f_{[n t]}(phi).

struct DpParams {
  std::int64_t n = 500;      ///< time resolution, steps per unit time
  std::int64_t k_max = 500;  ///< number of backward steps, [n * t]
  double mu_tilde = 0.05;    ///< effective drift mu - sigma^2/2
  ImpactSpec impact;         ///< must be quadratic (p = 2)
  SubordinatorSpec noise;
  double phi_max = 1.0;      ///< holdings grid upper end
  std::int64_t grid_m = 0;   ///< grid cells M; 0 picks round(20 * phi_max)

  /// Throws std::invalid_argument on malformed fields, DriftConditionError
  /// when gamma < alpha1 * beta1 / 8 (the reduction to a deterministic
  /// problem needs the drift of the impact clock to dominate its noise).
  void validate() const;

  std::int64_t resolved_grid_m() const;
};

struct SolveOptions {
  bool refine = true;  ///< golden-section refinement around the scan optimum
  bool prune = true;   ///< stop the scan once the tail is provably dominated
};

struct DpSolution {
  DpParams params;
  std::int64_t grid_m = 0;
  std::vector<double> phi;     ///< grid_m + 1 holdings nodes on [0, phi_max]
  std::vector<double> value;   ///< f[k][j], (k_max+1) rows of (grid_m+1)
  std::vector<double> policy;  ///< psi*[k][j], optimal one-step sale per cell

  double node_value(std::int64_t k, std::int64_t j) const {
    return value[static_cast<std::size_t>(k * (grid_m + 1) + j)];
  }
  double node_policy(std::int64_t k, std::int64_t j) const {
    return policy[static_cast<std::size_t>(k * (grid_m + 1) + j)];
  }

  /// f at k remaining steps and arbitrary holdings, linear in phi between
  /// grid nodes.  Throws std::invalid_argument outside [0, phi_max] or for
  /// k outside [0, k_max].
  double value_at(std::int64_t k, double phi_query) const;
};

/// One-step impact cost exponent I(psi); 0 at psi = 0, increasing in psi.
double step_cost(double psi, const DpParams& params);

/// Fill the value and policy tables by backward recursion.  Cells within a
/// time layer are independent and are computed in parallel (threads <= 0
/// uses all cores); the result is bit-identical to solve_reference for any
/// thread count, and with pruning on or off.
DpSolution solve(const DpParams& params, int threads = 0, const SolveOptions& options = {});

/// Serial implementation of the same recursion, kept as the reference the
/// parallel kernel is tested against.
DpSolution solve_reference(const DpParams& params, const SolveOptions& options = {});

/// Optimal sale schedule read out of a solved table by a forward pass from
/// initial holdings phi0.  Step l re-optimizes the one-step problem at the
/// exact (generally off-grid) current holdings against the interpolated
/// layer k_max - l - 1, which avoids interpolating the policy table.
struct ExtractedStrategy {
  std::vector<double> time;      ///< l / n, size k_max + 1
  std::vector<double> sale;      ///< psi_l sold in step l, size k_max
  std::vector<double> rate;      ///< zeta_l = n * psi_l, size k_max
  std::vector<double> holdings;  ///< phi_l before step l, size k_max + 1
};

ExtractedStrategy extract_strategy(const DpSolution& solution, double phi0);

/// Risk-neutral value V = w + s * f_{[n t]}(phi).  t must lie on the time
/// grid (n * t within 1e-9 of an integer in [0, k_max]).
double value_function(const DpSolution& solution, double t, double phi, double w, double s);

/// Total cost of market impact relative to frictionless liquidation,
/// TC = -log(value / (phi * s)).  Rejects non-positive inputs.
double total_mi_cost(double value_at_phi, double phi, double s);

}  // namespace impactflow
