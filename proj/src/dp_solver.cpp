#include "impactflow/dp_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "impactflow/detail/golden.hpp"
#include "impactflow/detail/threads.hpp"
#include "impactflow/errors.hpp"

namespace impactflow {

namespace {

constexpr double kRefineTol = 1e-10;

// Coefficients of the one-step cost I(psi) = a*psi^2 + c*log1p(b*psi^2).
// Everything that evaluates I goes through this one helper so the solver,
// step_cost, and any re-check agree bit for bit.
struct CostCoeffs {
  double a;
  double b;
  double c;
};

CostCoeffs cost_coeffs(const DpParams& params) {
  const auto n = static_cast<double>(params.n);
  return {n * params.noise.gamma * params.impact.alpha0,
          n * n * params.impact.alpha0 * params.noise.beta1,
          params.noise.alpha1 / n};
}

inline double cost_eval(const CostCoeffs& cc, double psi) {
  const double psi2 = psi * psi;
  return cc.a * psi2 + cc.c * std::log1p(cc.b * psi2);
}

// Linear interpolation of one table row on the uniform holdings grid.
inline double interp_row(const double* f, const double* phi, std::int64_t m,
                         double phi_max, double x) {
  if (x <= 0.0) return f[0];
  if (x >= phi_max) return f[m];
  auto j = static_cast<std::int64_t>(x / phi_max * static_cast<double>(m));
  if (j >= m) j = m - 1;
  const double t = (x - phi[j]) / (phi[j + 1] - phi[j]);
  return f[j] + (f[j + 1] - f[j]) * t;
}

struct CellResult {
  double value;
  double psi;
};

// One-step maximization at grid node j against the previous layer.  Scans the
// sale sizes that land the continuation holdings exactly on grid nodes, then
// refines the bracketing cells by golden section.  `prev_max[j]` must hold
// max(fprev[0..j]); it feeds the scan cutoff:
//
//   every candidate obeys  obj(psi) <= exp(-I(psi)) * (psi + decay * prev_max[j]),
//
// and for psi > psi_crit = 1/sqrt(2a) the bound is strictly decreasing
// (I'(psi) >= 2*a*psi > 1/psi there), so once it drops below the incumbent
// the rest of the scan cannot win and is skipped.  Skipped candidates are
// strictly dominated, so pruning never changes the result.
CellResult optimize_cell(const CostCoeffs& cc, const double* phi, const double* fprev,
                         const double* prev_max, std::int64_t m, std::int64_t j,
                         double phi_max, double decay, double psi_crit,
                         const SolveOptions& opts) {
  const double phi_j = phi[j];
  const double cont_cap = decay * prev_max[j];

  double best_val = -1.0;
  double best_psi = 0.0;
  std::int64_t best_r = j;
  for (std::int64_t r = j; r >= 0; --r) {
    const double psi = phi_j - phi[r];
    const double weight = std::exp(-cost_eval(cc, psi));
    if (opts.prune && psi > psi_crit && weight * (psi + cont_cap) < best_val) break;
    const double val = weight * (psi + decay * fprev[r]);
    if (val > best_val) {
      best_val = val;
      best_psi = psi;
      best_r = r;
    }
  }

  if (opts.refine) {
    const double lo = best_r < j ? phi_j - phi[best_r + 1] : 0.0;
    const double hi = best_r > 0 ? phi_j - phi[best_r - 1] : phi_j;
    if (hi > lo) {
      auto objective = [&](double psi) {
        const double cont = interp_row(fprev, phi, m, phi_max, phi_j - psi);
        return std::exp(-cost_eval(cc, psi)) * (psi + decay * cont);
      };
      const auto [refined_psi, refined_val] = detail::golden_max(objective, lo, hi, kRefineTol);
      if (refined_val > best_val) {
        best_val = refined_val;
        best_psi = refined_psi;
      }
    }
  }
  return {best_val, best_psi};
}

DpSolution solve_impl(const DpParams& params, const SolveOptions& opts, bool parallel,
                      int threads) {
  params.validate();
  const std::int64_t m = params.resolved_grid_m();
  const std::int64_t row = m + 1;

  DpSolution sol;
  sol.params = params;
  sol.grid_m = m;
  sol.phi.resize(static_cast<std::size_t>(row));
  for (std::int64_t j = 0; j <= m; ++j) {
    sol.phi[static_cast<std::size_t>(j)] =
        j == m ? params.phi_max
               : params.phi_max * static_cast<double>(j) / static_cast<double>(m);
  }
  sol.value.assign(static_cast<std::size_t>((params.k_max + 1) * row), 0.0);
  sol.policy.assign(static_cast<std::size_t>((params.k_max + 1) * row), 0.0);

  const CostCoeffs cc = cost_coeffs(params);
  const double decay = std::exp(-params.mu_tilde / static_cast<double>(params.n));
  const double psi_crit =
      cc.a > 0.0 ? 1.0 / std::sqrt(2.0 * cc.a) : std::numeric_limits<double>::infinity();
  const double* phi = sol.phi.data();
  std::vector<double> prev_max(static_cast<std::size_t>(row));
  const int nthreads = detail::resolve_threads(threads);

  for (std::int64_t k = 1; k <= params.k_max; ++k) {
    const double* fprev = sol.value.data() + (k - 1) * row;
    double* fcur = sol.value.data() + k * row;
    double* pcur = sol.policy.data() + k * row;
    prev_max[0] = fprev[0];
    for (std::int64_t r = 1; r <= m; ++r) {
      prev_max[static_cast<std::size_t>(r)] =
          std::max(prev_max[static_cast<std::size_t>(r - 1)], fprev[r]);
    }
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
      for (std::int64_t j = 1; j <= m; ++j) {
        const CellResult cell =
            optimize_cell(cc, phi, fprev, prev_max.data(), m, j, params.phi_max, decay,
                          psi_crit, opts);
        fcur[j] = cell.value;
        pcur[j] = cell.psi;
      }
    } else {
      for (std::int64_t j = 1; j <= m; ++j) {
        const CellResult cell =
            optimize_cell(cc, phi, fprev, prev_max.data(), m, j, params.phi_max, decay,
                          psi_crit, opts);
        fcur[j] = cell.value;
        pcur[j] = cell.psi;
      }
    }
  }
  (void)nthreads;
  return sol;
}

}  // namespace

void DpParams::validate() const {
  if (n < 1) throw std::invalid_argument("DpParams: n must be >= 1");
  if (k_max < 0) throw std::invalid_argument("DpParams: k_max must be >= 0");
  if (!(mu_tilde >= 0.0) || !std::isfinite(mu_tilde)) {
    throw std::invalid_argument("DpParams: mu_tilde must be finite and >= 0");
  }
  impact.validate();
  if (impact.p != 2) {
    throw std::invalid_argument("DpParams: the dynamic program requires quadratic impact (p = 2)");
  }
  noise.validate();
  if (!(phi_max > 0.0) || !std::isfinite(phi_max)) {
    throw std::invalid_argument("DpParams: phi_max must be finite and > 0");
  }
  if (grid_m != 0 && grid_m < 2) {
    throw std::invalid_argument("DpParams: grid_m must be 0 (auto) or >= 2");
  }
  if (!drift_condition_holds(noise)) {
    throw DriftConditionError(
        "drift condition violated: gamma = " + std::to_string(noise.gamma) +
        " < alpha1*beta1/8 = " + std::to_string(noise.alpha1 * noise.beta1 / 8.0) +
        "; the impact-clock drift must dominate its noise for the deterministic reduction");
  }
}

std::int64_t DpParams::resolved_grid_m() const {
  if (grid_m > 0) return grid_m;
  const auto auto_m = static_cast<std::int64_t>(std::llround(20.0 * phi_max));
  return auto_m < 2 ? 2 : auto_m;
}

double DpSolution::value_at(std::int64_t k, double phi_query) const {
  if (k < 0 || k > params.k_max) {
    throw std::invalid_argument("DpSolution::value_at: k outside [0, k_max]");
  }
  const double tol = 1e-9 * std::max(1.0, params.phi_max);
  if (!(phi_query >= -tol) || phi_query > params.phi_max + tol) {
    throw std::invalid_argument("DpSolution::value_at: holdings " + std::to_string(phi_query) +
                                " outside the grid [0, " + std::to_string(params.phi_max) + "]");
  }
  const double x = std::min(std::max(phi_query, 0.0), params.phi_max);
  return interp_row(value.data() + k * (grid_m + 1), phi.data(), grid_m, params.phi_max, x);
}

double step_cost(double psi, const DpParams& params) {
  if (!(psi >= 0.0) || !std::isfinite(psi)) {
    throw std::invalid_argument("step_cost: psi must be finite and >= 0");
  }
  return cost_eval(cost_coeffs(params), psi);
}

DpSolution solve(const DpParams& params, int threads, const SolveOptions& options) {
  return solve_impl(params, options, true, threads);
}

DpSolution solve_reference(const DpParams& params, const SolveOptions& options) {
  return solve_impl(params, options, false, 1);
}

ExtractedStrategy extract_strategy(const DpSolution& solution, double phi0) {
  const DpParams& params = solution.params;
  const double tol = 1e-9 * std::max(1.0, params.phi_max);
  if (!(phi0 >= -tol) || phi0 > params.phi_max + tol) {
    throw std::invalid_argument("extract_strategy: phi0 outside the grid [0, " +
                                std::to_string(params.phi_max) + "]");
  }
  const std::int64_t m = solution.grid_m;
  const std::int64_t row = m + 1;
  const double* phi = solution.phi.data();
  const double dphi = params.phi_max / static_cast<double>(m);
  const CostCoeffs cc = cost_coeffs(params);
  const double decay = std::exp(-params.mu_tilde / static_cast<double>(params.n));

  ExtractedStrategy out;
  out.time.resize(static_cast<std::size_t>(params.k_max) + 1);
  out.sale.resize(static_cast<std::size_t>(params.k_max));
  out.rate.resize(static_cast<std::size_t>(params.k_max));
  out.holdings.resize(static_cast<std::size_t>(params.k_max) + 1);
  for (std::int64_t l = 0; l <= params.k_max; ++l) {
    out.time[static_cast<std::size_t>(l)] =
        static_cast<double>(l) / static_cast<double>(params.n);
  }

  double phi_cur = std::min(std::max(phi0, 0.0), params.phi_max);
  out.holdings[0] = phi_cur;
  for (std::int64_t l = 0; l < params.k_max; ++l) {
    const std::int64_t k = params.k_max - l;  // steps remaining before this sale
    const double* fprev = solution.value.data() + (k - 1) * row;
    double psi_star = 0.0;
    if (phi_cur > 0.0) {
      auto objective = [&](double psi) {
        const double cont = interp_row(fprev, phi, m, params.phi_max, phi_cur - psi);
        return std::exp(-cost_eval(cc, psi)) * (psi + decay * cont);
      };
      // Scan at the grid's own resolution, endpoints exact.
      const auto cells = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::ceil(phi_cur / dphi - 1e-12)));
      double best_val = -1.0;
      std::int64_t best_i = 0;
      for (std::int64_t i = 0; i <= cells; ++i) {
        const double psi = i == cells
                               ? phi_cur
                               : phi_cur * static_cast<double>(i) / static_cast<double>(cells);
        const double val = objective(psi);
        if (val > best_val) {
          best_val = val;
          best_i = i;
          psi_star = psi;
        }
      }
      const double lo =
          best_i > 0 ? phi_cur * static_cast<double>(best_i - 1) / static_cast<double>(cells)
                     : 0.0;
      const double hi = best_i < cells ? phi_cur * static_cast<double>(best_i + 1) /
                                             static_cast<double>(cells)
                                       : phi_cur;
      if (hi > lo) {
        const auto [refined_psi, refined_val] = detail::golden_max(objective, lo, hi, kRefineTol);
        if (refined_val > best_val) psi_star = refined_psi;
      }
    }
    out.sale[static_cast<std::size_t>(l)] = psi_star;
    out.rate[static_cast<std::size_t>(l)] = static_cast<double>(params.n) * psi_star;
    phi_cur = std::max(0.0, phi_cur - psi_star);
    out.holdings[static_cast<std::size_t>(l) + 1] = phi_cur;
  }
  return out;
}

double value_function(const DpSolution& solution, double t, double phi, double w, double s) {
  const double nt = static_cast<double>(solution.params.n) * t;
  const auto k = static_cast<std::int64_t>(std::llround(nt));
  if (std::fabs(nt - static_cast<double>(k)) > 1e-9 * std::max(1.0, std::fabs(nt))) {
    throw std::invalid_argument("value_function: t = " + std::to_string(t) +
                                " is not on the time grid (n = " +
                                std::to_string(solution.params.n) + ")");
  }
  if (k < 0 || k > solution.params.k_max) {
    throw std::invalid_argument("value_function: t outside the solved horizon");
  }
  return w + s * solution.value_at(k, phi);
}

double total_mi_cost(double value_at_phi, double phi, double s) {
  if (!(value_at_phi > 0.0)) throw std::invalid_argument("total_mi_cost: value must be > 0");
  if (!(phi > 0.0)) throw std::invalid_argument("total_mi_cost: phi must be > 0");
  if (!(s > 0.0)) throw std::invalid_argument("total_mi_cost: s must be > 0");
  return -std::log(value_at_phi / (phi * s));
}

}  // namespace impactflow
