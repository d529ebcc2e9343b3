// Timing comparison of the OpenMP kernels against their serial reference
// implementations, plus a bit-identity check between the two.
//
// Usage: impactflow_bench [threads]   (default: all cores)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "impactflow/dp_solver.hpp"
#include "impactflow/experiments.hpp"
#include "impactflow/market_sim.hpp"

using namespace impactflow;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* kernel, double serial_s, double parallel_s, bool identical) {
  std::printf("%-12s %10.3fs %10.3fs %8.2fx   %s\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
  std::printf("%-12s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    DpParams params;
    params.n = 500;
    params.k_max = 500;
    params.phi_max = 100.0;
    params.noise = {1.0, 1.0, 2.0};

    auto start = std::chrono::steady_clock::now();
    const DpSolution serial = solve_reference(params);
    const double serial_s = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const DpSolution parallel = solve(params, threads);
    const double parallel_s = seconds_since(start);

    const bool identical =
        std::memcmp(serial.value.data(), parallel.value.data(),
                    serial.value.size() * sizeof(double)) == 0 &&
        std::memcmp(serial.policy.data(), parallel.policy.data(),
                    serial.policy.size() * sizeof(double)) == 0;
    report("dp solve", serial_s, parallel_s, identical);
  }

  {
    SimConfig config;
    config.market = MarketSpec::from_mu_tilde(0.05, 0.1);
    config.impact = {2, 0.01};
    config.noise = {1.0, 1.0, 2.0};
    config.phi0 = 10.0;
    config.steps = 500;
    const Strategy strategy = Strategy::constant(8.0, 1.0);
    const std::int64_t paths = 200000;

    auto start = std::chrono::steady_clock::now();
    const McResult serial =
        mc_expected_utility_reference(config, strategy, risk_neutral_utility, paths, 42);
    const double serial_s = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const McResult parallel =
        mc_expected_utility(config, strategy, risk_neutral_utility, paths, 42, threads);
    const double parallel_s = seconds_since(start);

    const bool identical = serial.estimate == parallel.estimate &&
                           serial.standard_error == parallel.standard_error;
    report("mc paths", serial_s, parallel_s, identical);
  }
  return 0;
}
