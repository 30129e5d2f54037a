// Compares the serial reference trial loop against the OpenMP one, and the
// scan kernels on top of them. Counts must match exactly; only time differs.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qiopa/cli.hpp"
#include "qiopa/detection_sim.hpp"

using namespace qiopa;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void bench_trials(std::uint64_t trials) {
  ExperimentSetup setup;
  setup.qubit = PolarizationQubit(1.0, 0.0);
  setup.g = GainParameter(0.1);
  setup.trials = trials;
  setup.master_seed = 12345;

  auto t0 = std::chrono::steady_clock::now();
  CoincidenceCounts serial = run_trials_serial(setup);
  double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  CoincidenceCounts parallel = run_trials(setup);
  double t_parallel = seconds_since(t0);

  bool match = serial.c1 == parallel.c1 && serial.c2 == parallel.c2;
  std::printf("trials %10llu | serial %8.3fs | openmp %8.3fs | speedup %5.2fx | counts %s\n",
              static_cast<unsigned long long>(trials), t_serial, t_parallel,
              t_serial / t_parallel, match ? "match" : "MISMATCH");
}

void bench_scan(int n_qubits) {
  OpaModel model(TruncationPolicy{});
  Pcg32 rng = substream(99, 0, 0);
  std::vector<PolarizationQubit> qubits;
  for (int i = 0; i < n_qubits; ++i) qubits.push_back(haar_random_qubit(rng));

  auto t0 = std::chrono::steady_clock::now();
  UniversalityScan scan = universality_scan(model, qubits, GainParameter(0.1),
                                            EvolutionOrder::full);
  double t = seconds_since(t0);
  std::printf("universality %6d qubits | %8.3fs | max dev F %.3e\n", n_qubits, t, scan.max_dev_F);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp not enabled; both paths run serially\n");
#endif
  for (std::uint64_t trials : {200000ULL, 1000000ULL, 4000000ULL}) bench_trials(trials);
  bench_scan(200);
  return 0;
}
