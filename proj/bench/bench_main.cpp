#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "latfold/lattice.hpp"
#include "latfold/potentials.hpp"
#include "latfold/solve.hpp"
#include "latfold/turn_ancilla.hpp"

using namespace latfold;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& f) {
  double t0 = now_ms();
  f();
  return now_ms() - t0;
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool same) {
  std::printf("%-34s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n",
              name.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              same ? "results match" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = argc > 1 && std::string(argv[1]) == "--quick";
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both columns run serially\n");
#endif

  {
    std::string seq = quick ? "HPHPPHHPH" : "HPHPPHHPHPH";
    auto P = InteractionMatrix::build(seq, PotentialTable::hp());
    SawResult serial_result, parallel_result;
    SawOptions serial_opts;
    serial_opts.parallel = false;
    double ts = time_ms(
        [&] { serial_result = saw_enumerate_serial(seq, P, LatticeKind::Cubic, serial_opts); });
    double tp =
        time_ms([&] { parallel_result = saw_enumerate(seq, P, LatticeKind::Cubic); });
    bool same = serial_result.min_energy == parallel_result.min_energy &&
                serial_result.walk_count == parallel_result.walk_count &&
                serial_result.minimizers.size() == parallel_result.minimizers.size();
    report("saw_enumerate n=" + std::to_string(seq.size()), ts, tp, same);
  }

  {
    std::string seq = quick ? "HPPHH" : "HHPHPH";
    auto P = InteractionMatrix::build(seq, PotentialTable::hp());
    EncodedProblem problem = turn_ancilla::encode(seq, P, LatticeKind::Cubic);
    const auto n = static_cast<std::uint32_t>(problem.num_vars());
    solve::ExhaustiveOptions serial_opts;
    serial_opts.parallel = false;
    solve::ExhaustiveResult a, b;
    double ts = time_ms(
        [&] { a = solve::exhaustive_solve(problem.hamiltonian, n, serial_opts); });
    double tp = time_ms([&] { b = solve::exhaustive_solve(problem.hamiltonian, n); });
    bool same = a.min_energy == b.min_energy && a.minimizers == b.minimizers;
    report("exhaustive_solve " + std::to_string(n) + " vars", ts, tp, same);
  }

  {
    std::string seq = "HPHPPHHPH";
    auto P = InteractionMatrix::build(seq, PotentialTable::hp());
    EncodedProblem problem = turn_ancilla::encode(seq, P, LatticeKind::Cubic);
    const auto n = static_cast<std::uint32_t>(problem.num_vars());
    int samples = quick ? 300 : 1500;
    solve::SaOptions sa;
    sa.seed = 11;
    sa.schedule = solve::resolve_schedule(problem.hamiltonian, {0.0, 0.0, 128});
    solve::SaOptions sa_serial = sa;
    sa_serial.parallel = false;
    std::vector<solve::Sample> a, b;
    double ts = time_ms(
        [&] { a = solve::simulated_annealing(problem.hamiltonian, n, samples, sa_serial); });
    double tp =
        time_ms([&] { b = solve::simulated_annealing(problem.hamiltonian, n, samples, sa); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].bits == b[i].bits;
    }
    report("simulated_annealing x" + std::to_string(samples), ts, tp, same);
  }

  return 0;
}
