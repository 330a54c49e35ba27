// Times the OpenMP kernels against the serial reference and checks that
// both produce identical bytes. Run with OMP_NUM_THREADS to vary threads.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "anonet/kernels.hpp"
#include "anonet/rng.hpp"

using namespace anonet;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
    return m;
}

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() / reps;
}

struct Case {
    const char* name;
    std::function<void()> parallel;
    std::function<void()> serial;
    std::function<bool()> identical;
};

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled\n");
#endif

    RngStream rng(1);
    const std::size_t batch = 256, in_dim = 400, out_dim = 256;
    const Matrix a = random_matrix(batch, in_dim, rng);
    const Matrix w = random_matrix(in_dim, out_dim, rng);
    const Matrix g = random_matrix(batch, out_dim, rng);

    Matrix c_par, c_ser, wg_par, wg_ser, ig_par, ig_ser, s_par, s_ser;

    std::vector<Case> cases;
    cases.push_back({"matmul        (256x400 * 400x256)",
                     [&] { kernels::matmul(a, w, c_par); },
                     [&] { kernels::serial::matmul(a, w, c_ser); },
                     [&] { return c_par == c_ser; }});
    cases.push_back({"matmul_at_b   (weight gradients)  ",
                     [&] { kernels::matmul_at_b(a, g, wg_par); },
                     [&] { kernels::serial::matmul_at_b(a, g, wg_ser); },
                     [&] { return wg_par == wg_ser; }});
    cases.push_back({"matmul_a_bt   (input gradients)   ",
                     [&] { kernels::matmul_a_bt(g, w, ig_par); },
                     [&] { kernels::serial::matmul_a_bt(g, w, ig_ser); },
                     [&] { return ig_par == ig_ser; }});
    cases.push_back({"softmax_rows  (256x256)           ",
                     [&] { kernels::softmax_rows(g, s_par); },
                     [&] { kernels::serial::softmax_rows(g, s_ser); },
                     [&] { return s_par == s_ser; }});

    std::printf("%-38s %12s %12s %8s %s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup",
                "identical");
    bool all_identical = true;
    for (auto& c : cases) {
        const double t_ser = time_of(c.serial, 10);
        const double t_par = time_of(c.parallel, 10);
        const bool same = c.identical();
        all_identical = all_identical && same;
        std::printf("%-38s %12.3f %12.3f %7.2fx %s\n", c.name, t_ser * 1e3, t_par * 1e3,
                    t_ser / t_par, same ? "yes" : "NO");
    }
    return all_identical ? 0 : 1;
}
