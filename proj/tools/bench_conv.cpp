// Timing comparison between the serial reference conv kernels and the
// OpenMP variants. Not part of the test suite.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "rfreg/ops.hpp"
#include "rfreg/threading.hpp"

using namespace rfreg;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Case {
    int n, c_in, c_out, t, f, k;
};

void bench_case(const Case& cs, int reps) {
    std::mt19937_64 rng(7);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    Conv2dParams p{1, 1, (cs.k - 1) / 2, (cs.k - 1) / 2};
    std::vector<float> x(static_cast<std::size_t>(cs.n) * cs.c_in * cs.t * cs.f);
    std::vector<float> w(static_cast<std::size_t>(cs.c_out) * cs.c_in * cs.k * cs.k);
    std::vector<float> b(cs.c_out);
    for (auto& v : x) v = dist(rng);
    for (auto& v : w) v = dist(rng);
    auto [ot, of] = conv2d_output_dims(cs.t, cs.f, cs.k, cs.k, p);
    std::vector<float> y_serial(static_cast<std::size_t>(cs.n) * cs.c_out * ot * of);
    std::vector<float> y_omp(y_serial.size());
    std::vector<float> gy(y_serial.size(), 1.0f);
    std::vector<float> gx(x.size()), gw(w.size()), gb(b.size());

    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        conv2d_forward_serial(x.data(), cs.n, cs.c_in, cs.t, cs.f, w.data(), b.data(), cs.c_out, cs.k, cs.k,
                              p, y_serial.data());
    double fwd_serial = ms_since(t0) / reps;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        conv2d_forward_omp(x.data(), cs.n, cs.c_in, cs.t, cs.f, w.data(), b.data(), cs.c_out, cs.k, cs.k, p,
                           y_omp.data());
    double fwd_omp = ms_since(t0) / reps;

    bool identical = y_serial == y_omp;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        conv2d_backward_serial(x.data(), cs.n, cs.c_in, cs.t, cs.f, w.data(), cs.c_out, cs.k, cs.k, p,
                               gy.data(), gx.data(), gw.data(), gb.data());
    double bwd_serial = ms_since(t0) / reps;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
        conv2d_backward_omp(x.data(), cs.n, cs.c_in, cs.t, cs.f, w.data(), cs.c_out, cs.k, cs.k, p, gy.data(),
                            gx.data(), gw.data(), gb.data());
    double bwd_omp = ms_since(t0) / reps;

    std::printf("%2dx%3dx%3dx%3dx%3d k=%d  fwd %8.2f / %8.2f ms  bwd %8.2f / %8.2f ms  speedup %.2fx  %s\n",
                cs.n, cs.c_in, cs.c_out, cs.t, cs.f, cs.k, fwd_serial, fwd_omp, bwd_serial, bwd_omp,
                (fwd_serial + bwd_serial) / (fwd_omp + bwd_omp), identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads=%d  (serial / omp)\n", num_threads());
    bench_case({4, 16, 16, 64, 64, 3}, 5);
    bench_case({8, 32, 32, 32, 32, 3}, 5);
    bench_case({2, 64, 64, 24, 24, 5}, 5);
    bench_case({16, 2, 32, 48, 48, 5}, 5);
    return 0;
}
