#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "dira/kernels.hpp"
#include "dira/rng.hpp"

// Times the serial reference kernels against the OpenMP variants on the layer
// shapes used by the three experiment scales, and verifies that both produce
// bit-identical output on every shape.

using namespace dira;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_per_call(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto start = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    return elapsed.count() / reps;
}

void fill(std::vector<double>& v, Rng& rng) {
    for (double& x : v) x = rng.normal();
}

bool identical(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

int main() {
    const int batch = 40;
    // (state + code bits) -> hidden -> subsystems for the three scales
    const int shapes[3][3] = {{34, 2048, 8}, {34, 4096, 12}, {42, 6144, 16}};
    Rng rng(8675309);

    std::printf("%-18s %6s %12s %12s %9s %6s\n", "kernel", "hidden", "serial(us)",
                "parallel(us)", "speedup", "match");
    bool all_match = true;
    for (const auto& shape : shapes) {
        const int in_dim = shape[0], hidden = shape[1], out_dim = shape[2];
        std::vector<double> x(batch * in_dim), w1(hidden * in_dim), b1(hidden),
            h(batch * hidden), h_par(batch * hidden);
        std::vector<double> dy(batch * hidden), dx(batch * in_dim), dw(hidden * in_dim),
            db(hidden), dx_par(batch * in_dim), dw_par(hidden * in_dim), db_par(hidden);
        fill(x, rng);
        fill(w1, rng);
        fill(b1, rng);
        fill(dy, rng);

        const int reps = 50;
        const double fwd_serial = seconds_per_call(
            [&] {
                kernels::affine_forward_serial(x.data(), w1.data(), b1.data(), h.data(), batch,
                                               in_dim, hidden);
            },
            reps);
        const double fwd_parallel = seconds_per_call(
            [&] {
                kernels::affine_forward_parallel(x.data(), w1.data(), b1.data(), h_par.data(),
                                                 batch, in_dim, hidden);
            },
            reps);
        const bool fwd_match = identical(h, h_par);
        all_match = all_match && fwd_match;
        std::printf("%-18s %6d %12.1f %12.1f %8.2fx %6s\n", "affine_forward", hidden,
                    fwd_serial * 1e6, fwd_parallel * 1e6, fwd_serial / fwd_parallel,
                    fwd_match ? "yes" : "NO");

        const double bwd_serial = seconds_per_call(
            [&] {
                kernels::affine_backward_serial(x.data(), w1.data(), dy.data(), dx.data(),
                                                dw.data(), db.data(), batch, in_dim, hidden);
            },
            reps);
        const double bwd_parallel = seconds_per_call(
            [&] {
                kernels::affine_backward_parallel(x.data(), w1.data(), dy.data(), dx_par.data(),
                                                  dw_par.data(), db_par.data(), batch, in_dim,
                                                  hidden);
            },
            reps);
        const bool bwd_match =
            identical(dx, dx_par) && identical(dw, dw_par) && identical(db, db_par);
        all_match = all_match && bwd_match;
        std::printf("%-18s %6d %12.1f %12.1f %8.2fx %6s\n", "affine_backward", hidden,
                    bwd_serial * 1e6, bwd_parallel * 1e6, bwd_serial / bwd_parallel,
                    bwd_match ? "yes" : "NO");
    }
    if (!all_match) {
        std::printf("serial/parallel mismatch detected\n");
        return 1;
    }
    return 0;
}
