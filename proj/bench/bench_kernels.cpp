// Times the OpenMP kernels against their serial references and checks that both
// produce identical output.
//
//   bench_kernels [grid_side] [repeats]

#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <omp.h>

#include "sfg/encoder.hpp"
#include "sfg/field.hpp"
#include "sfg/robustness.hpp"

namespace {

template <typename Fn>
double best_of(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool same) {
    std::printf("%-22s serial %9.3f ms  omp %9.3f ms  speedup %5.2fx  %s\n", name, serial_s * 1e3, parallel_s * 1e3,
                serial_s / parallel_s, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t side = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1024;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    const sfg::GridDims dims{side, side};
    const double s = double(side);
    const sfg::PointSet eps{{0.1 * s, 0.5 * s}, {0.9 * s, 0.45 * s}, {0.5 * s, 0.15 * s}, {0.55 * s, 0.85 * s}};
    const sfg::ClickSet clicks{{{0.5 * s, 0.5 * s}}, {{0.3 * s, 0.3 * s}}};
    const sfg::SFGParams params;

    std::printf("grid %zux%zu, %d threads, best of %d\n", side, side, omp_get_max_threads(), repeats);

    sfg::ScalarField a, b;
    double ts = best_of(repeats, [&] { a = sfg::serial::rasterize_potential(eps, dims); });
    double tp = best_of(repeats, [&] { b = sfg::rasterize_potential(eps, dims); });
    report("rasterize_potential", ts, tp, a == b);

    ts = best_of(repeats, [&] { a = sfg::serial::rasterize_gaussian(eps, params.sigma, dims); });
    tp = best_of(repeats, [&] { b = sfg::rasterize_gaussian(eps, params.sigma, dims); });
    report("rasterize_gaussian", ts, tp, a == b);

    ts = best_of(repeats, [&] { a = sfg::serial::encode(eps, clicks, params, dims); });
    tp = best_of(repeats, [&] { b = sfg::encode(eps, clicks, params, dims); });
    report("encode", ts, tp, a == b);

    const sfg::RobustnessConfig cfg{"square", {{206, 206}, {206, 306}, {306, 206}, {306, 306}}};
    sfg::RobustnessReport ra, rb;
    ts = best_of(repeats, [&] { ra = sfg::serial::run_robustness(cfg, 10000, 10.0, 7); });
    tp = best_of(repeats, [&] { rb = sfg::run_robustness(cfg, 10000, 10.0, 7); });
    report("run_robustness (1e4)", ts, tp,
           ra.mean_annotation_error == rb.mean_annotation_error &&
               ra.mean_focal_perturbation == rb.mean_focal_perturbation);
    return 0;
}
