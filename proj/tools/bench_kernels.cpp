// Compares the serial reference kernels against the OpenMP ones and checks
// they agree bitwise. Build target only; not part of the test suite.
#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ifnet/fokker_planck.hpp"
#include "ifnet/particle.hpp"

using namespace ifnet;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

SimConfig make_sim(std::uint32_t n) {
    SimConfig cfg;
    cfg.n_particles = n;
    cfg.dt = 1e-3;
    cfg.seed = 7;
    cfg.coeffs.lambda_hat = 1.0;
    cfg.coeffs.epsilon = 0.02;
    cfg.coeffs.delta = 0.3;
    cfg.coeffs.horizon = 10.0;
    cfg.coeffs.sigma.epsilon = 0.02;
    cfg.coeffs.theta = ThetaKernel::constant(2.0);
    return cfg;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP: %d thread(s)\n", omp_get_max_threads());
#else
    std::printf("OpenMP: disabled\n");
#endif

    // particle kernel
    for (std::uint32_t n : {10000u, 40000u}) {
        SimConfig cfg = make_sim(n);
        auto serial = init_system(cfg, 0);
        auto parallel = serial;
        const int steps = 200;

        auto t0 = clock_type::now();
        for (int s = 0; s < steps; ++s) euler_step_reference(serial, cfg, 0);
        const double t_serial = ms_since(t0);

        t0 = clock_type::now();
        for (int s = 0; s < steps; ++s) euler_step(parallel, cfg, 0);
        const double t_omp = ms_since(t0);

        bool equal = serial.voltages == parallel.voltages;
        std::printf("euler_step   N=%-6u serial %8.1f ms   omp %8.1f ms   speedup %.2fx   %s\n",
                    n, t_serial, t_omp, t_serial / t_omp, equal ? "bitwise-equal" : "MISMATCH");
    }

    // fokker-planck kernel
    {
        InitialLaws laws;
        DomainBox domain;
        ModelCoefficients c = make_sim(1).coeffs;
        auto serial = discretize_initial(laws, domain, 200, 400, 7);
        auto parallel = serial;
        const double dt = fp_max_dt(serial, c);
        const int steps = 400;

        auto t0 = clock_type::now();
        for (int s = 0; s < steps; ++s) fp_step_reference(serial, dt, c);
        const double t_serial = ms_since(t0);

        t0 = clock_type::now();
        for (int s = 0; s < steps; ++s) fp_step(parallel, dt, c);
        const double t_omp = ms_since(t0);

        bool equal = serial.rho == parallel.rho;
        std::printf("fp_step      M=200 K=400 serial %8.1f ms   omp %8.1f ms   speedup %.2fx   %s\n",
                    t_serial, t_omp, t_serial / t_omp, equal ? "bitwise-equal" : "MISMATCH");
    }
    return 0;
}
