#pragma once

// Independent oracles for the test suite: quadrature, brute-force spatial
// sums, dense solves. Nothing here reuses the library's computation paths
// beyond its data types.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "sct/fourier.hpp"
#include "sct/margin.hpp"

namespace oracle {

using sct::cplx;

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double sym() { return 2.0 * unit() - 1.0; }
};

// Composite 20-point Gauss-Legendre quadrature over [a, b].
cplx quad_panels(const std::function<cplx(double)>& f, double a, double b, int panels);

// (1/T) integral of b((t - T/(2N)) N / T) e^{-i 2 pi k t / T} over the
// kernel support, by quadrature subdivided at the kernel breakpoints.
cplx kernel_coeff_quadrature(int n_cells, int k, double T, double a);

// Fourier coefficient of the periodized Gaussian by quadrature.
cplx wrapped_gaussian_coeff(double sigma, double y0, double T, int k);

// Direct Eq.-style interpolation sum for a single layer: periodically
// wrapped kernel copies centered at half-cell offsets.
double interp_direct(const std::vector<double>& values, int rows, int cols, double T1,
                     double T2, double a, double t1, double t2);

sct::CoeffGrid random_hermitian(Rng& rng, int K1, int K2, double amp);
sct::CoeffStack random_stack(Rng& rng, int L, int K1, int K2, double amp);

// Discrete circular convolution of two G x G grids, scaled by 1/G^2.
std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b, int G);

// Dense assembly of the normal system for weighted samples (z_j, rho_j,
// alpha_j) with regularizer coefficients gamma and weight C, then a direct
// complex solve. Returns channel-major flattened coefficients.
struct DenseSample {
    const sct::CoeffStack* z;
    const sct::CoeffGrid* rho;
    double alpha;
};

void build_dense_system(const std::vector<DenseSample>& samples,
                        const sct::CoeffGrid& gamma, double C, int K1, int K2, int L,
                        std::vector<std::vector<cplx>>& A, std::vector<cplx>& b);

std::vector<cplx> dense_solve(std::vector<std::vector<cplx>> A, std::vector<cplx> b);

// Objective C sum_j alpha_j |Z_j w - rho_j|^2 + sum_l |gamma conv w|^2 with
// the regularizer convolution over its full extended support.
double objective_direct(const sct::CoeffStack& w, const std::vector<DenseSample>& samples,
                        const sct::CoeffGrid& gamma, double C);

}  // namespace oracle
