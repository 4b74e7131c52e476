#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "sct/features.hpp"
#include "sct/fft.hpp"

namespace sct {

// Period of the continuous domain, in cell units, per spatial dimension
// (t1 runs over rows, t2 over columns).
struct Period {
    double t1 = 0.0;
    double t2 = 0.0;
};

// Truncated Fourier-series coefficients of one real T-periodic channel,
// indices k1 in [-K1, K1] x k2 in [-K2, K2], row-major.
struct CoeffGrid {
    int K1 = 0;
    int K2 = 0;
    std::vector<cplx> c;

    CoeffGrid() = default;
    CoeffGrid(int k1, int k2)
        : K1(k1), K2(k2), c(static_cast<size_t>(2 * k1 + 1) * (2 * k2 + 1)) {}

    int n1() const { return 2 * K1 + 1; }
    int n2() const { return 2 * K2 + 1; }
    size_t size() const { return c.size(); }

    cplx& at(int k1, int k2) {
        return c[static_cast<size_t>(k1 + K1) * n2() + (k2 + K2)];
    }
    cplx at(int k1, int k2) const {
        return c[static_cast<size_t>(k1 + K1) * n2() + (k2 + K2)];
    }
    bool same_shape(const CoeffGrid& o) const { return K1 == o.K1 && K2 == o.K2; }
};

// Multi-channel coefficient set on a common index set and period.
struct CoeffStack {
    Period T;
    std::vector<CoeffGrid> ch;

    size_t channels() const { return ch.size(); }
    bool same_shape(const CoeffStack& o) const;
};

CoeffStack zero_stack_like(const CoeffStack& s);

// Real inner product sum_k re(conj(u) v) over all channels.
double dot_re(const CoeffStack& u, const CoeffStack& v);
// y += a * x
void axpy(double a, const CoeffStack& x, CoeffStack& y);
void scale(double a, CoeffStack& x);
double norm(const CoeffStack& x);

bool is_hermitian(const CoeffGrid& g, double tol);
bool all_finite(const CoeffStack& s);

// The Keys cubic convolution kernel (support [-2, 2], parameter a) and its
// continuous Fourier transform, evaluated analytically.
double cubic_kernel(double t, double a);
double cubic_kernel_ft(double f, double a);

// Fourier-series coefficients of the periodically summed, half-cell shifted
// interpolation kernel for a layer of n_cells samples:
//   b[k] = (1/n) exp(-i pi k / n) bhat(k / n),  k in [-K, K].
std::vector<cplx> kernel_fourier(int n_cells, int K, double a);

// Per-layer interpolation spectra on the common index set. Entries beyond a
// layer's band limit are zero so coarse layers pad automatically.
struct LayerModel {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> brow;  // [-K1..K1]
    std::vector<cplx> bcol;  // [-K2..K2]
};

struct InterpolationModel {
    Period T;
    int K1 = 0;
    int K2 = 0;
    double kernel_a = -0.75;
    std::vector<LayerModel> layers;
};

// Builds the model for a set of layer resolutions (rows, cols). The common
// index set comes from the finest layer: K = floor((N_max - 1) / 2); each
// layer is band-limited to floor((N_l - 1) / 2) per dimension.
InterpolationModel make_interpolation_model(
    const std::vector<std::pair<int, int>>& resolutions, double a);

// Maps a discrete feature map to Fourier coefficients of its continuous
// interpolation: Z[k] = DFT(x)[k mod N] * brow[k1] * bcol[k2].
CoeffStack interpolate(const FeatureMap& fm, const InterpolationModel& model);

// Single-channel confidence coefficients j[k] = sum_l w[k] z[k].
struct ConfidenceMap {
    Period T;
    CoeffGrid c;
};

ConfidenceMap evaluate_confidence(const CoeffStack& w, const CoeffStack& z);

// Evaluates the T-periodic series on the regular G x G grid t = g T / G via
// zero-padded inverse DFT. Requires G >= 2K+1. Non-negligible imaginary
// residue reports an internal consistency error.
std::vector<double> sample_grid(const CoeffGrid& c, int G);
std::vector<double> sample_grid(const ConfidenceMap& c, int G);

// Value of the series at an arbitrary point.
double eval_at(const CoeffGrid& c, const Period& T, double t1, double t2);

// Value plus analytic gradient (g1, g2) and Hessian (h11, h12, h22) of the
// series, as used by the Newton refinement.
struct SeriesDerivatives {
    double value = 0.0;
    double g1 = 0.0, g2 = 0.0;
    double h11 = 0.0, h12 = 0.0, h22 = 0.0;
};

SeriesDerivatives eval_derivatives(const CoeffGrid& c, const Period& T, double t1,
                                   double t2);

struct PointValue {
    double t1 = 0.0;
    double t2 = 0.0;
    double value = 0.0;
};

// Coarse grid argmax followed by Newton refinement on the trigonometric
// polynomial. Grid ties break to the lowest (row, column) index.
PointValue argmax_subgrid(const ConfidenceMap& c, int G, int iters);

// Periodic Gaussian with peak 1 at (y1, y2), separable coefficients
//   m[k] = (sqrt(2 pi s^2)/T) exp(-2 s^2 (pi k / T)^2 - i 2 pi k y / T)
// per dimension.
struct GaussianLabel {
    double sigma = 1.0;
    double y1 = 0.0;
    double y2 = 0.0;
    Period T;
    CoeffGrid c;
};

GaussianLabel gaussian_fourier(double sigma, double y1, double y2, const Period& T,
                               int K1, int K2);

// Loss coefficients of l = 1 - m.
CoeffGrid loss_fourier(const GaussianLabel& label);

// Binary dump of a coefficient stack: 16-byte header (magic "LMSC", u32 K1,
// u32 K2, u32 L) followed by interleaved (re, im) little-endian f64.
void write_coeff_dump(const std::string& path, const CoeffStack& s);

}  // namespace sct
