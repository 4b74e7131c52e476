#include "sct/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "sct/common.hpp"
#include "sct/fourier.hpp"
#include "sct/margin.hpp"

namespace sct {

namespace {

constexpr double kPi = std::numbers::pi;

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

// Random Hermitian-symmetric coefficient grid (real synthesis).
CoeffGrid random_hermitian(Rng& rng, int K1, int K2, double amp) {
    CoeffGrid g(K1, K2);
    for (int k1 = 0; k1 <= K1; ++k1)
        for (int k2 = -K2; k2 <= K2; ++k2) {
            if (k1 == 0 && k2 < 0) continue;
            cplx v(amp * rng.sym(), amp * rng.sym());
            if (k1 == 0 && k2 == 0) v = cplx(v.real(), 0.0);
            g.at(k1, k2) = v;
            g.at(-k1, -k2) = std::conj(v);
        }
    return g;
}

// 20-point Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(std::vector<double>& xs, std::vector<double>& ws) {
    const int n = 20;
    xs.resize(n);
    ws.resize(n);
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (x * p0 - p1) / (x * x - 1.0);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

cplx quad_panels(const std::function<cplx(double)>& f, double a, double b, int panels) {
    std::vector<double> xs, ws;
    gauss_legendre(xs, ws);
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < xs.size(); ++i) acc += ws[i] * half * f(mid + half * xs[i]);
    }
    return acc;
}

// Complex linear solve by Gaussian elimination with partial pivoting.
std::vector<cplx> dense_solve(std::vector<std::vector<cplx>> A, std::vector<cplx> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(A[col][col]) == 0.0) throw NumericalError("dense solve: singular");
        for (size_t r = col + 1; r < n; ++r) {
            const cplx f = A[r][col] / A[col][col];
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (size_t i = n; i-- > 0;) {
        cplx acc = b[i];
        for (size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

CheckResult check_slack_label_identity() {
    Rng rng(11);
    const int K = 5, G = 32;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const CoeffGrid jc = random_hermitian(rng, K, K, 0.3);
        const CoeffGrid lc = random_hermitian(rng, K, K, 0.2);
        const auto j_grid = sample_grid(jc, G);
        const auto l_grid = sample_grid(lc, G);
        const double s0 = rng.sym();
        const SlackUpdate su = update_slack(j_grid, l_grid, s0, G, K, K);
        for (size_t i = 0; i < j_grid.size(); ++i) {
            const double rho = s0 - l_grid[i] - su.eps_grid[i];
            const double want = std::min(s0 - l_grid[i], j_grid[i]);
            worst = std::max(worst, std::abs(rho - want));
        }
    }
    return {"slack_label_identity", worst < 1e-9, worst, 1e-9};
}

CheckResult check_parseval() {
    Rng rng(22);
    const int K = 6, G = 4 * (2 * K + 1), L = 3;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        CoeffStack z, w;
        z.T = w.T = {2.0 * K + 1.0, 2.0 * K + 1.0};
        for (int l = 0; l < L; ++l) {
            z.ch.push_back(random_hermitian(rng, K, K, 0.5));
            w.ch.push_back(random_hermitian(rng, K, K, 0.5));
        }
        const CoeffGrid rho = random_hermitian(rng, K, K, 0.5);
        const ConfidenceMap j = evaluate_confidence(w, z);
        double fourier = 0.0;
        for (size_t i = 0; i < rho.size(); ++i)
            fourier += std::norm(j.c.c[i] - rho.c[i]);
        CoeffGrid resid = j.c;
        for (size_t i = 0; i < resid.size(); ++i) resid.c[i] -= rho.c[i];
        const auto grid = sample_grid(resid, G);
        double spatial = 0.0;
        for (const double v : grid) spatial += v * v;
        spatial /= static_cast<double>(G) * G;
        worst = std::max(worst, std::abs(spatial - fourier) / std::abs(fourier));
    }
    return {"parseval_data_term", worst < 1e-8, worst, 1e-8};
}

CheckResult check_gaussian_quadrature() {
    const double T = 32.0;
    const int K = 10;
    double worst = 0.0;
    for (const double sigma : {1.0, 2.0, 4.0}) {
        const double y0 = 0.37 * T;
        for (int k = -K; k <= K; ++k) {
            auto wrapped = [&](double t) -> cplx {
                double g = 0.0;
                for (int m = -8; m <= 8; ++m) {
                    const double d = t - y0 - m * T;
                    g += std::exp(-d * d / (2.0 * sigma * sigma));
                }
                return g * std::polar(1.0, -2.0 * kPi * k * t / T);
            };
            const cplx oracle = quad_panels(wrapped, 0.0, T, 64) / T;
            const double q = kPi * k / T;
            const cplx formula = std::polar(
                std::sqrt(2.0 * kPi * sigma * sigma) / T * std::exp(-2.0 * sigma * sigma * q * q),
                -2.0 * kPi * k * y0 / T);
            worst = std::max(worst, std::abs(oracle - formula));
        }
    }
    return {"gaussian_quadrature", worst < 1e-6, worst, 1e-6};
}

// Builds the dense normal matrix for one sample: diagonal data blocks plus
// Gamma^H Gamma assembled from the raw regularizer coefficients acting on
// the extended convolution support.
void build_dense_system(const CoeffStack& z, const CoeffGrid& rho,
                        const SpatialRegularizer& reg, double C, double alpha,
                        std::vector<std::vector<cplx>>& A, std::vector<cplx>& b) {
    const int K1 = z.ch[0].K1, K2 = z.ch[0].K2;
    const int m = (2 * K1 + 1) * (2 * K2 + 1);
    const size_t L = z.ch.size();
    const size_t n = L * m;
    A.assign(n, std::vector<cplx>(n, 0.0));
    b.assign(n, 0.0);
    for (size_t l = 0; l < L; ++l)
        for (size_t lp = 0; lp < L; ++lp)
            for (int i = 0; i < m; ++i)
                A[l * m + i][lp * m + i] +=
                    alpha * std::conj(z.ch[l].c[i]) * z.ch[lp].c[i];
    // Gamma rows live on the extended index set [-K-2, K+2]^2.
    const int E1 = K1 + reg.gamma.K1, E2 = K2 + reg.gamma.K2;
    const int rows = (2 * E1 + 1) * (2 * E2 + 1);
    std::vector<std::vector<cplx>> G(rows, std::vector<cplx>(m, 0.0));
    int r = 0;
    for (int e1 = -E1; e1 <= E1; ++e1)
        for (int e2 = -E2; e2 <= E2; ++e2, ++r)
            for (int k1 = -K1; k1 <= K1; ++k1)
                for (int k2 = -K2; k2 <= K2; ++k2) {
                    const int d1 = e1 - k1, d2 = e2 - k2;
                    if (std::abs(d1) > reg.gamma.K1 || std::abs(d2) > reg.gamma.K2) continue;
                    G[r][(k1 + K1) * (2 * K2 + 1) + (k2 + K2)] = reg.gamma.at(d1, d2);
                }
    for (size_t l = 0; l < L; ++l)
        for (int i = 0; i < m; ++i)
            for (int ip = 0; ip < m; ++ip) {
                cplx acc = 0.0;
                for (int rr = 0; rr < rows; ++rr) acc += std::conj(G[rr][i]) * G[rr][ip];
                A[l * m + i][l * m + ip] += acc / C;
            }
    for (size_t l = 0; l < L; ++l)
        for (int i = 0; i < m; ++i)
            b[l * m + i] = alpha * std::conj(z.ch[l].c[i]) * rho.c[i];
}

struct DenseInstance {
    CoeffStack z;
    SampleMemory mem;
    SpatialRegularizer reg;
    CoeffGrid rho;
    double C = 100.0;
};

DenseInstance make_dense_instance(uint64_t seed) {
    Rng rng(seed);
    DenseInstance inst;
    // Interpolated features of a random 8x8 two-channel map.
    FeatureMap fm;
    for (int l = 0; l < 2; ++l) {
        FeatureLayer layer;
        layer.rows = layer.cols = 8;
        layer.v.resize(64);
        for (auto& v : layer.v) v = rng.sym();
        fm.layers.push_back(std::move(layer));
    }
    const auto model = make_interpolation_model({{8, 8}, {8, 8}}, -0.75);
    inst.z = interpolate(fm, model);
    inst.reg = regularizer_coeffs(model.T, 4.0, 1e-2, 10.0);
    const GaussianLabel label =
        gaussian_fourier(1.0, model.T.t1 / 2.0, model.T.t2 / 2.0, model.T, model.K1, model.K2);
    inst.rho = build_label(1.0, loss_fourier(label), CoeffGrid(model.K1, model.K2));
    TrainingSample s;
    s.z = inst.z;
    s.alpha = 1.0;
    s.rho_hat = inst.rho;
    inst.mem.samples.push_back(std::move(s));
    return inst;
}

CheckResult check_dense_solve() {
    DenseInstance inst = make_dense_instance(33);
    NormalOperator op{&inst.mem, &inst.reg, inst.C};
    const CoeffStack b = op.rhs(inst.z);
    const CoeffStack w0 = zero_stack_like(inst.z);
    const CoeffStack w =
        solve_cg([&](const CoeffStack& x) { return op.apply(x); }, b, w0, 2000, 1e-10);

    std::vector<std::vector<cplx>> A;
    std::vector<cplx> bd;
    build_dense_system(inst.z, inst.rho, inst.reg, inst.C, 1.0, A, bd);
    const auto xd = dense_solve(std::move(A), std::move(bd));

    const int m = (2 * inst.z.ch[0].K1 + 1) * (2 * inst.z.ch[0].K2 + 1);
    double num = 0.0, den = 0.0;
    for (size_t l = 0; l < inst.z.ch.size(); ++l)
        for (int i = 0; i < m; ++i) {
            num += std::norm(w.ch[l].c[i] - xd[l * m + i]);
            den += std::norm(xd[l * m + i]);
        }
    const double rel = std::sqrt(num / den);
    return {"dense_cg_oracle", rel < 1e-6, rel, 1e-6};
}

CheckResult check_gradient() {
    DenseInstance inst = make_dense_instance(44);
    NormalOperator op{&inst.mem, &inst.reg, inst.C};
    Rng rng(55);
    CoeffStack w = zero_stack_like(inst.z);
    for (auto& g : w.ch)
        for (auto& v : g.c) v = cplx(0.2 * rng.sym(), 0.2 * rng.sym());
    const CoeffStack aw = op.apply(w);
    const CoeffStack b = op.rhs(w);

    const double h = 1e-5;
    double worst = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        const size_t l = rng.next() % w.ch.size();
        const size_t i = rng.next() % w.ch[l].size();
        const bool re = (rng.next() & 1) != 0;
        auto perturbed = [&](double d) {
            CoeffStack wp = w;
            wp.ch[l].c[i] += re ? cplx(d, 0.0) : cplx(0.0, d);
            return margin_objective(wp, inst.mem, inst.reg, inst.C);
        };
        const double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
        const cplx resid = aw.ch[l].c[i] - b.ch[l].c[i];
        const double analytic = 2.0 * inst.C * (re ? resid.real() : resid.imag());
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-6});
        worst = std::max(worst, std::abs(fd - analytic) / scale);
    }
    return {"gradient_check", worst < 1e-4, worst, 1e-4};
}

CheckResult check_interpolation(FaultInjection fault) {
    Rng rng(66);
    const int N = 8;
    const double T = static_cast<double>(N);
    const int K = 4096;
    std::vector<double> phi(N);
    for (auto& v : phi) v = rng.sym();
    auto b = kernel_fourier(N, K, -0.75);
    if (fault == FaultInjection::InterpPhase)
        for (auto& v : b) v = std::conj(v);  // injected fault: flipped phase sign
    // Periodically extended DFT of the samples.
    std::vector<cplx> xf(N);
    for (int k = 0; k < N; ++k)
        for (int n = 0; n < N; ++n)
            xf[k] += phi[n] * std::polar(1.0, -2.0 * kPi * k * n / N);
    auto series = [&](double t) {
        cplx acc = 0.0;
        for (int k = -K; k <= K; ++k)
            acc += xf[((k % N) + N) % N] * b[static_cast<size_t>(k + K)] *
                   std::polar(1.0, 2.0 * kPi * k * t / T);
        return acc.real();
    };
    auto direct = [&](double t) {
        double acc = 0.0;
        for (int n = 0; n < N; ++n)
            for (int m = -1; m <= 1; ++m) {
                const double u = t - (n + 0.5) * T / N - m * T;
                acc += phi[n] * cubic_kernel(u * N / T, -0.75);
            }
        return acc;
    };
    double worst = 0.0;
    for (int p = 0; p < 50; ++p) {
        const double t = T * rng.unit();
        worst = std::max(worst, std::abs(series(t) - direct(t)));
    }
    return {"interpolation_oracle", worst < 1e-6, worst, 1e-6};
}

}  // namespace

std::vector<CheckResult> run_selfchecks(FaultInjection fault) {
    std::vector<CheckResult> out;
    out.push_back(check_slack_label_identity());
    out.push_back(check_parseval());
    out.push_back(check_gaussian_quadrature());
    out.push_back(check_interpolation(fault));
    out.push_back(check_dense_solve());
    out.push_back(check_gradient());
    return out;
}

}  // namespace sct
