#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {
constexpr double kPi = std::numbers::pi;

void gauss_legendre_20(std::vector<double>& xs, std::vector<double>& ws) {
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

double keys_kernel(double t, double a) {
    const double x = std::abs(t);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

double keys_periodic(double t, double T_cells, double a) {
    // Kernel in cell units, wrapped with period T_cells.
    double acc = 0.0;
    for (int m = -1; m <= 1; ++m) acc += keys_kernel(t - m * T_cells, a);
    return acc;
}

}  // namespace

cplx quad_panels(const std::function<cplx(double)>& f, double a, double b, int panels) {
    std::vector<double> xs, ws;
    gauss_legendre_20(xs, ws);
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < xs.size(); ++i) acc += ws[i] * half * f(mid + half * xs[i]);
    }
    return acc;
}

cplx kernel_coeff_quadrature(int n_cells, int k, double T, double a) {
    const double cell = T / n_cells;
    const double shift = 0.5 * cell;
    // Kernel support [shift - 2 cell, shift + 2 cell]; split at the cubic's
    // breakpoints and resolve the oscillation of e^{-i 2 pi k t / T}.
    const int oscil = std::max(1, std::abs(k) / (2 * n_cells) + 1);
    cplx acc = 0.0;
    for (int piece = -2; piece < 2; ++piece) {
        const double lo = shift + piece * cell;
        const double hi = lo + cell;
        acc += quad_panels(
            [&](double t) {
                return keys_kernel((t - shift) / cell, a) *
                       std::polar(1.0, -2.0 * kPi * k * t / T);
            },
            lo, hi, 4 * oscil);
    }
    return acc / T;
}

cplx wrapped_gaussian_coeff(double sigma, double y0, double T, int k) {
    return quad_panels(
               [&](double t) -> cplx {
                   double g = 0.0;
                   for (int m = -8; m <= 8; ++m) {
                       const double d = t - y0 - m * T;
                       g += std::exp(-d * d / (2.0 * sigma * sigma));
                   }
                   return g * std::polar(1.0, -2.0 * kPi * k * t / T);
               },
               0.0, T, 96) /
           T;
}

double interp_direct(const std::vector<double>& values, int rows, int cols, double T1,
                     double T2, double a, double t1, double t2) {
    const double c1 = T1 / rows, c2 = T2 / cols;
    double acc = 0.0;
    for (int n1 = 0; n1 < rows; ++n1) {
        const double k1 = keys_periodic((t1 - (n1 + 0.5) * c1) / c1, rows, a);
        if (k1 == 0.0) continue;
        for (int n2 = 0; n2 < cols; ++n2) {
            const double k2 = keys_periodic((t2 - (n2 + 0.5) * c2) / c2, cols, a);
            acc += values[static_cast<size_t>(n1) * cols + n2] * k1 * k2;
        }
    }
    return acc;
}

sct::CoeffGrid random_hermitian(Rng& rng, int K1, int K2, double amp) {
    sct::CoeffGrid g(K1, K2);
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

sct::CoeffStack random_stack(Rng& rng, int L, int K1, int K2, double amp) {
    sct::CoeffStack s;
    s.T = {2.0 * K1 + 1.0, 2.0 * K2 + 1.0};
    for (int l = 0; l < L; ++l) s.ch.push_back(random_hermitian(rng, K1, K2, amp));
    return s;
}

std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b, int G) {
    std::vector<double> out(static_cast<size_t>(G) * G, 0.0);
    for (int g1 = 0; g1 < G; ++g1)
        for (int g2 = 0; g2 < G; ++g2) {
            double acc = 0.0;
            for (int n1 = 0; n1 < G; ++n1) {
                const int m1 = ((g1 - n1) % G + G) % G;
                for (int n2 = 0; n2 < G; ++n2) {
                    const int m2 = ((g2 - n2) % G + G) % G;
                    acc += a[static_cast<size_t>(n1) * G + n2] *
                           b[static_cast<size_t>(m1) * G + m2];
                }
            }
            out[static_cast<size_t>(g1) * G + g2] = acc / (static_cast<double>(G) * G);
        }
    return out;
}

void build_dense_system(const std::vector<DenseSample>& samples,
                        const sct::CoeffGrid& gamma, double C, int K1, int K2, int L,
                        std::vector<std::vector<cplx>>& A, std::vector<cplx>& b) {
    const int m = (2 * K1 + 1) * (2 * K2 + 1);
    const size_t n = static_cast<size_t>(L) * m;
    A.assign(n, std::vector<cplx>(n, 0.0));
    b.assign(n, 0.0);
    for (const auto& s : samples) {
        for (int l = 0; l < L; ++l)
            for (int lp = 0; lp < L; ++lp)
                for (int i = 0; i < m; ++i)
                    A[static_cast<size_t>(l) * m + i][static_cast<size_t>(lp) * m + i] +=
                        s.alpha * std::conj(s.z->ch[l].c[i]) * s.z->ch[lp].c[i];
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < m; ++i)
                b[static_cast<size_t>(l) * m + i] +=
                    s.alpha * std::conj(s.z->ch[l].c[i]) * s.rho->c[i];
    }
    // Gamma^H Gamma over the extended convolution support, per channel.
    const int E1 = K1 + gamma.K1, E2 = K2 + gamma.K2;
    std::vector<std::vector<cplx>> G((2 * E1 + 1) * (2 * E2 + 1),
                                     std::vector<cplx>(m, 0.0));
    int r = 0;
    for (int e1 = -E1; e1 <= E1; ++e1)
        for (int e2 = -E2; e2 <= E2; ++e2, ++r)
            for (int k1 = -K1; k1 <= K1; ++k1)
                for (int k2 = -K2; k2 <= K2; ++k2) {
                    const int d1 = e1 - k1, d2 = e2 - k2;
                    if (std::abs(d1) > gamma.K1 || std::abs(d2) > gamma.K2) continue;
                    G[r][(k1 + K1) * (2 * K2 + 1) + (k2 + K2)] = gamma.at(d1, d2);
                }
    for (int l = 0; l < L; ++l)
        for (int i = 0; i < m; ++i)
            for (int ip = 0; ip < m; ++ip) {
                cplx acc = 0.0;
                for (size_t rr = 0; rr < G.size(); ++rr)
                    acc += std::conj(G[rr][i]) * G[rr][ip];
                A[static_cast<size_t>(l) * m + i][static_cast<size_t>(l) * m + ip] +=
                    acc / C;
            }
}

std::vector<cplx> dense_solve(std::vector<std::vector<cplx>> A, std::vector<cplx> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r2 = col + 1; r2 < n; ++r2)
            if (std::abs(A[r2][col]) > std::abs(A[piv][col])) piv = r2;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(A[col][col]) == 0.0) throw std::runtime_error("singular system");
        for (size_t r2 = col + 1; r2 < n; ++r2) {
            const cplx f = A[r2][col] / A[col][col];
            for (size_t c2 = col; c2 < n; ++c2) A[r2][c2] -= f * A[col][c2];
            b[r2] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (size_t i = n; i-- > 0;) {
        cplx acc = b[i];
        for (size_t c2 = i + 1; c2 < n; ++c2) acc -= A[i][c2] * x[c2];
        x[i] = acc / A[i][i];
    }
    return x;
}

double objective_direct(const sct::CoeffStack& w, const std::vector<DenseSample>& samples,
                        const sct::CoeffGrid& gamma, double C) {
    const int K1 = w.ch[0].K1, K2 = w.ch[0].K2;
    const int m = (2 * K1 + 1) * (2 * K2 + 1);
    double data = 0.0;
    for (const auto& s : samples)
        for (int i = 0; i < m; ++i) {
            cplx acc = -s.rho->c[i];
            for (size_t l = 0; l < w.ch.size(); ++l) acc += s.z->ch[l].c[i] * w.ch[l].c[i];
            data += s.alpha * std::norm(acc);
        }
    double reg = 0.0;
    for (const auto& ws : w.ch)
        for (int e1 = -K1 - gamma.K1; e1 <= K1 + gamma.K1; ++e1)
            for (int e2 = -K2 - gamma.K2; e2 <= K2 + gamma.K2; ++e2) {
                cplx acc = 0.0;
                for (int d1 = -gamma.K1; d1 <= gamma.K1; ++d1) {
                    const int m1 = e1 - d1;
                    if (std::abs(m1) > K1) continue;
                    for (int d2 = -gamma.K2; d2 <= gamma.K2; ++d2) {
                        const int m2 = e2 - d2;
                        if (std::abs(m2) > K2) continue;
                        acc += gamma.at(d1, d2) * ws.at(m1, m2);
                    }
                }
                reg += std::norm(acc);
            }
    return C * data + reg;
}

}  // namespace oracle
