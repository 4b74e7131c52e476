#include "sct/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "sct/common.hpp"

namespace sct {

namespace {
constexpr double kPi = std::numbers::pi;

int wrap_index(int k, int n) {
    int m = k % n;
    return m < 0 ? m + n : m;
}
}  // namespace

bool CoeffStack::same_shape(const CoeffStack& o) const {
    if (ch.size() != o.ch.size()) return false;
    for (size_t l = 0; l < ch.size(); ++l)
        if (!ch[l].same_shape(o.ch[l])) return false;
    return true;
}

CoeffStack zero_stack_like(const CoeffStack& s) {
    CoeffStack out;
    out.T = s.T;
    out.ch.reserve(s.ch.size());
    for (const auto& g : s.ch) out.ch.emplace_back(g.K1, g.K2);
    return out;
}

double dot_re(const CoeffStack& u, const CoeffStack& v) {
    if (!u.same_shape(v)) throw ArgumentError("dot_re: shape mismatch");
    double acc = 0.0;
    for (size_t l = 0; l < u.ch.size(); ++l) {
        const auto& a = u.ch[l].c;
        const auto& b = v.ch[l].c;
        for (size_t i = 0; i < a.size(); ++i)
            acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    }
    return acc;
}

void axpy(double a, const CoeffStack& x, CoeffStack& y) {
    if (!x.same_shape(y)) throw ArgumentError("axpy: shape mismatch");
    for (size_t l = 0; l < x.ch.size(); ++l) {
        const auto& xs = x.ch[l].c;
        auto& ys = y.ch[l].c;
        for (size_t i = 0; i < xs.size(); ++i) ys[i] += a * xs[i];
    }
}

void scale(double a, CoeffStack& x) {
    for (auto& g : x.ch)
        for (auto& v : g.c) v *= a;
}

double norm(const CoeffStack& x) { return std::sqrt(dot_re(x, x)); }

bool is_hermitian(const CoeffGrid& g, double tol) {
    for (int k1 = -g.K1; k1 <= g.K1; ++k1)
        for (int k2 = -g.K2; k2 <= g.K2; ++k2)
            if (std::abs(g.at(k1, k2) - std::conj(g.at(-k1, -k2))) > tol) return false;
    return true;
}

bool all_finite(const CoeffStack& s) {
    for (const auto& g : s.ch)
        for (const auto& v : g.c)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double cubic_kernel(double t, double a) {
    const double x = std::abs(t);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

double cubic_kernel_ft(double f, double a) {
    const double af = std::abs(f);
    if (af < 0.05) {
        // Taylor branch; the closed form cancels catastrophically near 0.
        const double u = kPi * kPi * f * f;
        double acc = 1.0;
        acc += u * (-4.0 * (2.0 * a + 1.0) / 15.0);
        acc += u * u * ((16.0 * a + 1.0) / 35.0);
        acc += u * u * u * (-8.0 * (87.0 * a + 1.0) / 4725.0);
        acc += u * u * u * u * (2.0 * (2056.0 * a + 5.0) / 155925.0);
        return acc;
    }
    const double w2 = 2.0 * kPi * f;
    const double w4 = 4.0 * kPi * f;
    const double num = -8.0 * kPi * a * f * std::sin(w2) - 2.0 * kPi * a * f * std::sin(w4)
                       - 3.0 * a * std::cos(w4) + 3.0 * a - 6.0 * kPi * f * std::sin(w2)
                       - 6.0 * std::cos(w2) + 6.0;
    const double d = kPi * f;
    return num / (4.0 * d * d * d * d);
}

std::vector<cplx> kernel_fourier(int n_cells, int K, double a) {
    if (n_cells < 1) throw ArgumentError("kernel_fourier: n_cells must be >= 1");
    if (K < 0) throw ArgumentError("kernel_fourier: K must be >= 0");
    std::vector<cplx> b(static_cast<size_t>(2 * K + 1));
    for (int k = -K; k <= K; ++k) {
        const double ph = -kPi * k / n_cells;  // half-cell shift
        const double mag = cubic_kernel_ft(static_cast<double>(k) / n_cells, a) / n_cells;
        b[static_cast<size_t>(k + K)] = std::polar(mag, ph);
    }
    return b;
}

InterpolationModel make_interpolation_model(
    const std::vector<std::pair<int, int>>& resolutions, double a) {
    if (resolutions.empty()) throw ArgumentError("interpolation model: no layers");
    int n1 = 0, n2 = 0;
    for (auto [r, c] : resolutions) {
        if (r < 1 || c < 1) throw ArgumentError("interpolation model: bad resolution");
        n1 = std::max(n1, r);
        n2 = std::max(n2, c);
    }
    InterpolationModel m;
    m.T = {static_cast<double>(n1), static_cast<double>(n2)};
    m.K1 = (n1 - 1) / 2;
    m.K2 = (n2 - 1) / 2;
    m.kernel_a = a;
    for (auto [r, c] : resolutions) {
        LayerModel lm;
        lm.rows = r;
        lm.cols = c;
        lm.brow = kernel_fourier(r, m.K1, a);
        lm.bcol = kernel_fourier(c, m.K2, a);
        // Band-limit each layer to its own principal band; even sizes drop
        // the unmatched Nyquist bin.
        const int kr = (r - 1) / 2, kc = (c - 1) / 2;
        for (int k = -m.K1; k <= m.K1; ++k)
            if (std::abs(k) > kr) lm.brow[static_cast<size_t>(k + m.K1)] = 0.0;
        for (int k = -m.K2; k <= m.K2; ++k)
            if (std::abs(k) > kc) lm.bcol[static_cast<size_t>(k + m.K2)] = 0.0;
        m.layers.push_back(std::move(lm));
    }
    return m;
}

CoeffStack interpolate(const FeatureMap& fm, const InterpolationModel& model) {
    if (fm.layers.size() != model.layers.size())
        throw ArgumentError("interpolate: layer count mismatch");
    CoeffStack out;
    out.T = model.T;
    out.ch.reserve(fm.layers.size());
    std::vector<cplx> buf;
    for (size_t l = 0; l < fm.layers.size(); ++l) {
        const auto& layer = fm.layers[l];
        const auto& lm = model.layers[l];
        if (layer.rows != lm.rows || layer.cols != lm.cols)
            throw ArgumentError("interpolate: layer resolution mismatch");
        buf.assign(layer.v.begin(), layer.v.end());
        fft2(buf, layer.rows, layer.cols, true);
        CoeffGrid g(model.K1, model.K2);
        for (int k1 = -model.K1; k1 <= model.K1; ++k1) {
            const cplx br = lm.brow[static_cast<size_t>(k1 + model.K1)];
            const int r = wrap_index(k1, layer.rows);
            for (int k2 = -model.K2; k2 <= model.K2; ++k2) {
                const cplx bc = lm.bcol[static_cast<size_t>(k2 + model.K2)];
                const int c = wrap_index(k2, layer.cols);
                g.at(k1, k2) = buf[static_cast<size_t>(r) * layer.cols + c] * br * bc;
            }
        }
        out.ch.push_back(std::move(g));
    }
    return out;
}

ConfidenceMap evaluate_confidence(const CoeffStack& w, const CoeffStack& z) {
    if (!w.same_shape(z)) throw ArgumentError("evaluate_confidence: shape mismatch");
    if (w.ch.empty()) throw ArgumentError("evaluate_confidence: empty stacks");
    ConfidenceMap out;
    out.T = z.T;
    out.c = CoeffGrid(w.ch[0].K1, w.ch[0].K2);
    for (size_t l = 0; l < w.ch.size(); ++l) {
        const auto& ws = w.ch[l].c;
        const auto& zs = z.ch[l].c;
        for (size_t i = 0; i < ws.size(); ++i) out.c.c[i] += ws[i] * zs[i];
    }
    return out;
}

std::vector<double> sample_grid(const CoeffGrid& cg, int G) {
    if (G < 2 * std::max(cg.K1, cg.K2) + 1)
        throw ArgumentError("sample_grid: G must be >= 2K+1");
    std::vector<cplx> buf(static_cast<size_t>(G) * G);
    double mass = 0.0;  // roundoff scale of the synthesis
    for (int k1 = -cg.K1; k1 <= cg.K1; ++k1) {
        const int r = wrap_index(k1, G);
        for (int k2 = -cg.K2; k2 <= cg.K2; ++k2) {
            buf[static_cast<size_t>(r) * G + wrap_index(k2, G)] = cg.at(k1, k2);
            mass += std::abs(cg.at(k1, k2));
        }
    }
    fft2(buf, G, G, false);
    double max_im = 0.0;
    for (const auto& v : buf) max_im = std::max(max_im, std::abs(v.imag()));
    if (max_im > 1e-9 * std::max(1.0, mass))
        throw NumericalError("sample_grid: non-negligible imaginary residue");
    std::vector<double> out(buf.size());
    for (size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
    return out;
}

std::vector<double> sample_grid(const ConfidenceMap& c, int G) {
    return sample_grid(c.c, G);
}

namespace {

using SeriesEval = SeriesDerivatives;

SeriesEval eval_series(const CoeffGrid& c, const Period& T, double t1, double t2,
                       bool derivs) {
    const int n1 = c.n1(), n2 = c.n2();
    std::vector<cplx> u1(static_cast<size_t>(n1)), u2(static_cast<size_t>(n2));
    for (int k = -c.K1; k <= c.K1; ++k)
        u1[static_cast<size_t>(k + c.K1)] = std::polar(1.0, 2.0 * kPi * k * t1 / T.t1);
    for (int k = -c.K2; k <= c.K2; ++k)
        u2[static_cast<size_t>(k + c.K2)] = std::polar(1.0, 2.0 * kPi * k * t2 / T.t2);
    cplx f = 0, f1 = 0, f2 = 0, f11 = 0, f12 = 0, f22 = 0;
    for (int k1 = -c.K1; k1 <= c.K1; ++k1) {
        const double w1 = 2.0 * kPi * k1 / T.t1;
        for (int k2 = -c.K2; k2 <= c.K2; ++k2) {
            const cplx term = c.at(k1, k2) * u1[static_cast<size_t>(k1 + c.K1)] *
                              u2[static_cast<size_t>(k2 + c.K2)];
            f += term;
            if (derivs) {
                const double w2 = 2.0 * kPi * k2 / T.t2;
                f1 += cplx(0, w1) * term;
                f2 += cplx(0, w2) * term;
                f11 += -w1 * w1 * term;
                f12 += -w1 * w2 * term;
                f22 += -w2 * w2 * term;
            }
        }
    }
    return {f.real(), f1.real(), f2.real(), f11.real(), f12.real(), f22.real()};
}

}  // namespace

double eval_at(const CoeffGrid& c, const Period& T, double t1, double t2) {
    return eval_series(c, T, t1, t2, false).value;
}

SeriesDerivatives eval_derivatives(const CoeffGrid& c, const Period& T, double t1,
                                   double t2) {
    return eval_series(c, T, t1, t2, true);
}

PointValue argmax_subgrid(const ConfidenceMap& c, int G, int iters) {
    if (iters < 0) throw ArgumentError("argmax_subgrid: iters must be >= 0");
    const auto grid = sample_grid(c, G);
    size_t best = 0;
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] > grid[best]) best = i;
    PointValue cur;
    cur.t1 = static_cast<double>(best / G) * c.T.t1 / G;
    cur.t2 = static_cast<double>(best % G) * c.T.t2 / G;
    cur.value = grid[best];
    for (int it = 0; it < iters; ++it) {
        const SeriesEval e = eval_series(c.c, c.T, cur.t1, cur.t2, true);
        const double det = e.h11 * e.h22 - e.h12 * e.h12;
        if (!(e.h11 < 0.0 && det > 0.0)) break;  // not negative definite
        const double d1 = -(e.h22 * e.g1 - e.h12 * e.g2) / det;
        const double d2 = -(-e.h12 * e.g1 + e.h11 * e.g2) / det;
        double n1 = cur.t1 + d1, n2 = cur.t2 + d2;
        n1 -= c.T.t1 * std::floor(n1 / c.T.t1);
        n2 -= c.T.t2 * std::floor(n2 / c.T.t2);
        const double v = eval_at(c.c, c.T, n1, n2);
        if (!(v > cur.value)) break;
        cur = {n1, n2, v};
    }
    return cur;
}

GaussianLabel gaussian_fourier(double sigma, double y1, double y2, const Period& T,
                               int K1, int K2) {
    if (sigma <= 0.0) throw ArgumentError("gaussian_fourier: sigma must be > 0");
    GaussianLabel out;
    out.sigma = sigma;
    out.y1 = y1;
    out.y2 = y2;
    out.T = T;
    out.c = CoeffGrid(K1, K2);
    const double amp = std::sqrt(2.0 * kPi * sigma * sigma);
    auto dim = [&](int K, double Td, double y) {
        std::vector<cplx> m(static_cast<size_t>(2 * K + 1));
        for (int k = -K; k <= K; ++k) {
            const double q = kPi * k / Td;
            const double mag = amp / Td * std::exp(-2.0 * sigma * sigma * q * q);
            m[static_cast<size_t>(k + K)] = std::polar(mag, -2.0 * kPi * k * y / Td);
        }
        return m;
    };
    const auto m1 = dim(K1, T.t1, y1);
    const auto m2 = dim(K2, T.t2, y2);
    for (int k1 = -K1; k1 <= K1; ++k1)
        for (int k2 = -K2; k2 <= K2; ++k2)
            out.c.at(k1, k2) =
                m1[static_cast<size_t>(k1 + K1)] * m2[static_cast<size_t>(k2 + K2)];
    return out;
}

CoeffGrid loss_fourier(const GaussianLabel& label) {
    CoeffGrid out(label.c.K1, label.c.K2);
    for (size_t i = 0; i < out.c.size(); ++i) out.c[i] = -label.c.c[i];
    out.at(0, 0) += 1.0;
    return out;
}

namespace {

void put_u32_le(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64_le(std::string& s, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

}  // namespace

void write_coeff_dump(const std::string& path, const CoeffStack& s) {
    if (s.ch.empty()) throw ArgumentError("write_coeff_dump: empty stack");
    std::string bytes;
    bytes.append("LMSC");
    put_u32_le(bytes, static_cast<uint32_t>(s.ch[0].K1));
    put_u32_le(bytes, static_cast<uint32_t>(s.ch[0].K2));
    put_u32_le(bytes, static_cast<uint32_t>(s.ch.size()));
    for (const auto& g : s.ch)
        for (const auto& v : g.c) {
            put_f64_le(bytes, v.real());
            put_f64_le(bytes, v.imag());
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

}  // namespace sct
