#include "sct/margin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sct/common.hpp"
#include "sct/fft.hpp"

namespace sct {

namespace {
constexpr double kPi = std::numbers::pi;
}

double SpatialRegularizer::value_at(double t1, double t2) const {
    auto profile = [&](double t, double Td) {
        const double u = t - Td / 2.0;
        const double s = eta * Td * Td / (24.0 * kPi * kPi * rho_half * rho_half);
        return s * (15.0 - 16.0 * std::cos(2.0 * kPi * u / Td) + std::cos(4.0 * kPi * u / Td));
    };
    return mu + profile(t1, T.t1) + profile(t2, T.t2);
}

SpatialRegularizer regularizer_coeffs(const Period& T, double target_cells, double mu,
                                      double eta) {
    if (mu <= 0.0) throw ArgumentError("regularizer: mu must be > 0");
    if (eta < 0.0) throw ArgumentError("regularizer: eta must be >= 0");
    if (target_cells <= 0.0) throw ArgumentError("regularizer: target size must be > 0");
    SpatialRegularizer r;
    r.mu = mu;
    r.eta = eta;
    r.rho_half = target_cells / 2.0;
    r.T = T;
    r.gamma = CoeffGrid(2, 2);
    // Degree-2 trigonometric profile per dimension, minimum exactly mu at
    // the domain center and curvature eta / rho_half^2 there:
    //   q(u) = s (15 - 16 cos(2 pi u / T) + cos(4 pi u / T)),
    //   s = eta T^2 / (24 pi^2 rho_half^2).
    const double s1 = eta * T.t1 * T.t1 / (24.0 * kPi * kPi * r.rho_half * r.rho_half);
    const double s2 = eta * T.t2 * T.t2 / (24.0 * kPi * kPi * r.rho_half * r.rho_half);
    r.gamma.at(0, 0) = mu + 15.0 * (s1 + s2);
    r.gamma.at(1, 0) = 8.0 * s1;
    r.gamma.at(-1, 0) = 8.0 * s1;
    r.gamma.at(2, 0) = 0.5 * s1;
    r.gamma.at(-2, 0) = 0.5 * s1;
    r.gamma.at(0, 1) = 8.0 * s2;
    r.gamma.at(0, -1) = 8.0 * s2;
    r.gamma.at(0, 2) = 0.5 * s2;
    r.gamma.at(0, -2) = 0.5 * s2;
    // Autocorrelation g[k] = sum_n conj(gamma[n]) gamma[n+k].
    r.gram = CoeffGrid(4, 4);
    for (int k1 = -4; k1 <= 4; ++k1)
        for (int k2 = -4; k2 <= 4; ++k2) {
            cplx acc = 0.0;
            for (int n1 = -2; n1 <= 2; ++n1)
                for (int n2 = -2; n2 <= 2; ++n2) {
                    const int m1 = n1 + k1, m2 = n2 + k2;
                    if (std::abs(m1) > 2 || std::abs(m2) > 2) continue;
                    acc += std::conj(r.gamma.at(n1, n2)) * r.gamma.at(m1, m2);
                }
            r.gram.at(k1, k2) = acc;
        }
    return r;
}

void SampleMemory::insert(CoeffStack z) {
    TrainingSample s;
    s.z = std::move(z);
    s.alpha = samples.empty() ? 1.0 : lambda;
    for (auto& old : samples) {
        old.alpha *= 1.0 - lambda;
        ++old.age;
    }
    samples.push_back(std::move(s));
    if (static_cast<int>(samples.size()) > capacity) {
        auto it = std::min_element(
            samples.begin(), samples.end(),
            [](const TrainingSample& a, const TrainingSample& b) { return a.alpha < b.alpha; });
        samples.erase(it);
    }
    double total = 0.0;
    for (const auto& s2 : samples) total += s2.alpha;
    for (auto& s2 : samples) s2.alpha /= total;
}

void TrainConfig::validate() const {
    if (C <= 0.0) throw ArgumentError("train config: C must be > 0");
    if (cg_iters < 1 || alt_iters < 1 || init_iters < 1 || update_interval < 1)
        throw ArgumentError("train config: iteration counts must be >= 1");
    if (cg_tol <= 0.0) throw ArgumentError("train config: cg_tol must be > 0");
    if (grid_factor < 1) throw ArgumentError("train config: grid_factor must be >= 1");
    if (newton_iters < 0) throw ArgumentError("train config: newton_iters must be >= 0");
}

SlackUpdate update_slack(const std::vector<double>& j_grid,
                         const std::vector<double>& l_grid, double s0, int G, int K1,
                         int K2) {
    if (j_grid.size() != l_grid.size() ||
        j_grid.size() != static_cast<size_t>(G) * G)
        throw ArgumentError("update_slack: grid shape mismatch");
    if (G < 2 * std::max(K1, K2) + 1)
        throw ArgumentError("update_slack: G must be >= 2K+1");
    SlackUpdate out;
    out.eps_grid.resize(j_grid.size());
    std::vector<cplx> buf(j_grid.size());
    for (size_t i = 0; i < j_grid.size(); ++i) {
        out.eps_grid[i] = std::max(0.0, s0 - j_grid[i] - l_grid[i]);
        buf[i] = out.eps_grid[i];
    }
    fft2(buf, G, G, true);
    out.eps_hat = CoeffGrid(K1, K2);
    const double inv = 1.0 / (static_cast<double>(G) * G);
    auto wrap = [G](int k) { return ((k % G) + G) % G; };
    for (int k1 = -K1; k1 <= K1; ++k1)
        for (int k2 = -K2; k2 <= K2; ++k2)
            out.eps_hat.at(k1, k2) =
                buf[static_cast<size_t>(wrap(k1)) * G + wrap(k2)] * inv;
    return out;
}

CoeffGrid build_label(double s0, const CoeffGrid& l_hat, const CoeffGrid& eps_hat) {
    if (!l_hat.same_shape(eps_hat)) throw ArgumentError("build_label: shape mismatch");
    CoeffGrid rho(l_hat.K1, l_hat.K2);
    for (size_t i = 0; i < rho.size(); ++i) rho.c[i] = -l_hat.c[i] - eps_hat.c[i];
    rho.at(0, 0) += s0;
    return rho;
}

CoeffStack NormalOperator::apply(const CoeffStack& w) const {
    if (!mem || !reg) throw ArgumentError("normal operator: missing state");
    CoeffStack out = zero_stack_like(w);
    const size_t L = w.ch.size();
    for (const auto& s : mem->samples) {
        if (s.z.ch.size() != L || !s.z.same_shape(w))
            throw ArgumentError("normal operator: sample shape mismatch");
        const size_t m = w.ch[0].size();
        std::vector<cplx> q(m);
        for (size_t l = 0; l < L; ++l) {
            const auto& zs = s.z.ch[l].c;
            const auto& ws = w.ch[l].c;
            for (size_t i = 0; i < m; ++i) q[i] += zs[i] * ws[i];
        }
        for (size_t l = 0; l < L; ++l) {
            const auto& zs = s.z.ch[l].c;
            auto& os = out.ch[l].c;
            for (size_t i = 0; i < m; ++i) os[i] += s.alpha * std::conj(zs[i]) * q[i];
        }
    }
    const double invC = 1.0 / C;
    const auto& g = reg->gram;
    for (size_t l = 0; l < L; ++l) {
        const auto& ws = w.ch[l];
        auto& os = out.ch[l];
        for (int k1 = -ws.K1; k1 <= ws.K1; ++k1)
            for (int k2 = -ws.K2; k2 <= ws.K2; ++k2) {
                cplx acc = 0.0;
                for (int d1 = -g.K1; d1 <= g.K1; ++d1) {
                    const int m1 = k1 - d1;
                    if (std::abs(m1) > ws.K1) continue;
                    for (int d2 = -g.K2; d2 <= g.K2; ++d2) {
                        const int m2 = k2 - d2;
                        if (std::abs(m2) > ws.K2) continue;
                        acc += g.at(d1, d2) * ws.at(m1, m2);
                    }
                }
                os.at(k1, k2) += invC * acc;
            }
    }
    return out;
}

CoeffStack NormalOperator::rhs(const CoeffStack& like) const {
    if (!mem) throw ArgumentError("normal operator: missing state");
    CoeffStack out = zero_stack_like(like);
    for (const auto& s : mem->samples) {
        if (!s.z.same_shape(like))
            throw ArgumentError("normal operator: sample shape mismatch");
        if (s.rho_hat.size() == 0) continue;  // label not built yet
        for (size_t l = 0; l < out.ch.size(); ++l) {
            const auto& zs = s.z.ch[l].c;
            auto& os = out.ch[l].c;
            for (size_t i = 0; i < os.size(); ++i)
                os[i] += s.alpha * std::conj(zs[i]) * s.rho_hat.c[i];
        }
    }
    return out;
}

CoeffStack solve_cg(const LinearMap& A, const CoeffStack& b, const CoeffStack& w0,
                    int iters, double tol, CgStats* stats) {
    const double bn = norm(b);
    if (stats) *stats = CgStats{};
    if (bn == 0.0) return zero_stack_like(b);

    CoeffStack w = w0;
    CoeffStack aw;
    if (norm(w0) == 0.0) {
        aw = zero_stack_like(b);
    } else {
        aw = A(w);
    }
    CoeffStack r = b;
    axpy(-1.0, aw, r);
    CoeffStack p = r;
    double rs = dot_re(r, r);
    int it = 0;
    for (; it < iters; ++it) {
        if (std::sqrt(rs) / bn < tol) break;
        CoeffStack ap = A(p);
        const double pap = dot_re(p, ap);
        if (!std::isfinite(pap) || pap <= 0.0)
            throw NumericalError("cg: operator not positive definite at iteration " +
                                 std::to_string(it));
        const double alpha = rs / pap;
        axpy(alpha, p, w);
        axpy(alpha, ap, aw);
        axpy(-alpha, ap, r);
        if (!all_finite(w) || !all_finite(r))
            throw NumericalError("cg: non-finite values at iteration " + std::to_string(it));
        const double rs2 = dot_re(r, r);
        const double beta = rs2 / rs;
        scale(beta, p);
        axpy(1.0, r, p);
        rs = rs2;
        if (stats) stats->objective.push_back(0.5 * dot_re(w, aw) - dot_re(w, b));
    }
    if (stats) {
        stats->iterations = it;
        stats->relative_residual = std::sqrt(rs) / bn;
    }
    return w;
}

LossContext make_loss_context(const GaussianLabel& label, int G) {
    LossContext ctx;
    ctx.l_hat = loss_fourier(label);
    ctx.l_grid = sample_grid(ctx.l_hat, G);
    ctx.G = G;
    ctx.y1 = label.y1;
    ctx.y2 = label.y2;
    return ctx;
}

double margin_objective(const CoeffStack& w, const SampleMemory& mem,
                        const SpatialRegularizer& reg, double C) {
    double data = 0.0;
    for (const auto& s : mem.samples) {
        if (s.rho_hat.size() == 0) continue;
        const size_t m = w.ch[0].size();
        for (size_t i = 0; i < m; ++i) {
            cplx acc = -s.rho_hat.c[i];
            for (size_t l = 0; l < w.ch.size(); ++l)
                acc += s.z.ch[l].c[i] * w.ch[l].c[i];
            data += s.alpha * std::norm(acc);
        }
    }
    // Regularizer over the full extended support of the convolution.
    double rterm = 0.0;
    const auto& g = reg.gamma;
    for (const auto& ws : w.ch) {
        for (int k1 = -ws.K1 - g.K1; k1 <= ws.K1 + g.K1; ++k1)
            for (int k2 = -ws.K2 - g.K2; k2 <= ws.K2 + g.K2; ++k2) {
                cplx acc = 0.0;
                for (int d1 = -g.K1; d1 <= g.K1; ++d1) {
                    const int m1 = k1 - d1;
                    if (std::abs(m1) > ws.K1) continue;
                    for (int d2 = -g.K2; d2 <= g.K2; ++d2) {
                        const int m2 = k2 - d2;
                        if (std::abs(m2) > ws.K2) continue;
                        acc += g.at(d1, d2) * ws.at(m1, m2);
                    }
                }
                rterm += std::norm(acc);
            }
    }
    return C * data + rterm;
}

void collaborative_update(CoeffStack& filter, SampleMemory& mem,
                          const SpatialRegularizer& reg, const TrainConfig& cfg,
                          const LossContext& loss,
                          std::optional<CoeffStack> new_sample, bool init_mode,
                          UpdateDiagnostics* diag) {
    cfg.validate();
    if (new_sample) mem.insert(std::move(*new_sample));
    if (mem.samples.empty()) throw ArgumentError("collaborative_update: empty memory");
    if (filter.ch.empty()) filter = zero_stack_like(mem.samples[0].z);

    const int K1 = filter.ch[0].K1, K2 = filter.ch[0].K2;
    NormalOperator op{&mem, &reg, cfg.C};
    LinearMap A = [&op](const CoeffStack& x) { return op.apply(x); };

    for (int a = 0; a < cfg.alt_iters; ++a) {
        const bool first_init = init_mode && a == 0;
        for (auto& s : mem.samples) {
            if (first_init) {
                s.s0 = 1.0;
                s.eps_hat = CoeffGrid(K1, K2);
            } else {
                const ConfidenceMap j = evaluate_confidence(filter, s.z);
                const auto j_grid = sample_grid(j, loss.G);
                s.s0 = eval_at(j.c, j.T, loss.y1, loss.y2);
                SlackUpdate su = update_slack(j_grid, loss.l_grid, s.s0, loss.G, K1, K2);
                s.eps_hat = std::move(su.eps_hat);
            }
            s.rho_hat = build_label(s.s0, loss.l_hat, s.eps_hat);
        }
        const CoeffStack b = op.rhs(filter);
        const int iters = first_init ? cfg.init_iters : cfg.cg_iters;
        CgStats st;
        filter = solve_cg(A, b, filter, iters, cfg.cg_tol, diag ? &st : nullptr);
        if (diag) {
            AlternationDiag d;
            d.objective = margin_objective(filter, mem, reg, cfg.C);
            d.cg_iterations = st.iterations;
            d.relative_residual = st.relative_residual;
            diag->alternations.push_back(d);
        }
    }
}

}  // namespace sct
