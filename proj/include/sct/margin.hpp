#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sct/fourier.hpp"

namespace sct {

// Position-dependent filter penalty gamma(t) >= mu with quadratic growth
// away from the domain center, held as a sparse coefficient cross
// (|k_d| <= 2). `gram` caches the autocorrelation sum_n conj(g[n]) g[n+k]
// used by the normal operator.
struct SpatialRegularizer {
    double mu = 1e-2;
    double eta = 10.0;
    double rho_half = 1.0;
    Period T;
    CoeffGrid gamma;  // K = 2
    CoeffGrid gram;   // K = 4

    // Closed-form spatial profile matching the coefficients exactly.
    double value_at(double t1, double t2) const;
};

SpatialRegularizer regularizer_coeffs(const Period& T, double target_cells,
                                      double mu, double eta);

struct TrainingSample {
    CoeffStack z;
    double alpha = 1.0;
    double s0 = 0.0;
    CoeffGrid eps_hat;
    CoeffGrid rho_hat;
    int age = 0;
};

struct SampleMemory {
    std::vector<TrainingSample> samples;
    int capacity = 30;
    double lambda = 0.025;

    // Weight refresh: new sample gets lambda (1 on an empty memory), prior
    // weights scale by (1 - lambda); the lowest-weight sample is evicted at
    // capacity and weights renormalize to sum 1.
    void insert(CoeffStack z);
};

struct TrainConfig {
    double C = 100.0;
    int cg_iters = 2;
    int alt_iters = 3;
    int init_iters = 30;
    int update_interval = 5;
    double cg_tol = 1e-5;
    int grid_factor = 4;   // slack/localization grid G = grid_factor * N_max
    int newton_iters = 5;

    void validate() const;
};

struct SlackUpdate {
    std::vector<double> eps_grid;
    CoeffGrid eps_hat;
};

// Pointwise eps(t) = max{0, s0 - j(t) - l(t)} on the G x G grid, plus its
// band-limited projection onto the truncated index set.
SlackUpdate update_slack(const std::vector<double>& j_grid,
                         const std::vector<double>& l_grid, double s0, int G,
                         int K1, int K2);

// rho[0] = s0 - l[0] - eps[0]; rho[k] = -l[k] - eps[k] otherwise.
CoeffGrid build_label(double s0, const CoeffGrid& l_hat, const CoeffGrid& eps_hat);

// Normal-equation operator: data term sum_j alpha_j Z_j^H (Z_j w) per
// coefficient plus (1/C) gram * w (truncated convolution).
struct NormalOperator {
    const SampleMemory* mem = nullptr;
    const SpatialRegularizer* reg = nullptr;
    double C = 100.0;

    CoeffStack apply(const CoeffStack& w) const;
    CoeffStack rhs(const CoeffStack& like) const;
};

struct CgStats {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> objective;  // 0.5 <w,Aw> - <w,b> after each iteration
};

using LinearMap = std::function<CoeffStack(const CoeffStack&)>;

// Conjugate gradients on a Hermitian positive definite map. Stops after
// `iters` iterations or when |b - Aw| / |b| < tol. Throws NumericalError on
// non-finite values.
CoeffStack solve_cg(const LinearMap& A, const CoeffStack& b, const CoeffStack& w0,
                    int iters, double tol, CgStats* stats = nullptr);

// Gaussian loss prepared for a given evaluation grid; (y1, y2) is the
// label center where each sample's peak score s0 is read off.
struct LossContext {
    CoeffGrid l_hat;
    std::vector<double> l_grid;
    int G = 0;
    double y1 = 0.0;
    double y2 = 0.0;
};

LossContext make_loss_context(const GaussianLabel& label, int G);

struct AlternationDiag {
    double objective = 0.0;  // value after the alternation
    int cg_iterations = 0;
    double relative_residual = 0.0;
};

struct UpdateDiagnostics {
    std::vector<AlternationDiag> alternations;
};

// Full objective sum_j alpha_j C |Z_j w - rho_j|^2 + sum_l |gamma * w|^2
// (the regularizer convolution summed over its full extended support).
double margin_objective(const CoeffStack& w, const SampleMemory& mem,
                        const SpatialRegularizer& reg, double C);

// One collaborative update: inserts new_sample (if given), then alternates
// slack/label refresh and warm-started CG over all stored samples. The
// first alternation of an init-mode update uses s0 = 1, eps = 0 and
// init_iters CG iterations.
void collaborative_update(CoeffStack& filter, SampleMemory& mem,
                          const SpatialRegularizer& reg, const TrainConfig& cfg,
                          const LossContext& loss,
                          std::optional<CoeffStack> new_sample, bool init_mode,
                          UpdateDiagnostics* diag = nullptr);

}  // namespace sct
