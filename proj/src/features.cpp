#include "sct/features.hpp"

#include <cmath>
#include <numbers>

#include "sct/common.hpp"

namespace sct {

namespace {
constexpr double kPi = std::numbers::pi;
// Normalization floor: cells whose accumulated gradient magnitude is small
// against this scale keep proportionally small features instead of being
// blown up to unit norm.
constexpr double kNormEps = 0.5;
constexpr double kHogClip = 0.2;
}  // namespace

void FeatureConfig::validate() const {
    if (sample_side < 200 || sample_side > 300)
        throw ArgumentError("feature config: sample_side must be in [200, 300]");
    if (hog_cell < 1) throw ArgumentError("feature config: hog_cell must be >= 1");
    if (hog_orientations < 2)
        throw ArgumentError("feature config: hog_orientations must be >= 2");
    if (sample_side % hog_cell != 0)
        throw ArgumentError("feature config: sample_side must be divisible by hog_cell");
}

double cell_taper(int i, int n) {
    return 0.5 * (1.0 - std::cos(2.0 * kPi * (i + 0.5) / n));
}

FeatureMap compute_channels(const Patch& patch, const FeatureConfig& cfg) {
    if (patch.side % cfg.hog_cell != 0)
        throw ArgumentError("compute_channels: patch side not divisible by hog_cell");
    const int cell = cfg.hog_cell;
    const int n = patch.side / cell;
    const int bins = cfg.hog_orientations;

    FeatureMap fm;
    auto make_layer = [&]() {
        FeatureLayer layer;
        layer.rows = n;
        layer.cols = n;
        layer.cell = cell;
        layer.v.assign(static_cast<size_t>(n) * n, 0.0);
        return layer;
    };

    if (cfg.include_grayscale) {
        FeatureLayer gray = make_layer();
        double mean = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int y = r * cell; y < (r + 1) * cell; ++y)
                    for (int x = c * cell; x < (c + 1) * cell; ++x) acc += patch.at(x, y);
                const double v = acc / (cell * cell);
                gray.at(r, c) = v;
                mean += v;
            }
        mean /= static_cast<double>(n) * n;
        for (auto& v : gray.v) v -= mean;
        fm.layers.push_back(std::move(gray));
    }

    // Orientation histograms: central-difference gradients (replicated at
    // the patch border), unsigned angle, hard bin assignment, magnitude
    // accumulation per cell, then per-cell L2 norm with clipping.
    std::vector<FeatureLayer> hog(static_cast<size_t>(bins));
    for (auto& l : hog) l = make_layer();
    auto px = [&](int x, int y) {
        x = std::min(std::max(x, 0), patch.side - 1);
        y = std::min(std::max(y, 0), patch.side - 1);
        return patch.at(x, y);
    };
    for (int y = 0; y < patch.side; ++y) {
        for (int x = 0; x < patch.side; ++x) {
            const double gx = (px(x + 1, y) - px(x - 1, y)) / 2.0;
            const double gy = (px(x, y + 1) - px(x, y - 1)) / 2.0;
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += kPi;
            if (theta >= kPi) theta -= kPi;
            int b = static_cast<int>(theta / kPi * bins);
            if (b >= bins) b = bins - 1;
            hog[static_cast<size_t>(b)].at(y / cell, x / cell) += mag;
        }
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double nrm = 0.0;
            for (int b = 0; b < bins; ++b) {
                const double v = hog[static_cast<size_t>(b)].at(r, c);
                nrm += v * v;
            }
            const double denom = std::sqrt(nrm + kNormEps * kNormEps);
            double pre = 0.0, post = 0.0;
            for (int b = 0; b < bins; ++b) {
                double& v = hog[static_cast<size_t>(b)].at(r, c);
                v /= denom;
                pre += v * v;
                v = std::min(v, kHogClip);
                post += v * v;
            }
            // Clipping loses norm on concentrated cells; scale back to the
            // pre-clip norm, which already respects the weak-cell floor.
            if (post > 0.0) {
                const double rescale = std::sqrt(pre / post);
                for (int b = 0; b < bins; ++b) hog[static_cast<size_t>(b)].at(r, c) *= rescale;
            }
        }
    }
    for (auto& l : hog) fm.layers.push_back(std::move(l));

    if (cfg.window) {
        for (auto& layer : fm.layers)
            for (int r = 0; r < layer.rows; ++r)
                for (int c = 0; c < layer.cols; ++c)
                    layer.at(r, c) *= cell_taper(r, layer.rows) * cell_taper(c, layer.cols);
    }
    return fm;
}

}  // namespace sct
