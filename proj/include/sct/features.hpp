#pragma once

#include <vector>

#include "sct/image.hpp"

namespace sct {

struct FeatureConfig {
    int sample_side = 248;       // fixed resample size, kept in [200, 300]
    int hog_cell = 4;            // cell size in patch pixels
    int hog_orientations = 9;    // unsigned orientation bins
    bool include_grayscale = true;
    bool window = true;          // separable raised-cosine taper

    void validate() const;
};

struct FeatureLayer {
    int rows = 0;
    int cols = 0;
    double cell = 1.0;  // cell size in patch pixels
    std::vector<double> v;

    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
};

struct FeatureMap {
    std::vector<FeatureLayer> layers;
};

// Cell taper value for index i of n: the Hann window sampled at cell
// centers, strictly positive everywhere.
double cell_taper(int i, int n);

// Computes the multi-channel feature map of a patch: one mean-subtracted
// grayscale layer plus hog_orientations gradient-histogram layers, all at
// cell resolution side / hog_cell.
FeatureMap compute_channels(const Patch& patch, const FeatureConfig& cfg);

}  // namespace sct
