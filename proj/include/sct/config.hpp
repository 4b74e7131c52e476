#pragma once

#include <cstdint>
#include <string>

#include "sct/tracker.hpp"

namespace sct {

// Flat key = value configuration; one key per line, '#' starts a comment.
struct Params {
    double c = 100.0;
    double mu = 1e-2;
    double eta = 10.0;
    double sigma_factor = 1.0 / 16.0;
    int scales = 10;
    double scale_step = 1.02;
    double scale_min = 0.2;
    double scale_max = 5.0;
    int update_interval = 5;
    int alt_iters = 3;
    int cg_iters = 2;
    int init_iters = 30;
    double cg_tol = 1e-5;
    int sample_side = 248;
    int hog_cell = 4;
    int hog_orientations = 9;
    int memory_size = 30;
    double learning_rate = 0.025;
    int grid_factor = 4;
    int newton_iters = 5;
    bool window = true;
    uint64_t seed = 0;
    std::string trace_dir;
};

Params parse_config_text(const std::string& text, const std::string& origin);
Params parse_config_file(const std::string& path);

TrackerConfig tracker_config(const Params& p);

// FNV-1a hash of the canonical key=value serialization, as 16 hex digits.
std::string config_hash(const Params& p);

}  // namespace sct
