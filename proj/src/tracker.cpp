#include "sct/tracker.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sct/common.hpp"

namespace sct {

void ScaleConfig::validate() const {
    if (num_scales < 1) throw ArgumentError("scale config: num_scales must be >= 1");
    if (step <= 1.0) throw ArgumentError("scale config: step must be > 1");
    if (s_min <= 0.0 || s_max < s_min) throw ArgumentError("scale config: bad bounds");
}

CoeffStack Tracker::make_sample(const Frame& frame, const BoundingBox& box,
                                double rel_scale) const {
    const Patch p = extract_search_patch(frame, box, rel_scale, cfg_.feat.sample_side);
    const FeatureMap fm = compute_channels(p, cfg_.feat);
    return interpolate(fm, model_);
}

void Tracker::init(const Frame& frame, const BoundingBox& box) {
    cfg_.feat.validate();
    cfg_.train.validate();
    cfg_.scale.validate();
    if (!box.valid() || box.w < 4.0 || box.h < 4.0)
        throw ArgumentError("tracker init: box must be at least 4x4 px");

    bbox_ = box;
    base_w_ = box.w;
    base_h_ = box.h;
    scale_ = 1.0;
    frame_index_ = 0;
    update_count_ = 0;
    filter_ = CoeffStack{};
    memory_ = SampleMemory{};
    memory_.capacity = cfg_.memory_size;
    memory_.lambda = cfg_.learning_rate;

    const Patch p = extract_search_patch(frame, bbox_, 1.0, cfg_.feat.sample_side);
    const FeatureMap fm = compute_channels(p, cfg_.feat);
    std::vector<std::pair<int, int>> res;
    res.reserve(fm.layers.size());
    for (const auto& l : fm.layers) res.emplace_back(l.rows, l.cols);
    model_ = make_interpolation_model(res, cfg_.kernel_a);
    grid_ = cfg_.train.grid_factor *
            static_cast<int>(std::lround(std::max(model_.T.t1, model_.T.t2)));

    const double target_cells =
        std::sqrt(base_w_ * base_h_) / (p.resample_scale * cfg_.feat.hog_cell);
    reg_ = regularizer_coeffs(model_.T, target_cells, cfg_.reg_mu, cfg_.reg_eta);
    label_ = gaussian_fourier(cfg_.sigma_factor * target_cells, model_.T.t1 / 2.0,
                              model_.T.t2 / 2.0, model_.T, model_.K1, model_.K2);
    loss_ = make_loss_context(label_, grid_);

    learn(interpolate(fm, model_), true);
    frame_index_ = 1;
}

Detection Tracker::detect(const Frame& frame) const {
    if (frame_index_ < 1) throw ArgumentError("detect: tracker not initialized");
    const int n = cfg_.scale.num_scales;
    Detection best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        const double f = std::pow(cfg_.scale.step, s - (n - 1) / 2.0);
        const Patch p = extract_search_patch(frame, bbox_, f, cfg_.feat.sample_side);
        const FeatureMap fm = compute_channels(p, cfg_.feat);
        const CoeffStack z = interpolate(fm, model_);
        const ConfidenceMap j = evaluate_confidence(filter_, z);
        const PointValue pv = argmax_subgrid(j, grid_, cfg_.train.newton_iters);
        if (pv.value > best_score) {
            best_score = pv.value;
            const double d1 = pv.t1 - model_.T.t1 / 2.0;  // rows -> y
            const double d2 = pv.t2 - model_.T.t2 / 2.0;  // cols -> x
            const double px_per_cell = cfg_.feat.hog_cell * p.resample_scale;
            const double ns =
                std::clamp(scale_ * f, cfg_.scale.s_min, cfg_.scale.s_max);
            best.box = {bbox_.cx + d2 * px_per_cell, bbox_.cy + d1 * px_per_cell,
                        base_w_ * ns, base_h_ * ns};
            best.score = pv.value;
            best.scale_index = s;
        }
    }
    return best;
}

StepOut Tracker::step(const Frame& frame) {
    const Detection d = detect(frame);
    const int n = cfg_.scale.num_scales;
    const double f = std::pow(cfg_.scale.step, d.scale_index - (n - 1) / 2.0);
    bbox_ = d.box;
    scale_ = std::clamp(scale_ * f, cfg_.scale.s_min, cfg_.scale.s_max);
    const int i = frame_index_ + 1;
    if (i % cfg_.train.update_interval == 0)
        learn(make_sample(frame, bbox_, 1.0), false);
    frame_index_ = i;
    return {bbox_, d.score};
}

void Tracker::learn(std::optional<CoeffStack> sample, bool init_mode) {
    UpdateDiagnostics diag;
    const bool trace = !cfg_.trace_dir.empty();
    collaborative_update(filter_, memory_, reg_, cfg_.train, loss_, std::move(sample),
                         init_mode, trace ? &diag : nullptr);
    ++update_count_;
    if (!trace) return;
    std::ofstream out(cfg_.trace_dir + "/train_trace.jsonl", std::ios::app);
    for (size_t a = 0; a < diag.alternations.size(); ++a) {
        const auto& d = diag.alternations[a];
        nlohmann::json rec = {{"frame", frame_index_},
                              {"update", update_count_},
                              {"alternation", a},
                              {"objective", d.objective},
                              {"cg_iterations", d.cg_iterations},
                              {"residual", d.relative_residual}};
        out << rec.dump() << "\n";
    }
    char name[64];
    std::snprintf(name, sizeof name, "/filter_%04d.bin", update_count_);
    write_coeff_dump(cfg_.trace_dir + name, filter_);
}

}  // namespace sct
