#pragma once

#include <string>

#include "sct/bench.hpp"
#include "sct/features.hpp"
#include "sct/margin.hpp"

namespace sct {

struct ScaleConfig {
    int num_scales = 10;
    double step = 1.02;
    double s_min = 0.2;  // bounds relative to the initial size
    double s_max = 5.0;

    void validate() const;
};

struct TrackerConfig {
    FeatureConfig feat;
    TrainConfig train;
    ScaleConfig scale;
    double sigma_factor = 1.0 / 16.0;  // label sigma / target size in cells
    double reg_mu = 1e-2;
    double reg_eta = 10.0;
    double kernel_a = -0.75;
    int memory_size = 30;
    double learning_rate = 0.025;
    std::string trace_dir;  // enables coefficient dumps + training trace
};

struct Detection {
    BoundingBox box;
    double score = 0.0;
    int scale_index = 0;
};

// Online tracker: detect translation and scale by maximizing the continuous
// confidence map, learn on the configured update schedule. Copyable value
// type; copies evolve independently.
class Tracker final : public OnlineTracker {
public:
    Tracker() = default;
    explicit Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {}

    void init(const Frame& frame, const BoundingBox& box) override;
    Detection detect(const Frame& frame) const;
    StepOut step(const Frame& frame) override;

    const TrackerConfig& config() const { return cfg_; }
    const BoundingBox& bbox() const { return bbox_; }
    int frame_index() const { return frame_index_; }
    double current_scale() const { return scale_; }
    const CoeffStack& filter() const { return filter_; }
    const SampleMemory& memory() const { return memory_; }
    const InterpolationModel& model() const { return model_; }
    const GaussianLabel& label() const { return label_; }
    int grid_size() const { return grid_; }

    // Interpolated features of the search patch at the given box and
    // relative scale factor.
    CoeffStack make_sample(const Frame& frame, const BoundingBox& box,
                           double rel_scale) const;

private:
    void learn(std::optional<CoeffStack> sample, bool init_mode);

    TrackerConfig cfg_;
    InterpolationModel model_;
    SpatialRegularizer reg_;
    GaussianLabel label_;
    LossContext loss_;
    CoeffStack filter_;
    SampleMemory memory_;
    BoundingBox bbox_;
    double base_w_ = 0.0, base_h_ = 0.0;
    double scale_ = 1.0;
    int frame_index_ = 0;
    int grid_ = 0;
    int update_count_ = 0;
};

}  // namespace sct
