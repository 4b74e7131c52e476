#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sct/geometry.hpp"
#include "sct/image.hpp"

namespace sct {

struct StepOut {
    BoundingBox box;
    double score = 0.0;
};

// Minimal tracking interface the evaluation protocol drives; the real
// tracker and the test stubs both implement it. init() may be called again
// after a failure (protocol reset).
struct OnlineTracker {
    virtual ~OnlineTracker() = default;
    virtual void init(const Frame& frame, const BoundingBox& box) = 0;
    virtual StepOut step(const Frame& frame) = 0;
};

struct Sequence {
    std::string name;
    std::vector<std::string> frame_paths;  // on-disk sequence
    std::vector<Frame> frames;             // in-memory sequence
    std::vector<BoundingBox> gt;

    size_t size() const { return gt.size(); }
    Frame frame(size_t i) const;
};

// Loads a VOT-layout directory: zero-padded numbered frames (00000001.png
// or .pgm) plus groundtruth.txt with one 4- or 8-value line per frame.
Sequence load_sequence(const std::string& dir);

enum class FrameStatus { Tracking, Failed, Reinit, BurnIn };
char status_code(FrameStatus s);

struct FrameRecord {
    BoundingBox box;
    double overlap = 0.0;
    double score = 0.0;
    FrameStatus status = FrameStatus::Tracking;
};

struct RunResult {
    std::vector<FrameRecord> frames;
    int failure_count = 0;
};

// Reset-based evaluation: a frame with zero overlap is a failure; the next
// `skip` frames are skipped, the tracker re-initializes on the last skipped
// frame, and the following `burn_in` predictions are excluded from accuracy.
RunResult run_reset_protocol(const Sequence& seq, OnlineTracker& tracker, int skip,
                             int burn_in);

// Tracking without resets; frame 1 initializes from ground truth. Stops
// after max_frames when nonzero.
RunResult run_plain(const Sequence& seq, OnlineTracker& tracker,
                    size_t max_frames = 0);

struct Metrics {
    std::optional<double> accuracy;  // absent when no tracking frames exist
    int robustness = 0;
    int frames_evaluated = 0;
    double fps = 0.0;
};

Metrics compute_metrics(const RunResult& result, double elapsed_seconds);

// CSV rows: frame_index,status,x,y,w,h,overlap,score (x,y top-left).
void write_result_csv(const std::string& path, const RunResult& result);

struct MotionSpec {
    enum class Kind { Linear, Sinusoid };
    Kind kind = Kind::Linear;
    double vx = 0.0, vy = 0.0;                        // linear, px/frame
    double ax = 0.0, ay = 0.0;                        // sinusoid amplitudes, px
    double period_x = 40.0, period_y = 40.0, phase = 0.0;
};

struct SynthSpec {
    int frames = 2;
    int width = 128, height = 128;
    double target_w = 24.0, target_h = 24.0;
    double start_x = 0.0, start_y = 0.0;  // zero places the target at center
    MotionSpec motion;
    double scale_from = 1.0, scale_to = 1.0;  // linear drift across the run
    double noise = 0.05;
};

// Target center and box size at frame i, renderer-free.
BoundingBox synth_box_at(const SynthSpec& spec, int i);

// Renders a textured rectangle over a low-contrast noise background with
// bilinear sub-pixel placement. Fully deterministic for a given seed.
Sequence synth_sequence(const SynthSpec& spec, uint64_t seed);

// Writes a sequence as a VOT-layout directory (PGM frames + groundtruth.txt).
void save_sequence(const Sequence& seq, const std::string& dir);

}  // namespace sct
