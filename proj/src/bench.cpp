#include "sct/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sct/common.hpp"

namespace fs = std::filesystem;

namespace sct {

namespace {

// Deterministic, platform-stable generator (splitmix64).
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::string frame_name(size_t index1) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08zu", index1);
    return buf;
}

}  // namespace

Frame Sequence::frame(size_t i) const {
    if (!frame_paths.empty()) return load_frame(frame_paths.at(i));
    return frames.at(i);
}

char status_code(FrameStatus s) {
    switch (s) {
        case FrameStatus::Tracking: return 'T';
        case FrameStatus::Failed: return 'F';
        case FrameStatus::Reinit: return 'R';
        case FrameStatus::BurnIn: return 'B';
    }
    return '?';
}

Sequence load_sequence(const std::string& dir) {
    const fs::path root(dir);
    const fs::path gt_path = root / "groundtruth.txt";
    std::ifstream gt_in(gt_path);
    if (!gt_in) throw FormatError("missing ground truth file " + gt_path.string());

    Sequence seq;
    seq.name = root.filename().string();
    std::string line;
    size_t line_no = 0;
    while (std::getline(gt_in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t pos = 0;
                vals.push_back(std::stod(tok, &pos));
                while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
                    ++pos;
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw FormatError(gt_path.string() + ": unparseable line " +
                                  std::to_string(line_no));
            }
        }
        if (vals.size() == 4) {
            seq.gt.push_back(BoundingBox::from_tlwh(vals[0], vals[1], vals[2], vals[3]));
        } else if (vals.size() == 8) {
            double xmin = vals[0], xmax = vals[0], ymin = vals[1], ymax = vals[1];
            for (int i = 1; i < 4; ++i) {
                xmin = std::min(xmin, vals[2 * i]);
                xmax = std::max(xmax, vals[2 * i]);
                ymin = std::min(ymin, vals[2 * i + 1]);
                ymax = std::max(ymax, vals[2 * i + 1]);
            }
            seq.gt.push_back(BoundingBox::from_tlwh(xmin, ymin, xmax - xmin, ymax - ymin));
        } else {
            throw FormatError(gt_path.string() + ": unparseable line " +
                              std::to_string(line_no) + " (expected 4 or 8 values)");
        }
    }

    size_t frame_count = 0;
    for (size_t i = 1;; ++i) {
        const fs::path png = root / (frame_name(i) + ".png");
        const fs::path pgm = root / (frame_name(i) + ".pgm");
        if (fs::exists(png)) {
            seq.frame_paths.push_back(png.string());
        } else if (fs::exists(pgm)) {
            seq.frame_paths.push_back(pgm.string());
        } else {
            break;
        }
        ++frame_count;
    }
    if (frame_count != seq.gt.size())
        throw FormatError(dir + ": frame/ground-truth count mismatch (" +
                          std::to_string(frame_count) + " vs " +
                          std::to_string(seq.gt.size()) + ")");
    if (seq.gt.size() < 2)
        throw FormatError(dir + ": sequences need at least 2 frames");
    return seq;
}

RunResult run_reset_protocol(const Sequence& seq, OnlineTracker& tracker, int skip,
                             int burn_in) {
    if (skip < 0 || burn_in < 0)
        throw ArgumentError("reset protocol: skip and burn_in must be >= 0");
    const size_t n = seq.size();
    RunResult res;
    res.frames.resize(n);

    tracker.init(seq.frame(0), seq.gt[0]);
    res.frames[0] = {seq.gt[0], iou(seq.gt[0], seq.gt[0]), 0.0, FrameStatus::BurnIn};
    int burn_remaining = burn_in;
    int skip_remaining = 0;

    for (size_t i = 1; i < n; ++i) {
        if (skip_remaining > 0) {
            res.frames[i] = {seq.gt[i], 0.0, 0.0, FrameStatus::Reinit};
            if (--skip_remaining == 0) {
                tracker.init(seq.frame(i), seq.gt[i]);
                burn_remaining = burn_in;
            }
            continue;
        }
        const StepOut so = tracker.step(seq.frame(i));
        const double o = iou(so.box, seq.gt[i]);
        if (o == 0.0) {
            res.frames[i] = {so.box, 0.0, so.score, FrameStatus::Failed};
            ++res.failure_count;
            if (skip == 0) {
                tracker.init(seq.frame(i), seq.gt[i]);
                burn_remaining = burn_in;
            } else {
                skip_remaining = skip;
            }
        } else if (burn_remaining > 0) {
            res.frames[i] = {so.box, o, so.score, FrameStatus::BurnIn};
            --burn_remaining;
        } else {
            res.frames[i] = {so.box, o, so.score, FrameStatus::Tracking};
        }
    }
    return res;
}

RunResult run_plain(const Sequence& seq, OnlineTracker& tracker, size_t max_frames) {
    const size_t n = max_frames > 0 ? std::min(max_frames, seq.size()) : seq.size();
    if (n < 1) throw ArgumentError("run_plain: empty sequence");
    RunResult res;
    res.frames.resize(n);
    tracker.init(seq.frame(0), seq.gt[0]);
    res.frames[0] = {seq.gt[0], 1.0, 0.0, FrameStatus::Tracking};
    for (size_t i = 1; i < n; ++i) {
        const StepOut so = tracker.step(seq.frame(i));
        res.frames[i] = {so.box, iou(so.box, seq.gt[i]), so.score, FrameStatus::Tracking};
    }
    return res;
}

Metrics compute_metrics(const RunResult& result, double elapsed_seconds) {
    Metrics m;
    double acc = 0.0;
    int tracking = 0;
    for (const auto& f : result.frames) {
        if (f.status == FrameStatus::Tracking) {
            acc += f.overlap;
            ++tracking;
        }
        if (f.status != FrameStatus::Reinit) ++m.frames_evaluated;
    }
    if (tracking > 0) m.accuracy = acc / tracking;
    m.robustness = result.failure_count;
    m.fps = elapsed_seconds > 0.0
                ? static_cast<double>(result.frames.size()) / elapsed_seconds
                : 0.0;
    return m;
}

void write_result_csv(const std::string& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "frame_index,status,x,y,w,h,overlap,score\n";
    char buf[256];
    for (size_t i = 0; i < result.frames.size(); ++i) {
        const auto& f = result.frames[i];
        std::snprintf(buf, sizeof buf, "%zu,%c,%.4f,%.4f,%.4f,%.4f,%.6f,%.9e\n", i + 1,
                      status_code(f.status), f.box.left(), f.box.top(), f.box.w, f.box.h,
                      f.overlap, f.score);
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

BoundingBox synth_box_at(const SynthSpec& spec, int i) {
    const double t = static_cast<double>(i);
    double cx = spec.start_x != 0.0 ? spec.start_x : spec.width / 2.0;
    double cy = spec.start_y != 0.0 ? spec.start_y : spec.height / 2.0;
    switch (spec.motion.kind) {
        case MotionSpec::Kind::Linear:
            cx += spec.motion.vx * t;
            cy += spec.motion.vy * t;
            break;
        case MotionSpec::Kind::Sinusoid:
            cx += spec.motion.ax *
                  std::sin(2.0 * std::numbers::pi * t / spec.motion.period_x +
                           spec.motion.phase);
            cy += spec.motion.ay *
                  std::sin(2.0 * std::numbers::pi * t / spec.motion.period_y);
            break;
    }
    const double frac = spec.frames > 1 ? t / (spec.frames - 1) : 0.0;
    const double s = spec.scale_from + (spec.scale_to - spec.scale_from) * frac;
    return {cx, cy, spec.target_w * s, spec.target_h * s};
}

Sequence synth_sequence(const SynthSpec& spec, uint64_t seed) {
    if (spec.frames < 2) throw ArgumentError("synth: sequences need at least 2 frames");
    if (spec.width < 8 || spec.height < 8) throw ArgumentError("synth: frame too small");
    if (spec.target_w < 1.0 || spec.target_h < 1.0)
        throw ArgumentError("synth: target too small");
    const double smax = std::max(spec.scale_from, spec.scale_to);
    if (spec.target_w * smax > spec.width || spec.target_h * smax > spec.height)
        throw ArgumentError("synth: target larger than frame");

    Rng rng(seed);
    // Static low-contrast background: coarse noise bilinearly upsampled so
    // it stays smooth at pixel scale, shared by all frames.
    Frame background;
    background.width = spec.width;
    background.height = spec.height;
    background.v.resize(static_cast<size_t>(spec.width) * spec.height);
    const int coarse = 16;
    const int cw = spec.width / coarse + 2, chh = spec.height / coarse + 2;
    std::vector<double> knots(static_cast<size_t>(cw) * chh);
    for (auto& v : knots) v = 0.4 + spec.noise * (2.0 * rng.unit() - 1.0);
    for (int y = 0; y < spec.height; ++y) {
        const double fy = static_cast<double>(y) / coarse;
        const int y0 = static_cast<int>(fy);
        const double dy = fy - y0;
        for (int x = 0; x < spec.width; ++x) {
            const double fx = static_cast<double>(x) / coarse;
            const int x0 = static_cast<int>(fx);
            const double dx = fx - x0;
            const double a = knots[static_cast<size_t>(y0) * cw + x0] * (1 - dx) +
                             knots[static_cast<size_t>(y0) * cw + x0 + 1] * dx;
            const double b = knots[static_cast<size_t>(y0 + 1) * cw + x0] * (1 - dx) +
                             knots[static_cast<size_t>(y0 + 1) * cw + x0 + 1] * dx;
            background.at(x, y) = a * (1 - dy) + b * dy;
        }
    }

    // Checkerboard-plus-noise target texture at scale 1.
    const int tw = std::max(2, static_cast<int>(std::lround(spec.target_w)));
    const int th = std::max(2, static_cast<int>(std::lround(spec.target_h)));
    std::vector<double> tex(static_cast<size_t>(tw) * th);
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) {
            const double base = ((x / 4 + y / 4) % 2 == 0) ? 0.85 : 0.15;
            tex[static_cast<size_t>(y) * tw + x] =
                std::clamp(base + 0.15 * (2.0 * rng.unit() - 1.0), 0.0, 1.0);
        }
    auto tex_at = [&](double u, double v) {
        u = std::clamp(u * tw / spec.target_w - 0.5, 0.0, tw - 1.0);
        v = std::clamp(v * th / spec.target_h - 0.5, 0.0, th - 1.0);
        const int x0 = static_cast<int>(u), y0 = static_cast<int>(v);
        const int x1 = std::min(x0 + 1, tw - 1), y1 = std::min(y0 + 1, th - 1);
        const double du = u - x0, dv = v - y0;
        const double a = tex[static_cast<size_t>(y0) * tw + x0] * (1 - du) +
                         tex[static_cast<size_t>(y0) * tw + x1] * du;
        const double b = tex[static_cast<size_t>(y1) * tw + x0] * (1 - du) +
                         tex[static_cast<size_t>(y1) * tw + x1] * du;
        return a * (1 - dv) + b * dv;
    };

    Sequence seq;
    seq.name = "synthetic";
    for (int i = 0; i < spec.frames; ++i) {
        const BoundingBox box = synth_box_at(spec, i);
        Frame f = background;
        const double sx = box.w / spec.target_w;
        const double sy = box.h / spec.target_h;
        const int x_lo = std::max(0, static_cast<int>(std::floor(box.left())));
        const int x_hi = std::min(spec.width - 1, static_cast<int>(std::ceil(box.right())));
        const int y_lo = std::max(0, static_cast<int>(std::floor(box.top())));
        const int y_hi = std::min(spec.height - 1, static_cast<int>(std::ceil(box.bottom())));
        for (int y = y_lo; y <= y_hi; ++y) {
            const double py = y + 0.5;
            if (py < box.top() || py >= box.bottom()) continue;
            for (int x = x_lo; x <= x_hi; ++x) {
                const double px = x + 0.5;
                if (px < box.left() || px >= box.right()) continue;
                f.at(x, y) = tex_at((px - box.left()) / sx, (py - box.top()) / sy);
            }
        }
        seq.frames.push_back(std::move(f));
        seq.gt.push_back(box);
    }
    return seq;
}

void save_sequence(const Sequence& seq, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
    std::ofstream gt(fs::path(dir) / "groundtruth.txt");
    if (!gt) throw IoError("cannot write ground truth in " + dir);
    char buf[160];
    for (size_t i = 0; i < seq.size(); ++i) {
        const Frame f = seq.frame(i);
        save_pgm(f, (fs::path(dir) / (frame_name(i + 1) + ".pgm")).string());
        const auto& b = seq.gt[i];
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f\n", b.left(), b.top(), b.w,
                      b.h);
        gt << buf;
    }
    if (!gt) throw IoError("short write in " + dir);
}

}  // namespace sct
