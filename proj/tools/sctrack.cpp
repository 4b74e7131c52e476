#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "sct/bench.hpp"
#include "sct/common.hpp"
#include "sct/config.hpp"
#include "sct/selfcheck.hpp"
#include "sct/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Debug stub replaying ground truth; the init box locates the cursor by
// exact value match (boxes are copied verbatim from the ground truth).
struct OracleTracker final : sct::OnlineTracker {
    const sct::Sequence* seq = nullptr;
    size_t cursor = 0;

    void init(const sct::Frame&, const sct::BoundingBox& box) override {
        for (size_t i = cursor; i < seq->gt.size(); ++i) {
            const auto& g = seq->gt[i];
            if (g.cx == box.cx && g.cy == box.cy && g.w == box.w && g.h == box.h) {
                cursor = i;
                return;
            }
        }
    }
    sct::StepOut step(const sct::Frame&) override {
        ++cursor;
        return {seq->gt[std::min(cursor, seq->gt.size() - 1)], 1.0};
    }
};

sct::Params load_params(const std::string& config_path) {
    if (config_path.empty()) return sct::Params{};
    return sct::parse_config_file(config_path);
}

struct EvalJob {
    std::string dir;
    std::string csv_path;
    std::string json_path;
};

int run_eval(const std::vector<std::string>& dirs, const std::string& config_path,
             const std::string& output, int skip, int burn_in, bool oracle, int jobs) {
    const sct::Params params = load_params(config_path);
    std::vector<EvalJob> work;
    const bool single_csv = dirs.size() == 1 && output.size() > 4 &&
                            output.substr(output.size() - 4) == ".csv";
    for (const auto& dir : dirs) {
        EvalJob j;
        j.dir = dir;
        if (single_csv) {
            j.csv_path = output;
            j.json_path = output.substr(0, output.size() - 4) + "_metrics.json";
        } else {
            fs::create_directories(output);
            const std::string name = fs::path(dir).filename().string();
            j.csv_path = (fs::path(output) / (name + ".csv")).string();
            j.json_path = (fs::path(output) / (name + "_metrics.json")).string();
        }
        work.push_back(std::move(j));
    }

    std::atomic<size_t> next{0};
    std::atomic<int> worst{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            const auto& job = work[i];
            try {
                const sct::Sequence seq = sct::load_sequence(job.dir);
                sct::RunResult result;
                const auto t0 = std::chrono::steady_clock::now();
                if (oracle) {
                    OracleTracker stub;
                    stub.seq = &seq;
                    result = sct::run_reset_protocol(seq, stub, skip, burn_in);
                } else {
                    sct::Tracker tracker(sct::tracker_config(params));
                    result = sct::run_reset_protocol(seq, tracker, skip, burn_in);
                }
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                const sct::Metrics m = sct::compute_metrics(result, elapsed);
                sct::write_result_csv(job.csv_path, result);
                json rec = {{"sequence", seq.name},
                            {"accuracy", m.accuracy ? json(*m.accuracy) : json(nullptr)},
                            {"robustness", m.robustness},
                            {"frames_evaluated", m.frames_evaluated},
                            {"fps", m.fps},
                            {"config_hash", sct::config_hash(params)},
                            {"skip", skip},
                            {"burn_in", burn_in}};
                std::ofstream out(job.json_path);
                out << rec.dump(2) << "\n";
            } catch (const sct::NumericalError& e) {
                std::cerr << job.dir << ": " << e.what() << "\n";
                int cur = worst.load();
                while (cur < 3 && !worst.compare_exchange_weak(cur, 3)) {
                }
            } catch (const std::exception& e) {
                std::cerr << job.dir << ": " << e.what() << "\n";
                int cur = worst.load();
                while (cur < 2 && !worst.compare_exchange_weak(cur, 2)) {
                }
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return worst.load();
}

int run_track(const std::string& dir, const std::string& config_path,
              const std::string& output, size_t max_frames) {
    const sct::Params params = load_params(config_path);
    const sct::Sequence seq = sct::load_sequence(dir);
    sct::Tracker tracker(sct::tracker_config(params));
    const sct::RunResult result = sct::run_plain(seq, tracker, max_frames);
    sct::write_result_csv(output, result);
    return 0;
}

sct::MotionSpec parse_motion(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
    }
    sct::MotionSpec m;
    if (kind == "linear") {
        if (args.size() != 2) throw sct::FormatError("motion: linear needs vx,vy");
        m.kind = sct::MotionSpec::Kind::Linear;
        m.vx = args[0];
        m.vy = args[1];
    } else if (kind == "sinusoid" || kind == "sin") {
        if (args.size() < 4) throw sct::FormatError("motion: sinusoid needs ax,ay,px,py");
        m.kind = sct::MotionSpec::Kind::Sinusoid;
        m.ax = args[0];
        m.ay = args[1];
        m.period_x = args[2];
        m.period_y = args[3];
        if (args.size() > 4) m.phase = args[4];
    } else {
        throw sct::FormatError("motion: unknown kind '" + kind + "'");
    }
    return m;
}

int run_selftest(const std::string& fault) {
    sct::FaultInjection fi = sct::FaultInjection::None;
    if (fault == "interp-phase") fi = sct::FaultInjection::InterpPhase;
    else if (!fault.empty()) throw sct::FormatError("unknown fault '" + fault + "'");
    const auto checks = sct::run_selfchecks(fi);
    bool ok = true;
    for (const auto& c : checks) {
        std::printf("%s %s %.6e %.6e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.measured, c.tolerance);
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured convolution operator tracker"};
    app.require_subcommand(1);

    std::string config_path, output, seq_dir, motion_text = "linear:0,0", fault;
    std::vector<std::string> eval_dirs;
    int skip = 5, burn_in = 10, jobs = 1, frames = 50, size = 128;
    double target = 24.0, noise = 0.05, scale_from = 1.0, scale_to = 1.0;
    std::uint64_t seed = 0;
    std::size_t max_frames = 0;
    bool oracle = false;

    auto* track = app.add_subcommand("track", "run the tracker over a sequence");
    track->add_option("sequence", seq_dir, "VOT-layout sequence directory")->required();
    track->add_option("--config", config_path, "key = value config file");
    track->add_option("--output", output, "per-frame CSV path")->default_val("track_results.csv");
    track->add_option("--frames", max_frames, "process at most this many frames");

    auto* eval = app.add_subcommand("eval", "reset-protocol evaluation");
    eval->add_option("sequences", eval_dirs, "sequence directories")->required();
    eval->add_option("--config", config_path, "key = value config file");
    eval->add_option("--output", output, "output CSV path or directory")->default_val(".");
    eval->add_option("--skip", skip, "frames skipped after a failure");
    eval->add_option("--burn-in", burn_in, "frames excluded after re-init");
    eval->add_flag("--oracle", oracle, "debug: replay ground truth");
    eval->add_option("--jobs", jobs, "parallel sequence evaluations");

    auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    synth->add_option("output", seq_dir, "output directory")->required();
    synth->add_option("--frames", frames, "frame count");
    synth->add_option("--size", size, "frame side in pixels");
    synth->add_option("--target", target, "target side in pixels");
    synth->add_option("--motion", motion_text, "linear:vx,vy or sinusoid:ax,ay,px,py[,phase]");
    synth->add_option("--seed", seed, "texture/noise seed");
    synth->add_option("--noise", noise, "background noise amplitude");
    synth->add_option("--scale-from", scale_from, "target scale at the first frame");
    synth->add_option("--scale-to", scale_to, "target scale at the last frame");

    auto* selftest = app.add_subcommand("selftest", "run the analytic invariant suite");
    selftest->add_option("--inject-fault", fault, "debug fault (interp-phase)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (track->parsed()) return run_track(seq_dir, config_path, output, max_frames);
        if (eval->parsed())
            return run_eval(eval_dirs, config_path, output, skip, burn_in, oracle, jobs);
        if (synth->parsed()) {
            sct::SynthSpec spec;
            spec.frames = frames;
            spec.width = spec.height = size;
            spec.target_w = spec.target_h = target;
            spec.motion = parse_motion(motion_text);
            spec.noise = noise;
            spec.scale_from = scale_from;
            spec.scale_to = scale_to;
            sct::save_sequence(sct::synth_sequence(spec, seed), seq_dir);
            return 0;
        }
        if (selftest->parsed()) return run_selftest(fault);
    } catch (const sct::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
