#include "sct/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sct/common.hpp"

namespace sct {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key,
                    const std::string& origin) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw FormatError(origin + ": bad value '" + v + "' for key '" + key + "'");
}

int parse_int(const std::string& v, const std::string& key, const std::string& origin) {
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos == v.size()) return static_cast<int>(d);
    } catch (const std::exception&) {
    }
    throw FormatError(origin + ": bad value '" + v + "' for key '" + key + "'");
}

bool parse_bool(const std::string& v, const std::string& key, const std::string& origin) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw FormatError(origin + ": bad value '" + v + "' for key '" + key + "'");
}

}  // namespace

Params parse_config_text(const std::string& text, const std::string& origin) {
    Params p;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "c") p.c = parse_double(val, key, origin);
        else if (key == "mu") p.mu = parse_double(val, key, origin);
        else if (key == "eta") p.eta = parse_double(val, key, origin);
        else if (key == "sigma_factor") p.sigma_factor = parse_double(val, key, origin);
        else if (key == "scales") p.scales = parse_int(val, key, origin);
        else if (key == "scale_step") p.scale_step = parse_double(val, key, origin);
        else if (key == "scale_min") p.scale_min = parse_double(val, key, origin);
        else if (key == "scale_max") p.scale_max = parse_double(val, key, origin);
        else if (key == "update_interval") p.update_interval = parse_int(val, key, origin);
        else if (key == "alt_iters") p.alt_iters = parse_int(val, key, origin);
        else if (key == "cg_iters") p.cg_iters = parse_int(val, key, origin);
        else if (key == "init_iters") p.init_iters = parse_int(val, key, origin);
        else if (key == "cg_tol") p.cg_tol = parse_double(val, key, origin);
        else if (key == "sample_side") p.sample_side = parse_int(val, key, origin);
        else if (key == "hog_cell") p.hog_cell = parse_int(val, key, origin);
        else if (key == "hog_orientations") p.hog_orientations = parse_int(val, key, origin);
        else if (key == "memory_size") p.memory_size = parse_int(val, key, origin);
        else if (key == "learning_rate") p.learning_rate = parse_double(val, key, origin);
        else if (key == "grid_factor") p.grid_factor = parse_int(val, key, origin);
        else if (key == "newton_iters") p.newton_iters = parse_int(val, key, origin);
        else if (key == "window") p.window = parse_bool(val, key, origin);
        else if (key == "seed") p.seed = static_cast<uint64_t>(parse_double(val, key, origin));
        else if (key == "trace_dir") p.trace_dir = val;
        else
            throw FormatError(origin + ":" + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
    }
    return p;
}

Params parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

TrackerConfig tracker_config(const Params& p) {
    TrackerConfig cfg;
    cfg.feat.sample_side = std::clamp(p.sample_side, 200, 300);
    cfg.feat.hog_cell = p.hog_cell;
    cfg.feat.hog_orientations = p.hog_orientations;
    cfg.feat.window = p.window;
    cfg.train.C = p.c;
    cfg.train.cg_iters = p.cg_iters;
    cfg.train.alt_iters = p.alt_iters;
    cfg.train.init_iters = p.init_iters;
    cfg.train.update_interval = p.update_interval;
    cfg.train.cg_tol = p.cg_tol;
    cfg.train.grid_factor = p.grid_factor;
    cfg.train.newton_iters = p.newton_iters;
    cfg.scale.num_scales = p.scales;
    cfg.scale.step = p.scale_step;
    cfg.scale.s_min = p.scale_min;
    cfg.scale.s_max = p.scale_max;
    cfg.sigma_factor = p.sigma_factor;
    cfg.reg_mu = p.mu;
    cfg.reg_eta = p.eta;
    cfg.memory_size = p.memory_size;
    cfg.learning_rate = p.learning_rate;
    cfg.trace_dir = p.trace_dir;
    return cfg;
}

std::string config_hash(const Params& p) {
    std::map<std::string, std::string> kv;
    char buf[64];
    auto put_d = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        kv[k] = buf;
    };
    auto put_i = [&](const char* k, long long v) { kv[k] = std::to_string(v); };
    put_d("c", p.c);
    put_d("mu", p.mu);
    put_d("eta", p.eta);
    put_d("sigma_factor", p.sigma_factor);
    put_i("scales", p.scales);
    put_d("scale_step", p.scale_step);
    put_d("scale_min", p.scale_min);
    put_d("scale_max", p.scale_max);
    put_i("update_interval", p.update_interval);
    put_i("alt_iters", p.alt_iters);
    put_i("cg_iters", p.cg_iters);
    put_i("init_iters", p.init_iters);
    put_d("cg_tol", p.cg_tol);
    put_i("sample_side", p.sample_side);
    put_i("hog_cell", p.hog_cell);
    put_i("hog_orientations", p.hog_orientations);
    put_i("memory_size", p.memory_size);
    put_d("learning_rate", p.learning_rate);
    put_i("grid_factor", p.grid_factor);
    put_i("newton_iters", p.newton_iters);
    put_i("window", p.window ? 1 : 0);
    put_i("seed", static_cast<long long>(p.seed));

    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const std::string& s) {
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kv) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sct
