#include "sct/image.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "sct/common.hpp"

namespace sct {

namespace {

// PGM (P5) reader. Handles '#' comments in the header and maxval up to 255.
Frame load_pgm(std::ifstream& in, const std::string& path) {
    auto next_token = [&]() -> std::string {
        std::string tok;
        int ch;
        while ((ch = in.get()) != EOF) {
            if (ch == '#') {
                while ((ch = in.get()) != EOF && ch != '\n') {
                }
                continue;
            }
            if (std::isspace(ch)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(ch));
        }
        if (tok.empty()) throw FormatError(path + ": truncated PGM header");
        return tok;
    };
    auto parse_int = [&](const std::string& tok) {
        size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(tok, &pos);
        } catch (const std::exception&) {
            throw FormatError(path + ": bad PGM header token '" + tok + "'");
        }
        if (pos != tok.size()) throw FormatError(path + ": bad PGM header token '" + tok + "'");
        return v;
    };
    const long w = parse_int(next_token());
    const long h = parse_int(next_token());
    const long maxval = parse_int(next_token());
    if (w < 1 || h < 1) throw FormatError(path + ": bad PGM dimensions");
    if (maxval < 1 || maxval > 255)
        throw FormatError(path + ": unsupported PGM maxval " + std::to_string(maxval));
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw FormatError(path + ": truncated PGM pixel data");
    Frame f;
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    f.v.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) f.v[i] = raw[i] / static_cast<double>(maxval);
    return f;
}

struct PngCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

Frame load_png(const std::string& path) {
    PngCloser st;
    st.fp = std::fopen(path.c_str(), "rb");
    if (!st.fp) throw IoError("cannot open " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, st.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw FormatError(path + ": not a PNG file");
    st.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!st.png) throw IoError("png_create_read_struct failed");
    st.info = png_create_info_struct(st.png);
    if (!st.info) throw IoError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(st.png))) throw FormatError(path + ": PNG decode error");
    png_init_io(st.png, st.fp);
    png_set_sig_bytes(st.png, 8);
    png_read_info(st.png, st.info);

    if (png_get_bit_depth(st.png, st.info) > 8)
        throw FormatError(path + ": 16-bit PNG is unsupported");
    const png_byte color = png_get_color_type(st.png, st.info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(st.png);
    if (png_get_bit_depth(st.png, st.info) < 8) png_set_expand_gray_1_2_4_to_8(st.png);
    if (png_get_valid(st.png, st.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(st.png);
    png_set_strip_alpha(st.png);
    png_read_update_info(st.png, st.info);

    const png_uint_32 w = png_get_image_width(st.png, st.info);
    const png_uint_32 h = png_get_image_height(st.png, st.info);
    const int channels = png_get_channels(st.png, st.info);
    if (channels != 1 && channels != 3)
        throw FormatError(path + ": unsupported PNG channel count");
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = raw.data() + static_cast<size_t>(y) * w * channels;
    png_read_image(st.png, rows.data());

    Frame f;
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    f.v.resize(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < f.v.size(); ++i) {
        if (channels == 1) {
            f.v[i] = raw[i] / 255.0;
        } else {
            const unsigned char* p = &raw[i * 3];
            f.v[i] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
        }
    }
    return f;
}

}  // namespace

Frame load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5') return load_pgm(in, path);
    in.close();
    if (in.rdstate() != std::ios::goodbit) in.clear();
    unsigned char sig[4] = {0};
    {
        std::ifstream probe(path, std::ios::binary);
        probe.read(reinterpret_cast<char*>(sig), 4);
    }
    if (sig[0] == 0x89 && sig[1] == 'P' && sig[2] == 'N' && sig[3] == 'G')
        return load_png(path);
    throw FormatError(path + ": unsupported image format (expected PGM P5 or PNG)");
}

void save_pgm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    std::vector<unsigned char> raw(frame.v.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        const double v = std::min(1.0, std::max(0.0, frame.v[i]));
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write to " + path);
}

double bilinear_sample(const Frame& frame, double x, double y) {
    // Pixel (i, j) holds the value at center (i + 0.5, j + 0.5); positions
    // beyond the border clamp to the edge pixel (replicate padding).
    const double u = x - 0.5, v = y - 0.5;
    const double fu = std::floor(u), fv = std::floor(v);
    const double du = u - fu, dv = v - fv;
    auto clampi = [](long i, int n) {
        return static_cast<int>(std::min<long>(std::max<long>(i, 0), n - 1));
    };
    const int x0 = clampi(static_cast<long>(fu), frame.width);
    const int x1 = clampi(static_cast<long>(fu) + 1, frame.width);
    const int y0 = clampi(static_cast<long>(fv), frame.height);
    const int y1 = clampi(static_cast<long>(fv) + 1, frame.height);
    const double a = frame.at(x0, y0) * (1 - du) + frame.at(x1, y0) * du;
    const double b = frame.at(x0, y1) * (1 - du) + frame.at(x1, y1) * du;
    return a * (1 - dv) + b * dv;
}

Patch extract_search_patch(const Frame& frame, const BoundingBox& bbox, double scale,
                           int side) {
    if (!bbox.valid()) throw ArgumentError("extract_search_patch: box size must be > 0");
    if (scale <= 0.0) throw ArgumentError("extract_search_patch: scale must be > 0");
    if (side < 1) throw ArgumentError("extract_search_patch: bad sample side");
    const double src_side = 5.0 * std::sqrt(bbox.w * bbox.h) * scale;
    Patch p;
    p.side = side;
    p.v.resize(static_cast<size_t>(side) * side);
    p.region = {bbox.cx, bbox.cy, src_side, src_side};
    p.resample_scale = src_side / side;
    for (int i = 0; i < side; ++i) {
        const double y = bbox.cy + (i + 0.5 - side / 2.0) * p.resample_scale;
        for (int j = 0; j < side; ++j) {
            const double x = bbox.cx + (j + 0.5 - side / 2.0) * p.resample_scale;
            p.at(j, i) = bilinear_sample(frame, x, y);
        }
    }
    return p;
}

}  // namespace sct
