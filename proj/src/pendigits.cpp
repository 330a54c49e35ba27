#include "anonet/pendigits.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anonet/errors.hpp"
#include "anonet/rng.hpp"

namespace anonet::data {

namespace {

void draw_segment(RasterImage& img, long x0, long y0, long x1, long y1) {
    // Bresenham over all octants.
    const long dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const long dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    for (;;) {
        img.pixels[static_cast<std::size_t>(y0) * kRasterSize + static_cast<std::size_t>(x0)] = 1;
        if (x0 == x1 && y0 == y1) break;
        const long e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

RasterImage rasterize(const PenTrajectory& traj) {
    if (traj.points.size() < 2) throw InputError("rasterize: trajectory needs at least 2 points");
    for (const auto& p : traj.points)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw InputError("rasterize: non-finite coordinate");

    double xmin = traj.points[0][0], xmax = xmin;
    double ymin = traj.points[0][1], ymax = ymin;
    for (const auto& p : traj.points) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    const double dx = xmax - xmin, dy = ymax - ymin;
    const double span = static_cast<double>(kRasterSize - 1);

    RasterImage img;
    if (dx == 0.0 && dy == 0.0) {
        // Degenerate pen-hold: a single centered pixel, flagged.
        img.degenerate = true;
        img.pixels[(kRasterSize / 2) * kRasterSize + kRasterSize / 2] = 1;
        return img;
    }

    // One scale for both axes keeps the aspect ratio; the constraining axis
    // spans the full frame and the other is centered.
    const double scale = span / std::max(dx, dy);
    const double off_x = 0.5 * (span - dx * scale);
    const double off_y = 0.5 * (span - dy * scale);

    long px_prev = 0, py_prev = 0;
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const double fx = (traj.points[i][0] - xmin) * scale + off_x;
        // Pen y grows upward; raster rows grow downward.
        const double fy = (ymax - traj.points[i][1]) * scale + off_y;
        const long px = std::lround(fx);
        const long py = std::lround(fy);
        if (i == 0)
            img.pixels[static_cast<std::size_t>(py) * kRasterSize + static_cast<std::size_t>(px)] = 1;
        else
            draw_segment(img, px_prev, py_prev, px, py);
        px_prev = px;
        py_prev = py;
    }
    return img;
}

std::vector<double> downsample(const RasterImage& img) {
    constexpr std::size_t block = kRasterSize / kImageSize;
    static_assert(block * kImageSize == kRasterSize);
    std::vector<double> out(kImageSize * kImageSize, 0.0);
    for (std::size_t r = 0; r < kImageSize; ++r) {
        for (std::size_t c = 0; c < kImageSize; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < block; ++i)
                for (std::size_t j = 0; j < block; ++j)
                    sum += img.at(r * block + i, c * block + j);
            out[r * kImageSize + c] = sum / static_cast<double>(block * block);
        }
    }
    return out;
}

std::vector<double> preprocess(const PenTrajectory& traj) { return downsample(rasterize(traj)); }

Dataset preprocess_all(const std::vector<PenTrajectory>& trajectories, std::size_t writer_count) {
    Dataset d;
    d.feature_dim = kImageSize * kImageSize;
    d.y_alphabet = 10;
    d.z_alphabet = writer_count;
    d.samples.resize(trajectories.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& t = trajectories[i];
        d.samples[i].features = preprocess(t);
        d.samples[i].y = t.digit;
        d.samples[i].z = t.writer;
    }
    d.validate();
    return d;
}

std::vector<PenTrajectory> load_unipen(const std::string& path, std::size_t samples_per_writer) {
    std::ifstream in(path);
    if (!in) throw InputError("load_unipen: cannot open " + path);

    std::vector<PenTrajectory> out;
    PenTrajectory current;
    bool in_segment = false;
    bool pen_down = false;
    bool saw_writer_marker = false;
    std::size_t writer = 0;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&]() {
        if (!in_segment) return;
        if (current.points.size() < 2)
            throw ParseError("load_unipen: segment with fewer than 2 points", line_no);
        out.push_back(std::move(current));
        current = PenTrajectory{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        // Trim trailing CR for DOS-style files.
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;

        if (line[0] == '.') {
            std::istringstream ls(line);
            std::string directive;
            ls >> directive;
            for (char& ch : directive) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (directive == ".SEGMENT") {
                flush();
                const auto q1 = line.find('"');
                const auto q2 = q1 == std::string::npos ? std::string::npos : line.find('"', q1 + 1);
                if (q1 == std::string::npos || q2 == std::string::npos || q2 <= q1 + 1)
                    throw ParseError("load_unipen: .SEGMENT without quoted label", line_no);
                const std::string label = line.substr(q1 + 1, q2 - q1 - 1);
                int digit = -1;
                try {
                    digit = std::stoi(label);
                } catch (...) {
                    throw ParseError("load_unipen: non-numeric segment label '" + label + "'", line_no);
                }
                if (digit < 0 || digit > 9)
                    throw ParseError("load_unipen: digit label out of range", line_no);
                in_segment = true;
                pen_down = false;
                current.digit = static_cast<std::size_t>(digit);
                if (saw_writer_marker) {
                    current.writer = writer;
                } else if (samples_per_writer > 0) {
                    current.writer = out.size() / samples_per_writer;
                } else {
                    current.writer = 0;
                }
            } else if (directive == ".PEN_DOWN") {
                pen_down = true;
            } else if (directive == ".PEN_UP") {
                pen_down = false;
            } else if (directive == ".COMMENT") {
                std::string word;
                while (ls >> word) {
                    std::string lower = word;
                    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                    if (lower == "writer") {
                        std::size_t id = 0;
                        if (ls >> id) {
                            writer = id;
                            saw_writer_marker = true;
                        }
                        break;
                    }
                }
            }
            // Other directives (.VERSION, .COORD, ...) are ignored.
            continue;
        }

        if (!in_segment || !pen_down) continue;
        std::istringstream ls(line);
        double x = 0.0, y = 0.0;
        if (!(ls >> x >> y)) throw ParseError("load_unipen: bad coordinate line", line_no);
        current.points.push_back({x, y});
    }
    flush();
    return out;
}

namespace {

// Single-stroke control polylines for the ten digits, unit box, y up.
const std::vector<std::vector<std::array<double, 2>>>& digit_templates() {
    static const std::vector<std::vector<std::array<double, 2>>> templates = [] {
        std::vector<std::vector<std::array<double, 2>>> t(10);
        // 0: closed oval
        for (int k = 0; k <= 16; ++k) {
            const double a = 2.0 * M_PI * k / 16.0 + M_PI / 2.0;
            t[0].push_back({0.5 + 0.32 * std::cos(a), 0.5 + 0.5 * std::sin(a)});
        }
        t[1] = {{0.40, 0.80}, {0.55, 1.00}, {0.55, 0.00}};
        t[2] = {{0.20, 0.80}, {0.30, 0.95}, {0.50, 1.00}, {0.70, 0.95}, {0.80, 0.78},
                {0.72, 0.58}, {0.20, 0.00}, {0.80, 0.00}};
        t[3] = {{0.20, 0.95}, {0.50, 1.00}, {0.78, 0.85}, {0.72, 0.62}, {0.48, 0.52},
                {0.78, 0.38}, {0.74, 0.10}, {0.48, 0.00}, {0.20, 0.06}};
        t[4] = {{0.68, 1.00}, {0.15, 0.42}, {0.20, 0.35}, {0.85, 0.35}, {0.68, 0.72}, {0.68, 0.00}};
        t[5] = {{0.80, 1.00}, {0.22, 1.00}, {0.20, 0.56}, {0.58, 0.60}, {0.80, 0.42},
                {0.76, 0.12}, {0.46, 0.00}, {0.20, 0.10}};
        t[6] = {{0.74, 0.96}, {0.42, 0.70}, {0.22, 0.38}, {0.28, 0.08}, {0.58, 0.00},
                {0.80, 0.18}, {0.72, 0.42}, {0.42, 0.46}, {0.24, 0.32}};
        t[7] = {{0.15, 1.00}, {0.85, 1.00}, {0.50, 0.46}, {0.34, 0.00}};
        t[8] = {{0.50, 0.52}, {0.26, 0.70}, {0.30, 0.94}, {0.50, 1.00}, {0.70, 0.94},
                {0.74, 0.70}, {0.50, 0.52}, {0.26, 0.32}, {0.30, 0.06}, {0.50, 0.00},
                {0.70, 0.06}, {0.74, 0.32}, {0.50, 0.52}};
        t[9] = {{0.76, 0.72}, {0.62, 0.92}, {0.36, 0.96}, {0.20, 0.76}, {0.28, 0.54},
                {0.58, 0.52}, {0.76, 0.72}, {0.70, 0.30}, {0.54, 0.00}};
        return t;
    }();
    return templates;
}

// Arc-length resampling to a fixed point count.
std::vector<std::array<double, 2>> resample(const std::vector<std::array<double, 2>>& poly,
                                            std::size_t count) {
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < poly.size(); ++i) {
        const double dx = poly[i][0] - poly[i - 1][0];
        const double dy = poly[i][1] - poly[i - 1][1];
        cum.push_back(cum.back() + std::hypot(dx, dy));
    }
    const double total = cum.back();
    std::vector<std::array<double, 2>> out(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
        while (seg + 1 < cum.size() - 1 && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double w = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        out[k] = {poly[seg][0] + w * (poly[seg + 1][0] - poly[seg][0]),
                  poly[seg][1] + w * (poly[seg + 1][1] - poly[seg][1])};
    }
    return out;
}

struct WriterStyle {
    double shear;
    double scale_x, scale_y;
    double rotation;
    double wave_amp_x, wave_amp_y, wave_phase_x, wave_phase_y;
    // Personal letterform: one smooth displacement per digit control point.
    std::vector<std::vector<std::array<double, 2>>> deformation;
};

WriterStyle make_style(std::size_t writer, double strength, std::uint64_t seed) {
    RngStream rng(seed, 1000 + writer);
    WriterStyle s;
    s.shear = 0.35 * strength * rng.normal();
    s.scale_x = 1.0 + 0.16 * strength * rng.normal();
    s.scale_y = 1.0 + 0.16 * strength * rng.normal();
    s.rotation = 0.12 * strength * rng.normal();
    s.wave_amp_x = 0.05 * strength * rng.normal();
    s.wave_amp_y = 0.05 * strength * rng.normal();
    s.wave_phase_x = rng.uniform(0.0, 2.0 * M_PI);
    s.wave_phase_y = rng.uniform(0.0, 2.0 * M_PI);
    s.deformation.resize(10);
    const auto& templates = digit_templates();
    for (std::size_t d = 0; d < 10; ++d) {
        s.deformation[d].resize(templates[d].size());
        for (auto& disp : s.deformation[d])
            disp = {0.045 * strength * rng.normal(), 0.045 * strength * rng.normal()};
    }
    return s;
}

}  // namespace

std::vector<PenTrajectory> surrogate_pendigits(const SurrogateSpec& spec) {
    if (spec.writers == 0 || spec.samples_per_pair == 0)
        throw ConfigError("surrogate_pendigits: empty corpus requested");

    const auto& templates = digit_templates();
    std::vector<WriterStyle> styles;
    styles.reserve(spec.writers);
    for (std::size_t w = 0; w < spec.writers; ++w)
        styles.push_back(make_style(w, spec.style_strength, spec.seed));

    std::vector<PenTrajectory> out;
    out.reserve(spec.writers * 10 * spec.samples_per_pair);
    RngStream rng(spec.seed, 2);
    for (std::size_t w = 0; w < spec.writers; ++w) {
        const auto& style = styles[w];
        for (std::size_t d = 0; d < 10; ++d) {
            // Writer's personal letterform for this digit.
            auto base = templates[d];
            for (std::size_t i = 0; i < base.size(); ++i) {
                base[i][0] += style.deformation[d][i][0];
                base[i][1] += style.deformation[d][i][1];
            }
            const auto shape = resample(base, 40);
            for (std::size_t rep = 0; rep < spec.samples_per_pair; ++rep) {
                PenTrajectory traj;
                traj.digit = d;
                traj.writer = w;
                traj.points.reserve(shape.size());
                const double rep_rot = 0.03 * rng.normal();
                const double rep_scale = 1.0 + 0.04 * rng.normal();
                const double cos_r = std::cos(style.rotation + rep_rot);
                const double sin_r = std::sin(style.rotation + rep_rot);
                for (const auto& p : shape) {
                    double x = (p[0] - 0.5) * style.scale_x;
                    double y = (p[1] - 0.5) * style.scale_y;
                    x += style.shear * y;
                    x += style.wave_amp_x * std::sin(M_PI * y + style.wave_phase_x);
                    y += style.wave_amp_y * std::sin(M_PI * x + style.wave_phase_y);
                    const double xr = rep_scale * (cos_r * x - sin_r * y) + spec.jitter * rng.normal();
                    const double yr = rep_scale * (sin_r * x + cos_r * y) + spec.jitter * rng.normal();
                    traj.points.push_back({xr, yr});
                }
                out.push_back(std::move(traj));
            }
        }
    }
    return out;
}

}  // namespace anonet::data
