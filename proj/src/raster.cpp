#include "glyphforge/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <utility>

#include "glyphforge/error.hpp"
#include "glyphforge/parallel.hpp"

namespace glyphforge {
namespace {

struct Cell {
    float area = 0.0f;
    float cover = 0.0f;
};

struct CellGrid {
    int width = 0;
    int height = 0;
    std::vector<Cell> cells;

    CellGrid(int w, int h) : width(w), height(h), cells(static_cast<size_t>(w) * h) {}
};

struct Pt {
    double x = 0.0;
    double y = 0.0;
};

// Scanline cell accumulation: each edge deposits signed winding (cover) and
// partial-pixel area into the cells it crosses; a left-to-right pass later
// integrates cover into coverage values.
void draw_edge(CellGrid& grid, Pt origin, Pt goal) {
    double dx = goal.x - origin.x;
    double dy = goal.y - origin.y;
    int dir_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
    int dir_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
    if (dir_y == 0)
        return;

    double crossing_incr_x = dir_x != 0 ? std::abs(1.0 / dx) : 1.0;
    double crossing_incr_y = std::abs(1.0 / dy);

    int px, py;
    double next_crossing_x, next_crossing_y;
    long long num_steps = 0;

    if (dir_x == 0) {
        px = static_cast<int>(std::floor(origin.x));
        next_crossing_x = 1e30;
    } else if (dir_x > 0) {
        px = static_cast<int>(std::floor(origin.x));
        next_crossing_x = crossing_incr_x - (origin.x - px) * crossing_incr_x;
        num_steps += static_cast<long long>(std::ceil(goal.x)) - std::floor(origin.x) - 1;
    } else {
        px = static_cast<int>(std::ceil(origin.x)) - 1;
        next_crossing_x = (origin.x - px) * crossing_incr_x;
        num_steps += static_cast<long long>(std::ceil(origin.x)) - std::floor(goal.x) - 1;
    }

    if (dir_y > 0) {
        py = static_cast<int>(std::floor(origin.y));
        next_crossing_y = crossing_incr_y - (origin.y - py) * crossing_incr_y;
        num_steps += static_cast<long long>(std::ceil(goal.y)) - std::floor(origin.y) - 1;
    } else {
        py = static_cast<int>(std::ceil(origin.y)) - 1;
        next_crossing_y = (origin.y - py) * crossing_incr_y;
        num_steps += static_cast<long long>(std::ceil(origin.y)) - std::floor(goal.y) - 1;
    }

    double prev_distance = 0.0;
    double next_distance = std::min(next_crossing_x, next_crossing_y);
    double half_dx = 0.5 * dx;

    auto deposit = [&](double from, double to) {
        double x_average = origin.x + (from + to) * half_dx;
        double y_difference = (to - from) * dy;
        Cell& cell = grid.cells[static_cast<size_t>(py) * grid.width + px];
        cell.cover += static_cast<float>(y_difference);
        cell.area += static_cast<float>((1.0 - (x_average - px)) * y_difference);
    };

    for (long long step = 0; step < num_steps; ++step) {
        deposit(prev_distance, next_distance);
        prev_distance = next_distance;
        if (next_crossing_x < next_crossing_y) {
            px += dir_x;
            next_crossing_x += crossing_incr_x;
        } else {
            py += dir_y;
            next_crossing_y += crossing_incr_y;
        }
        next_distance = std::min(next_crossing_x, next_crossing_y);
    }
    deposit(prev_distance, 1.0);
}

void flatten_quad(CellGrid& grid, Pt p0, Pt ctrl, Pt p1, int depth) {
    double ex = 0.5 * (p0.x + p1.x) - ctrl.x;
    double ey = 0.5 * (p0.y + p1.y) - ctrl.y;
    if (depth >= 16 || ex * ex + ey * ey < 0.02) {
        draw_edge(grid, p0, p1);
        return;
    }
    Pt a{0.5 * (p0.x + ctrl.x), 0.5 * (p0.y + ctrl.y)};
    Pt b{0.5 * (ctrl.x + p1.x), 0.5 * (ctrl.y + p1.y)};
    Pt mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    flatten_quad(grid, p0, a, mid, depth + 1);
    flatten_quad(grid, mid, b, p1, depth + 1);
}

// Expands a raw contour so that it starts on-curve and has an explicit
// on-curve point between any two consecutive control points.
std::vector<OutlinePoint> expand_contour(const Contour& contour) {
    size_t n = contour.size();
    std::vector<OutlinePoint> out;
    out.reserve(n * 2 + 2);

    size_t first_on = n;
    for (size_t i = 0; i < n; ++i) {
        if (contour[i].on_curve) {
            first_on = i;
            break;
        }
    }
    if (first_on == n) {
        OutlinePoint synth;
        synth.x = 0.5f * (contour[n - 1].x + contour[0].x);
        synth.y = 0.5f * (contour[n - 1].y + contour[0].y);
        synth.on_curve = true;
        out.push_back(synth);
        first_on = 0;
        for (size_t i = 0; i < n; ++i)
            out.push_back(contour[i]);
    } else {
        for (size_t i = 0; i < n; ++i)
            out.push_back(contour[(first_on + i) % n]);
    }

    std::vector<OutlinePoint> expanded;
    expanded.reserve(out.size() * 2);
    for (size_t i = 0; i < out.size(); ++i) {
        if (i > 0 && !out[i - 1].on_curve && !out[i].on_curve) {
            OutlinePoint mid;
            mid.x = 0.5f * (out[i - 1].x + out[i].x);
            mid.y = 0.5f * (out[i - 1].y + out[i].y);
            mid.on_curve = true;
            expanded.push_back(mid);
        }
        expanded.push_back(out[i]);
    }
    if (!expanded.back().on_curve) {
        OutlinePoint mid;
        mid.x = 0.5f * (expanded.back().x + expanded.front().x);
        mid.y = 0.5f * (expanded.back().y + expanded.front().y);
        mid.on_curve = true;
        expanded.push_back(mid);
    }
    expanded.push_back(expanded.front()); // close
    return expanded;
}

void render_contour(CellGrid& grid, const Contour& contour, double scale, double shift_x,
                    double shift_y) {
    if (contour.size() < 2)
        return;
    std::vector<OutlinePoint> pts = expand_contour(contour);

    auto to_pixels = [&](const OutlinePoint& p) -> Pt {
        double x = p.x * scale + shift_x;
        double y = shift_y - p.y * scale; // y grows downward in image space
        x = std::clamp(x, 0.0, static_cast<double>(grid.width));
        y = std::clamp(y, 0.0, static_cast<double>(grid.height));
        return {x, y};
    };

    Pt cur = to_pixels(pts[0]);
    size_t i = 0;
    while (i + 1 < pts.size()) {
        if (pts[i + 1].on_curve) {
            Pt nxt = to_pixels(pts[i + 1]);
            draw_edge(grid, cur, nxt);
            cur = nxt;
            i += 1;
        } else {
            Pt ctrl = to_pixels(pts[i + 1]);
            Pt nxt = to_pixels(pts[i + 2]);
            flatten_quad(grid, cur, ctrl, nxt, 0);
            cur = nxt;
            i += 2;
        }
    }
}

struct RasterTask {
    std::string path;
    uint32_t face_index = 0;
};

struct RasterSlot {
    bool ok = false;
    FontRecord record;
    std::string reason;
    RasterTask task;
};

} // namespace

RasterImage rasterize_outline(const GlyphOutline& outline, float scale) {
    if (scale <= 0.0f)
        fail(ErrorKind::invalid_argument, "scale must be positive");
    if (outline.empty())
        return {};

    OutlineBounds b = outline.bounds();
    int pad = 2;
    int width = static_cast<int>(std::ceil(b.width() * scale)) + 2 * pad + 1;
    int height = static_cast<int>(std::ceil(b.height() * scale)) + 2 * pad + 1;
    double shift_x = pad - static_cast<double>(b.xmin) * scale;
    double shift_y = static_cast<double>(b.ymax) * scale + pad;

    CellGrid grid(width, height);
    for (const Contour& contour : outline.contours)
        render_contour(grid, contour, scale, shift_x, shift_y);

    RasterImage image;
    image.width = width;
    image.height = height;
    image.pixels.resize(static_cast<size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        double accum = 0.0;
        for (int x = 0; x < width; ++x) {
            const Cell& cell = grid.cells[static_cast<size_t>(y) * width + x];
            double value = std::min(std::abs(accum + cell.area), 1.0);
            image.pixels[static_cast<size_t>(y) * width + x] =
                static_cast<uint8_t>(value * 255.0 + 0.5);
            accum += cell.cover;
        }
    }
    return image;
}

InkBox raster_ink_box(const RasterImage& image) {
    InkBox box;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (image.at(x, y) == 0)
                continue;
            if (box.empty()) {
                box = {x, y, x, y};
            } else {
                box.x0 = std::min(box.x0, x);
                box.y0 = std::min(box.y0, y);
                box.x1 = std::max(box.x1, x);
                box.y1 = std::max(box.y1, y);
            }
        }
    }
    return box;
}

namespace {

std::array<GlyphOutline, kLetterCount> letter_outlines(const FontFace& face) {
    std::array<GlyphOutline, kLetterCount> outlines;
    for (int i = 0; i < kLetterCount; ++i)
        outlines[i] = face.letter_outline(index_letter(i));
    return outlines;
}

// Max ink dimension over all letters at a given scale; 0 when all blank.
int max_ink_dim(const std::array<GlyphOutline, kLetterCount>& outlines, float scale) {
    int max_dim = 0;
    for (const GlyphOutline& o : outlines) {
        if (o.empty())
            continue;
        RasterImage img = rasterize_outline(o, scale);
        InkBox box = raster_ink_box(img);
        if (box.empty())
            continue;
        max_dim = std::max(max_dim, std::max(box.width(), box.height()));
    }
    return max_dim;
}

float normalize_scale_over(const std::array<GlyphOutline, kLetterCount>& outlines) {
    float max_units = 0.0f;
    bool any_ink = false;
    for (const GlyphOutline& o : outlines) {
        if (o.empty())
            continue;
        any_ink = true;
        OutlineBounds b = o.bounds();
        max_units = std::max(max_units, std::max(b.width(), b.height()));
    }
    if (!any_ink || max_units <= 0.0f)
        fail(ErrorKind::font_rejected, "all capital glyphs are blank");

    auto fits = [&](float s) { return max_ink_dim(outlines, s) <= kGlyphSize; };

    float lo = static_cast<float>(kGlyphSize) / max_units;
    while (!fits(lo)) {
        lo *= 0.5f;
        if (lo < 1e-9f)
            fail(ErrorKind::font_rejected, "glyphs never fit the target frame");
    }
    float hi = lo * 1.05f;
    int guard = 0;
    while (fits(hi) && guard++ < 200) {
        lo = hi;
        hi *= 1.05f;
    }
    if (guard > 200)
        fail(ErrorKind::font_rejected, "scale search failed to bracket");

    while ((hi - lo) / lo >= 1e-4f) {
        float mid = 0.5f * (lo + hi);
        if (fits(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

float normalize_scale(const FontFace& face) {
    std::array<GlyphOutline, kLetterCount> outlines = letter_outlines(face);
    return normalize_scale_over(outlines);
}

FontRecord rasterize_font(const FontFace& face) {
    std::array<GlyphOutline, kLetterCount> outlines = letter_outlines(face);
    float scale = normalize_scale_over(outlines);

    FontRecord record;
    record.name = face.display_name();
    record.family_key = family_key(record.name);
    if (record.family_key.empty())
        fail(ErrorKind::font_rejected, "font name yields an empty family key");

    // The bisection bracket can land a hair below the exact 36-pixel extent;
    // nudge upward until one glyph reaches 36 (without any overflowing).
    for (int attempt = 0;; ++attempt) {
        bool overflow = false;
        int max_dim = 0;
        std::array<RasterImage, kLetterCount> images;
        for (int i = 0; i < kLetterCount && !overflow; ++i) {
            if (outlines[i].empty())
                fail(ErrorKind::font_rejected,
                     std::string("glyph '") + index_letter(i) + "' has no outline");
            images[i] = rasterize_outline(outlines[i], scale);
            InkBox box = raster_ink_box(images[i]);
            if (box.empty())
                fail(ErrorKind::font_rejected,
                     std::string("glyph '") + index_letter(i) + "' rasterized blank");
            int dim = std::max(box.width(), box.height());
            if (dim > kGlyphSize)
                overflow = true;
            max_dim = std::max(max_dim, dim);
        }
        if (!overflow && max_dim == kGlyphSize) {
            for (int i = 0; i < kLetterCount; ++i) {
                InkBox box = raster_ink_box(images[i]);
                int ox = (kGlyphSize - box.width()) / 2;
                int oy = (kGlyphSize - box.height()) / 2;
                GlyphImage& g = record.glyphs[i];
                g.pixels.fill(0);
                for (int y = 0; y < box.height(); ++y)
                    for (int x = 0; x < box.width(); ++x)
                        g.pixels[static_cast<size_t>(oy + y) * kGlyphSize + (ox + x)] =
                            images[i].at(box.x0 + x, box.y0 + y);
            }
            check_record_invariants(record);
            return record;
        }
        if (overflow || attempt >= 12)
            fail(ErrorKind::font_rejected, "normalization could not reach a 36-pixel extent");
        scale *= 1.0004f;
    }
}

Atlas build_atlas(const std::vector<std::string>& font_paths,
                  std::vector<RejectEntry>* reject_log) {
    std::vector<RasterTask> tasks;
    std::vector<RejectEntry> rejects;

    std::vector<std::string> paths = font_paths;
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    for (const std::string& path : paths) {
        try {
            uint32_t faces = count_font_faces(path);
            for (uint32_t f = 0; f < faces; ++f)
                tasks.push_back({path, f});
        } catch (const Error& e) {
            rejects.push_back({path, 0, e.what()});
        }
    }

    std::vector<RasterSlot> slots(tasks.size());
    parallel_for(tasks.size(), [&](size_t i) {
        slots[i].task = tasks[i];
        try {
            FontFace face = load_font_face(tasks[i].path, tasks[i].face_index);
            slots[i].record = rasterize_font(face);
            slots[i].ok = true;
        } catch (const Error& e) {
            slots[i].reason = e.what();
        } catch (const std::exception& e) {
            slots[i].reason = e.what();
        }
    });

    Atlas atlas;
    std::vector<SourceEntry> sources;
    std::vector<std::string> seen_names;
    for (RasterSlot& slot : slots) {
        if (!slot.ok) {
            rejects.push_back({slot.task.path, slot.task.face_index, slot.reason});
            continue;
        }
        if (std::find(seen_names.begin(), seen_names.end(), slot.record.name) !=
            seen_names.end()) {
            rejects.push_back({slot.task.path, slot.task.face_index,
                               "duplicate font name '" + slot.record.name + "'"});
            continue;
        }
        seen_names.push_back(slot.record.name);
        atlas.fonts.push_back(std::move(slot.record));
        sources.push_back({slot.task.path, slot.task.face_index});
    }

    std::vector<size_t> order(atlas.fonts.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const FontRecord& fa = atlas.fonts[a];
        const FontRecord& fb = atlas.fonts[b];
        if (fa.family_key != fb.family_key)
            return fa.family_key < fb.family_key;
        return fa.name < fb.name;
    });
    std::vector<FontRecord> sorted_fonts;
    std::vector<SourceEntry> sorted_sources;
    sorted_fonts.reserve(order.size());
    sorted_sources.reserve(order.size());
    for (size_t idx : order) {
        sorted_fonts.push_back(std::move(atlas.fonts[idx]));
        sorted_sources.push_back(std::move(sources[idx]));
    }
    atlas.fonts = std::move(sorted_fonts);
    atlas.source_manifest = std::move(sorted_sources);

    if (reject_log)
        *reject_log = std::move(rejects);
    if (atlas.fonts.empty())
        fail(ErrorKind::empty_corpus, "no fonts survived rasterization");
    return atlas;
}

std::vector<std::string> collect_font_files(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> out;
    std::error_code ec;
    fs::recursive_directory_iterator it(dir, ec), end;
    if (ec)
        fail(ErrorKind::io, "cannot open font directory '" + dir + "': " + ec.message());
    for (; it != end; it.increment(ec)) {
        if (ec)
            fail(ErrorKind::io, "error scanning '" + dir + "': " + ec.message());
        if (!it->is_regular_file())
            continue;
        std::string ext = it->path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".ttf" || ext == ".ttc" || ext == ".otf")
            out.push_back(it->path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace glyphforge
