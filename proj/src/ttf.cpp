#include "glyphforge/ttf.hpp"

#include <algorithm>
#include <cstring>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"

namespace glyphforge {
namespace {

// Big-endian accessor over the raw font bytes.  All sfnt data is big-endian,
// unlike the little-endian atlas/model containers.
struct BeView {
    const uint8_t* data;
    size_t size;

    void need(size_t offset, size_t count) const {
        if (offset > size || count > size - offset)
            fail(ErrorKind::font_rejected, "font data truncated");
    }
    uint8_t u8(size_t o) const {
        need(o, 1);
        return data[o];
    }
    uint16_t u16(size_t o) const {
        need(o, 2);
        return static_cast<uint16_t>((data[o] << 8) | data[o + 1]);
    }
    int16_t s16(size_t o) const { return static_cast<int16_t>(u16(o)); }
    uint32_t u32(size_t o) const {
        need(o, 4);
        return (static_cast<uint32_t>(data[o]) << 24) | (static_cast<uint32_t>(data[o + 1]) << 16) |
               (static_cast<uint32_t>(data[o + 2]) << 8) | data[o + 3];
    }
    std::string tag(size_t o) const {
        need(o, 4);
        return std::string(reinterpret_cast<const char*>(data + o), 4);
    }
};

constexpr uint32_t kTtcTag = 0x74746366;  // 'ttcf'
constexpr uint32_t kTrueTag = 0x74727565; // 'true'
constexpr uint32_t kOttoTag = 0x4f54544f; // 'OTTO'

bool is_sfnt_version(uint32_t v) { return v == 0x00010000 || v == kTrueTag; }

uint32_t sfnt_offset_for_face(const BeView& v, uint32_t face_index) {
    uint32_t first = v.u32(0);
    if (first == kTtcTag) {
        uint32_t num_fonts = v.u32(8);
        if (face_index >= num_fonts)
            fail(ErrorKind::font_rejected, "face index out of range");
        return v.u32(12 + 4 * face_index);
    }
    if (face_index != 0)
        fail(ErrorKind::font_rejected, "face index out of range");
    if (first == kOttoTag)
        fail(ErrorKind::font_rejected, "CFF outlines are not supported");
    if (!is_sfnt_version(first))
        fail(ErrorKind::font_rejected, "not a TrueType font");
    return 0;
}

bool find_table(const BeView& v, uint32_t sfnt, const char* tag, uint32_t& offset,
                uint32_t& length) {
    uint32_t version = v.u32(sfnt);
    if (version == kOttoTag)
        fail(ErrorKind::font_rejected, "CFF outlines are not supported");
    if (!is_sfnt_version(version))
        fail(ErrorKind::font_rejected, "not a TrueType font");
    uint16_t num_tables = v.u16(sfnt + 4);
    for (uint16_t i = 0; i < num_tables; ++i) {
        size_t rec = sfnt + 12 + 16u * i;
        if (v.tag(rec) == tag) {
            offset = v.u32(rec + 8);
            length = v.u32(rec + 12);
            v.need(offset, length);
            return true;
        }
    }
    return false;
}

uint32_t require_table(const BeView& v, uint32_t sfnt, const char* tag, uint32_t& length) {
    uint32_t offset = 0;
    if (!find_table(v, sfnt, tag, offset, length))
        fail(ErrorKind::font_rejected, std::string("missing '") + tag + "' table");
    return offset;
}

// cmap subtable lookups -----------------------------------------------------

uint32_t lookup_format0(const BeView& v, uint32_t sub, uint32_t cp) {
    if (cp > 255)
        return 0;
    return v.u8(sub + 6 + cp);
}

uint32_t lookup_format4(const BeView& v, uint32_t sub, uint32_t cp) {
    if (cp > 0xffff)
        return 0;
    uint16_t seg_count_x2 = v.u16(sub + 6);
    uint32_t seg_count = seg_count_x2 / 2;
    uint32_t ends = sub + 14;
    uint32_t starts = ends + seg_count_x2 + 2;
    uint32_t deltas = starts + seg_count_x2;
    uint32_t ranges = deltas + seg_count_x2;
    for (uint32_t i = 0; i < seg_count; ++i) {
        if (cp > v.u16(ends + 2 * i))
            continue;
        uint16_t start = v.u16(starts + 2 * i);
        if (cp < start)
            return 0;
        uint16_t delta = v.u16(deltas + 2 * i);
        uint16_t range_offset = v.u16(ranges + 2 * i);
        if (range_offset == 0)
            return (cp + delta) & 0xffff;
        uint32_t gi_addr = ranges + 2 * i + range_offset + 2 * (cp - start);
        uint16_t gi = v.u16(gi_addr);
        if (gi == 0)
            return 0;
        return (gi + delta) & 0xffff;
    }
    return 0;
}

uint32_t lookup_format6(const BeView& v, uint32_t sub, uint32_t cp) {
    uint16_t first = v.u16(sub + 6);
    uint16_t count = v.u16(sub + 8);
    if (cp < first || cp >= static_cast<uint32_t>(first) + count)
        return 0;
    return v.u16(sub + 10 + 2 * (cp - first));
}

uint32_t lookup_format12(const BeView& v, uint32_t sub, uint32_t cp) {
    uint32_t num_groups = v.u32(sub + 12);
    uint32_t lo = 0, hi = num_groups;
    while (lo < hi) {
        uint32_t mid = (lo + hi) / 2;
        uint32_t rec = sub + 16 + 12 * mid;
        uint32_t start = v.u32(rec);
        uint32_t end = v.u32(rec + 4);
        if (cp < start)
            hi = mid;
        else if (cp > end)
            lo = mid + 1;
        else
            return v.u32(rec + 8) + (cp - start);
    }
    return 0;
}

int cmap_subtable_score(uint16_t platform, uint16_t encoding, uint16_t format) {
    if (format != 0 && format != 4 && format != 6 && format != 12)
        return -1;
    if (platform == 3 && encoding == 10)
        return 5;
    if (platform == 0 && (encoding == 4 || encoding == 6))
        return 5;
    if (platform == 3 && encoding == 1)
        return 4;
    if (platform == 0)
        return 3;
    if (platform == 3 && encoding == 0)
        return 2;
    if (platform == 1 && encoding == 0)
        return 1;
    return 0;
}

// name table ----------------------------------------------------------------

std::string decode_name_string(const BeView& v, uint32_t storage, uint16_t platform,
                               uint16_t offset, uint16_t length) {
    std::string out;
    if (platform == 0 || platform == 3) {
        // UTF-16BE; keep the ASCII range, replace anything else.
        for (uint32_t i = 0; i + 1 < length; i += 2) {
            uint16_t u = v.u16(storage + offset + i);
            if (u >= 0x20 && u < 0x7f)
                out.push_back(static_cast<char>(u));
            else if (u != 0)
                out.push_back('?');
        }
    } else {
        for (uint32_t i = 0; i < length; ++i) {
            uint8_t b = v.u8(storage + offset + i);
            out.push_back(b >= 0x20 && b < 0x7f ? static_cast<char>(b) : '?');
        }
    }
    while (!out.empty() && out.back() == ' ')
        out.pop_back();
    size_t lead = out.find_first_not_of(' ');
    return lead == std::string::npos ? std::string() : out.substr(lead);
}

std::string read_display_name(const BeView& v, uint32_t sfnt) {
    uint32_t offset = 0, length = 0;
    if (!find_table(v, sfnt, "name", offset, length))
        fail(ErrorKind::font_rejected, "missing 'name' table");
    uint16_t count = v.u16(offset + 2);
    uint32_t storage = offset + v.u16(offset + 4);

    // Preference: PostScript name (6), then full name (4), then family (1)
    // combined with subfamily (2).  Windows-platform records win ties.
    auto pick = [&](uint16_t want_id) -> std::string {
        std::string best;
        int best_score = -1;
        for (uint16_t i = 0; i < count; ++i) {
            uint32_t rec = offset + 6 + 12u * i;
            uint16_t platform = v.u16(rec);
            uint16_t encoding = v.u16(rec + 2);
            uint16_t language = v.u16(rec + 4);
            uint16_t name_id = v.u16(rec + 6);
            uint16_t slen = v.u16(rec + 8);
            uint16_t soff = v.u16(rec + 10);
            if (name_id != want_id)
                continue;
            int score = 0;
            if (platform == 3 && encoding == 1)
                score = language == 0x0409 ? 4 : 3;
            else if (platform == 0)
                score = 2;
            else if (platform == 1 && encoding == 0)
                score = 1;
            if (score <= best_score)
                continue;
            std::string s = decode_name_string(v, storage, platform, soff, slen);
            if (s.empty())
                continue;
            best = s;
            best_score = score;
        }
        return best;
    };

    std::string ps = pick(6);
    if (!ps.empty())
        return ps;
    std::string full = pick(4);
    if (!full.empty())
        return full;
    std::string family = pick(1);
    if (family.empty())
        fail(ErrorKind::font_rejected, "font has no usable name record");
    std::string sub = pick(2);
    if (!sub.empty() && sub != "Regular")
        family += " " + sub;
    return family;
}

// glyf decoding ---------------------------------------------------------------

constexpr uint8_t kOnCurve = 0x01;
constexpr uint8_t kXShort = 0x02;
constexpr uint8_t kYShort = 0x04;
constexpr uint8_t kRepeat = 0x08;
constexpr uint8_t kXSameOrPositive = 0x10;
constexpr uint8_t kYSameOrPositive = 0x20;

constexpr uint16_t kArgsAreWords = 0x0001;
constexpr uint16_t kArgsAreXy = 0x0002;
constexpr uint16_t kHaveScale = 0x0008;
constexpr uint16_t kMoreComponents = 0x0020;
constexpr uint16_t kHaveXyScale = 0x0040;
constexpr uint16_t kHaveTwoByTwo = 0x0080;

float f2dot14(int16_t raw) { return static_cast<float>(raw) / 16384.0f; }

} // namespace

bool GlyphOutline::empty() const {
    for (const Contour& c : contours)
        if (!c.empty())
            return false;
    return true;
}

OutlineBounds GlyphOutline::bounds() const {
    OutlineBounds b;
    bool first = true;
    for (const Contour& c : contours) {
        for (const OutlinePoint& p : c) {
            if (first) {
                b = {p.x, p.y, p.x, p.y};
                first = false;
            } else {
                b.xmin = std::min(b.xmin, p.x);
                b.ymin = std::min(b.ymin, p.y);
                b.xmax = std::max(b.xmax, p.x);
                b.ymax = std::max(b.ymax, p.y);
            }
        }
    }
    return b;
}

FontFace::FontFace(std::vector<uint8_t> data, uint32_t face_index) : data_(std::move(data)) {
    BeView v{data_.data(), data_.size()};
    sfnt_offset_ = sfnt_offset_for_face(v, face_index);

    uint32_t length = 0;
    uint32_t head = require_table(v, sfnt_offset_, "head", length);
    if (v.u32(head + 12) != 0x5f0f3cf5)
        fail(ErrorKind::font_rejected, "bad 'head' magic");
    units_per_em_ = v.u16(head + 18);
    if (units_per_em_ == 0)
        fail(ErrorKind::font_rejected, "unitsPerEm is zero");
    int16_t loc_format = v.s16(head + 50);
    if (loc_format != 0 && loc_format != 1)
        fail(ErrorKind::font_rejected, "unsupported indexToLocFormat");
    long_loca_ = loc_format == 1;

    uint32_t maxp = require_table(v, sfnt_offset_, "maxp", length);
    num_glyphs_ = v.u16(maxp + 4);

    loca_offset_ = require_table(v, sfnt_offset_, "loca", loca_length_);
    glyf_offset_ = require_table(v, sfnt_offset_, "glyf", glyf_length_);

    uint32_t cmap = require_table(v, sfnt_offset_, "cmap", length);
    uint16_t sub_count = v.u16(cmap + 2);
    int best = -1;
    for (uint16_t i = 0; i < sub_count; ++i) {
        uint32_t rec = cmap + 4 + 8u * i;
        uint16_t platform = v.u16(rec);
        uint16_t encoding = v.u16(rec + 2);
        uint32_t sub = cmap + v.u32(rec + 4);
        uint16_t format = v.u16(sub);
        int score = cmap_subtable_score(platform, encoding, format);
        if (score > best) {
            best = score;
            cmap_sub_offset_ = sub;
            cmap_format_ = format;
        }
    }
    if (best < 0)
        fail(ErrorKind::font_rejected, "no usable cmap subtable");

    display_name_ = read_display_name(v, sfnt_offset_);
}

uint32_t FontFace::count_faces(const std::vector<uint8_t>& data) {
    BeView v{data.data(), data.size()};
    uint32_t first = v.u32(0);
    if (first == kTtcTag)
        return v.u32(8);
    if (first == kOttoTag)
        fail(ErrorKind::font_rejected, "CFF outlines are not supported");
    if (!is_sfnt_version(first))
        fail(ErrorKind::font_rejected, "not a TrueType font");
    return 1;
}

uint32_t FontFace::glyph_id(uint32_t codepoint) const {
    BeView v{data_.data(), data_.size()};
    switch (cmap_format_) {
    case 0:
        return lookup_format0(v, cmap_sub_offset_, codepoint);
    case 4:
        return lookup_format4(v, cmap_sub_offset_, codepoint);
    case 6:
        return lookup_format6(v, cmap_sub_offset_, codepoint);
    case 12:
        return lookup_format12(v, cmap_sub_offset_, codepoint);
    default:
        fail(ErrorKind::font_rejected, "unsupported cmap subtable format");
    }
}

bool FontFace::glyph_range(uint32_t glyph_id, uint32_t& offset, uint32_t& length) const {
    if (glyph_id >= num_glyphs_)
        fail(ErrorKind::font_rejected, "glyph id out of range");
    BeView v{data_.data(), data_.size()};
    uint32_t start, end;
    if (long_loca_) {
        start = v.u32(loca_offset_ + 4 * glyph_id);
        end = v.u32(loca_offset_ + 4 * glyph_id + 4);
    } else {
        start = 2u * v.u16(loca_offset_ + 2 * glyph_id);
        end = 2u * v.u16(loca_offset_ + 2 * glyph_id + 2);
    }
    if (end < start || end > glyf_length_)
        fail(ErrorKind::font_rejected, "bad loca entry");
    if (start == end)
        return false; // empty glyph
    offset = glyf_offset_ + start;
    length = end - start;
    return true;
}

void FontFace::append_glyph(GlyphOutline& out, uint32_t glyph_id, int depth, const float m[4],
                            float dx, float dy) const {
    if (depth > 8)
        fail(ErrorKind::font_rejected, "composite glyph nesting too deep");
    uint32_t offset = 0, length = 0;
    if (!glyph_range(glyph_id, offset, length))
        return;

    BeView v{data_.data(), data_.size()};
    int16_t n_contours = v.s16(offset);

    if (n_contours >= 0) {
        uint32_t end_pts = offset + 10;
        uint32_t n_points = 0;
        std::vector<uint32_t> contour_ends(n_contours);
        for (int i = 0; i < n_contours; ++i) {
            contour_ends[i] = v.u16(end_pts + 2 * i);
            n_points = contour_ends[i] + 1;
        }
        uint32_t instr_len = v.u16(end_pts + 2 * n_contours);
        uint32_t pos = end_pts + 2 * n_contours + 2 + instr_len;

        std::vector<uint8_t> flags;
        flags.reserve(n_points);
        while (flags.size() < n_points) {
            uint8_t f = v.u8(pos++);
            flags.push_back(f);
            if (f & kRepeat) {
                uint8_t rep = v.u8(pos++);
                for (uint8_t r = 0; r < rep && flags.size() < n_points; ++r)
                    flags.push_back(f);
            }
        }

        std::vector<float> xs(n_points), ys(n_points);
        int32_t x = 0;
        for (uint32_t i = 0; i < n_points; ++i) {
            uint8_t f = flags[i];
            if (f & kXShort) {
                uint8_t d = v.u8(pos++);
                x += (f & kXSameOrPositive) ? d : -static_cast<int32_t>(d);
            } else if (!(f & kXSameOrPositive)) {
                x += v.s16(pos);
                pos += 2;
            }
            xs[i] = static_cast<float>(x);
        }
        int32_t y = 0;
        for (uint32_t i = 0; i < n_points; ++i) {
            uint8_t f = flags[i];
            if (f & kYShort) {
                uint8_t d = v.u8(pos++);
                y += (f & kYSameOrPositive) ? d : -static_cast<int32_t>(d);
            } else if (!(f & kYSameOrPositive)) {
                y += v.s16(pos);
                pos += 2;
            }
            ys[i] = static_cast<float>(y);
        }

        uint32_t begin = 0;
        for (int c = 0; c < n_contours; ++c) {
            uint32_t end = contour_ends[c];
            if (end < begin || end >= n_points)
                fail(ErrorKind::font_rejected, "bad contour end point");
            Contour contour;
            contour.reserve(end - begin + 1);
            for (uint32_t i = begin; i <= end; ++i) {
                float px = xs[i], py = ys[i];
                OutlinePoint p;
                p.x = m[0] * px + m[1] * py + dx;
                p.y = m[2] * px + m[3] * py + dy;
                p.on_curve = (flags[i] & kOnCurve) != 0;
                contour.push_back(p);
            }
            if (contour.size() >= 2)
                out.contours.push_back(std::move(contour));
            begin = end + 1;
        }
        return;
    }

    // Composite glyph: apply each component's transform on top of ours.
    uint32_t pos = offset + 10;
    bool more = true;
    while (more) {
        uint16_t flags = v.u16(pos);
        uint16_t component = v.u16(pos + 2);
        pos += 4;
        float cdx = 0.0f, cdy = 0.0f;
        if (flags & kArgsAreWords) {
            if (flags & kArgsAreXy) {
                cdx = static_cast<float>(v.s16(pos));
                cdy = static_cast<float>(v.s16(pos + 2));
            }
            pos += 4;
        } else {
            if (flags & kArgsAreXy) {
                cdx = static_cast<float>(static_cast<int8_t>(v.u8(pos)));
                cdy = static_cast<float>(static_cast<int8_t>(v.u8(pos + 1)));
            }
            pos += 2;
        }
        float cm[4] = {1.0f, 0.0f, 0.0f, 1.0f};
        if (flags & kHaveScale) {
            cm[0] = cm[3] = f2dot14(v.s16(pos));
            pos += 2;
        } else if (flags & kHaveXyScale) {
            cm[0] = f2dot14(v.s16(pos));
            cm[3] = f2dot14(v.s16(pos + 2));
            pos += 4;
        } else if (flags & kHaveTwoByTwo) {
            cm[0] = f2dot14(v.s16(pos));
            cm[2] = f2dot14(v.s16(pos + 2));
            cm[1] = f2dot14(v.s16(pos + 4));
            cm[3] = f2dot14(v.s16(pos + 6));
            pos += 8;
        }
        // Combined transform: ours applied after the component's own.
        float nm[4] = {
            m[0] * cm[0] + m[1] * cm[2],
            m[0] * cm[1] + m[1] * cm[3],
            m[2] * cm[0] + m[3] * cm[2],
            m[2] * cm[1] + m[3] * cm[3],
        };
        float ndx = m[0] * cdx + m[1] * cdy + dx;
        float ndy = m[2] * cdx + m[3] * cdy + dy;
        append_glyph(out, component, depth + 1, nm, ndx, ndy);
        more = (flags & kMoreComponents) != 0;
    }
}

GlyphOutline FontFace::glyph_outline(uint32_t glyph_id, int depth) const {
    GlyphOutline out;
    float identity[4] = {1.0f, 0.0f, 0.0f, 1.0f};
    append_glyph(out, glyph_id, depth, identity, 0.0f, 0.0f);
    return out;
}

bool FontFace::has_letter(char letter) const {
    if (letter < 'A' || letter > 'Z')
        fail(ErrorKind::invalid_argument, "letter must be A-Z");
    return glyph_id(static_cast<uint32_t>(letter)) != 0;
}

GlyphOutline FontFace::letter_outline(char letter) const {
    if (letter < 'A' || letter > 'Z')
        fail(ErrorKind::invalid_argument, "letter must be A-Z");
    uint32_t gid = glyph_id(static_cast<uint32_t>(letter));
    if (gid == 0)
        fail(ErrorKind::font_rejected, std::string("no glyph mapped for '") + letter + "'");
    return glyph_outline(gid, 0);
}

FontFace load_font_face(const std::string& path, uint32_t face_index) {
    return FontFace(read_file_bytes(path), face_index);
}

uint32_t count_font_faces(const std::string& path) {
    return FontFace::count_faces(read_file_bytes(path));
}

} // namespace glyphforge
