#include "glyphforge/sheet.hpp"

#include <algorithm>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"

namespace glyphforge {

namespace {

constexpr int kCell = kGlyphSize;
constexpr int kGap = 2;
constexpr std::uint8_t kSeparator = 64;

} // namespace

std::vector<std::uint8_t> render_contact_sheet(const std::vector<SheetRow>& rows) {
    if (rows.empty()) throw Error(ErrorKind::configuration, "contact sheet: no rows");
    std::size_t cols = 0;
    for (const SheetRow& row : rows) cols = std::max(cols, row.glyphs.size());
    if (cols == 0) throw Error(ErrorKind::configuration, "contact sheet: no glyphs");

    const int width = static_cast<int>(cols) * kCell + (static_cast<int>(cols) - 1) * kGap;
    const int height = static_cast<int>(rows.size()) * kCell + (static_cast<int>(rows.size()) - 1) * kGap;

    std::string header = "P5\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        header += "# row " + std::to_string(r) + ": ";
        for (char c : rows[r].label)
            header += (c == '\n' || c == '\r') ? ' ' : c;
        header += '\n';
    }
    header += std::to_string(width) + " " + std::to_string(height) + "\n255\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    std::size_t pixel_base = out.size();
    out.resize(pixel_base + static_cast<std::size_t>(width) * height, kSeparator);

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int oy = static_cast<int>(r) * (kCell + kGap);
        for (std::size_t c = 0; c < cols; ++c) {
            const int ox = static_cast<int>(c) * (kCell + kGap);
            const GlyphImage* g = c < rows[r].glyphs.size() ? &rows[r].glyphs[c] : nullptr;
            for (int y = 0; y < kCell; ++y) {
                std::uint8_t* dst = out.data() + pixel_base +
                                    static_cast<std::size_t>(oy + y) * width + ox;
                for (int x = 0; x < kCell; ++x)
                    dst[x] = g ? g->at(x, y) : 0;
            }
        }
    }
    return out;
}

void write_contact_sheet(const std::string& path, const std::vector<SheetRow>& rows) {
    write_file_bytes(path, render_contact_sheet(rows));
}

} // namespace glyphforge
