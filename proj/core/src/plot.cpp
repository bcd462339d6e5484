#include "gcm/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "gcm/raster.hpp"

namespace gcm {
namespace {

// 5x7 bitmap font, rows top-down, bit 4 = leftmost column.
struct Glyph {
    char ch;
    unsigned char rows[7];
};

constexpr Glyph kFont[] = {
    {' ', {0, 0, 0, 0, 0, 0, 0}},
    {'.', {0, 0, 0, 0, 0, 0x0C, 0x0C}},
    {'-', {0, 0, 0, 0x1F, 0, 0, 0}},
    {'+', {0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0}},
    {'/', {0, 0x01, 0x02, 0x04, 0x08, 0x10, 0}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
};

class Canvas {
public:
    Canvas(int h, int w) : img_(h, w, 1.0) {}

    void set(int r, int c, double v) {
        if (r >= 0 && r < img_.height && c >= 0 && c < img_.width) img_.at(r, c) = v;
    }

    void hline(int r, int c0, int c1, double v = 0.0) {
        for (int c = std::min(c0, c1); c <= std::max(c0, c1); ++c) set(r, c, v);
    }
    void vline(int c, int r0, int r1, double v = 0.0) {
        for (int r = std::min(r0, r1); r <= std::max(r0, r1); ++r) set(r, c, v);
    }
    void rect(int r0, int c0, int r1, int c1, double v = 0.0) {
        hline(r0, c0, c1, v);
        hline(r1, c0, c1, v);
        vline(c0, r0, r1, v);
        vline(c1, r0, r1, v);
    }
    void fill_rect(int r0, int c0, int r1, int c1, double v) {
        for (int r = r0; r <= r1; ++r) hline(r, c0, c1, v);
    }
    void dot(int r, int c, int radius, double v, bool filled) {
        for (int dr = -radius; dr <= radius; ++dr) {
            for (int dc = -radius; dc <= radius; ++dc) {
                const int d2 = dr * dr + dc * dc;
                if (filled ? d2 <= radius * radius
                           : (d2 <= radius * radius && d2 >= (radius - 1) * (radius - 1))) {
                    set(r + dr, c + dc, v);
                }
            }
        }
    }

    void text(int r, int c, const std::string& s, double v = 0.0) {
        for (char raw : s) {
            const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
            const Glyph* glyph = nullptr;
            for (const auto& g : kFont) {
                if (g.ch == ch) {
                    glyph = &g;
                    break;
                }
            }
            if (glyph) {
                for (int gr = 0; gr < 7; ++gr) {
                    for (int gc = 0; gc < 5; ++gc) {
                        if (glyph->rows[gr] & (1 << (4 - gc))) set(r + gr, c + gc, v);
                    }
                }
            }
            c += 6;
        }
    }

    ImageGrid take() { return std::move(img_); }

private:
    ImageGrid img_;
};

std::string format_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct BoxStats {
    double lo, q1, median, q3, hi;
};

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * (sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - i;
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

BoxStats box_stats(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return {values.front(), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
            values.back()};
}

void draw_box(Canvas& canvas, const BoxStats& box, int cx, int box_w, int top, int bottom,
              double lo, double hi, double shade) {
    auto to_row = [&](double v) {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return bottom - static_cast<int>(t * (bottom - top));
    };
    const int c0 = cx - box_w / 2, c1 = cx + box_w / 2;
    canvas.fill_rect(to_row(box.q3), c0, to_row(box.q1), c1, shade);
    canvas.rect(to_row(box.q3), c0, to_row(box.q1), c1);
    canvas.hline(to_row(box.median), c0, c1, 0.0);
    canvas.vline(cx, to_row(box.hi), to_row(box.q3));
    canvas.vline(cx, to_row(box.q1), to_row(box.lo));
    canvas.hline(to_row(box.hi), cx - box_w / 4, cx + box_w / 4);
    canvas.hline(to_row(box.lo), cx - box_w / 4, cx + box_w / 4);
}

}  // namespace

ImageGrid render_attribute_boxplots(const MetricReport& report) {
    const int panel_w = 190, panel_h = 230, margin = 20;
    const int width = margin * 2 + panel_w * 4, height = panel_h + 90;
    Canvas canvas(height, width);

    struct Panel {
        std::string title;
        std::vector<double> consistent, inconsistent;
    };
    std::vector<Panel> panels = {{"AGE", {}, {}}, {"BMI", {}, {}}, {"FAT", {}, {}}, {"AVG", {}, {}}};
    for (const auto& row : report.per_image) {
        auto& dst_age = row.role == "consistent" ? panels[0].consistent : panels[0].inconsistent;
        auto& dst_bmi = row.role == "consistent" ? panels[1].consistent : panels[1].inconsistent;
        auto& dst_fat = row.role == "consistent" ? panels[2].consistent : panels[2].inconsistent;
        auto& dst_avg = row.role == "consistent" ? panels[3].consistent : panels[3].inconsistent;
        dst_age.push_back(row.attribute_errors.at(Attribute::age));
        dst_bmi.push_back(row.attribute_errors.at(Attribute::bmi));
        dst_fat.push_back(row.attribute_errors.at(Attribute::body_fat_pct));
        dst_avg.push_back(row.explicit_composite);
    }

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const int left = margin + static_cast<int>(p) * panel_w;
        const int top = 30, bottom = top + panel_h;
        canvas.text(top - 20, left + panel_w / 2 - 12, panels[p].title);
        canvas.rect(top, left + 40, bottom, left + panel_w - 20);
        if (panels[p].consistent.empty() || panels[p].inconsistent.empty()) continue;

        double lo = 0.0;
        double hi = 0.0;
        for (double v : panels[p].consistent) hi = std::max(hi, v);
        for (double v : panels[p].inconsistent) hi = std::max(hi, v);
        if (hi <= lo) hi = lo + 1.0;

        const BoxStats cons = box_stats(panels[p].consistent);
        const BoxStats incons = box_stats(panels[p].inconsistent);
        const int inner_left = left + 40, inner_right = left + panel_w - 20;
        const int cx_cons = inner_left + (inner_right - inner_left) / 3;
        const int cx_incons = inner_left + 2 * (inner_right - inner_left) / 3;
        draw_box(canvas, cons, cx_cons, 28, top + 10, bottom - 10, lo, hi, 0.85);
        draw_box(canvas, incons, cx_incons, 28, top + 10, bottom - 10, lo, hi, 0.6);
        canvas.text(bottom + 8, cx_cons - 12, "CONS");
        canvas.text(bottom + 8, cx_incons - 18, "INCONS");
        canvas.text(top - 4, left + 2, format_tick(hi));
        canvas.text(bottom - 4, left + 2, format_tick(lo));
    }
    canvas.text(height - 24, margin, "ABSOLUTE ERROR BY ATTRIBUTE AND 0-1 AVG");
    return canvas.take();
}

ImageGrid render_similarity_scatter(const MetricReport& report) {
    const int size = 480, margin = 56;
    Canvas canvas(size, size);
    const int top = margin / 2, bottom = size - margin, left = margin, right = size - margin / 2;
    canvas.rect(top, left, bottom, right);

    double x_lo = 1.0, x_hi = -1.0, y_lo = 0.0, y_hi = 0.0;
    for (const auto& row : report.per_image) {
        x_lo = std::min(x_lo, row.implicit_similarity);
        x_hi = std::max(x_hi, row.implicit_similarity);
        y_hi = std::max(y_hi, row.explicit_composite);
    }
    if (x_hi <= x_lo) {
        x_lo -= 0.05;
        x_hi += 0.05;
    }
    if (y_hi <= y_lo) y_hi = 1.0;
    const double x_pad = 0.05 * (x_hi - x_lo);
    x_lo -= x_pad;
    x_hi += x_pad;

    for (const auto& row : report.per_image) {
        const int c = left + static_cast<int>((row.implicit_similarity - x_lo) / (x_hi - x_lo) *
                                              (right - left));
        const int r = bottom - static_cast<int>((row.explicit_composite - y_lo) / (y_hi - y_lo) *
                                                (bottom - top));
        canvas.dot(r, c, 3, row.role == "consistent" ? 0.55 : 0.0, row.role != "consistent");
    }

    canvas.text(bottom + 16, left, format_tick(x_lo));
    canvas.text(bottom + 16, right - 24, format_tick(x_hi));
    canvas.text(bottom + 30, (left + right) / 2 - 60, "IMPLICIT SIMILARITY");
    canvas.text(top - 12, left - 40, format_tick(y_hi));
    canvas.text(bottom - 8, left - 40, format_tick(y_lo));
    canvas.text(top - 12, (left + right) / 2 - 54, "EXPLICIT AVG ERROR");
    if (report.implicit_explicit_correlation) {
        canvas.text(top + 8, right - 80, "R " + format_tick(*report.implicit_explicit_correlation));
    }
    return canvas.take();
}

void render_report_plots(const MetricReport& report, const std::filesystem::path& boxplot_path,
                         const std::filesystem::path& scatter_path) {
    write_pgm8(boxplot_path, render_attribute_boxplots(report));
    write_pgm8(scatter_path, render_similarity_scatter(report));
}

}  // namespace gcm
