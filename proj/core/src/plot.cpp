#include "chv/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "chv/errors.hpp"

namespace chv {

namespace {

// 5x7 column-encoded glyphs (bit 0 = top row), classic GLCD shapes.
struct Glyph {
    char c;
    std::uint8_t col[5];
};

constexpr Glyph kFont[] = {
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00}}, {'-', {0x08, 0x08, 0x08, 0x08, 0x08}},
    {'+', {0x08, 0x08, 0x3E, 0x08, 0x08}}, {'.', {0x00, 0x60, 0x60, 0x00, 0x00}},
    {',', {0x00, 0x50, 0x30, 0x00, 0x00}}, {'(', {0x00, 0x1C, 0x22, 0x41, 0x00}},
    {')', {0x00, 0x41, 0x22, 0x1C, 0x00}}, {'/', {0x20, 0x10, 0x08, 0x04, 0x02}},
    {'%', {0x23, 0x13, 0x08, 0x64, 0x62}}, {'=', {0x14, 0x14, 0x14, 0x14, 0x14}},
    {':', {0x00, 0x36, 0x36, 0x00, 0x00}}, {'_', {0x40, 0x40, 0x40, 0x40, 0x40}},
    {'0', {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {'1', {0x00, 0x42, 0x7F, 0x40, 0x00}},
    {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4B, 0x31}},
    {'4', {0x18, 0x14, 0x12, 0x7F, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
    {'6', {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
    {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1E}},
    {'A', {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {'B', {0x7F, 0x49, 0x49, 0x49, 0x36}},
    {'C', {0x3E, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7F, 0x41, 0x41, 0x22, 0x1C}},
    {'E', {0x7F, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7F, 0x09, 0x09, 0x09, 0x01}},
    {'G', {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {'H', {0x7F, 0x08, 0x08, 0x08, 0x7F}},
    {'I', {0x00, 0x41, 0x7F, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3F, 0x01}},
    {'K', {0x7F, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7F, 0x40, 0x40, 0x40, 0x40}},
    {'M', {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {'N', {0x7F, 0x04, 0x08, 0x10, 0x7F}},
    {'O', {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {'P', {0x7F, 0x09, 0x09, 0x09, 0x06}},
    {'Q', {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {'R', {0x7F, 0x09, 0x19, 0x29, 0x46}},
    {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7F, 0x01, 0x01}},
    {'U', {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {'V', {0x1F, 0x20, 0x40, 0x20, 0x1F}},
    {'W', {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
    {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
};

const Glyph* find_glyph(char c) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& g : kFont)
        if (g.c == c) return &g;
    return nullptr;
}

inline void put_pixel(ImageRgb8& img, int x, int y, Rgb color) {
    if (x < 0 || y < 0 || x >= img.nx || y >= img.ny) return;
    auto* p = img.pixels.data() + (static_cast<std::size_t>(y) * img.nx + x) * 3;
    p[0] = color[0];
    p[1] = color[1];
    p[2] = color[2];
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// 1-2-5 tick spacing covering [lo, hi] with ~n ticks.
std::vector<double> nice_ticks(double lo, double hi, int n) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / std::max(1, n);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    const double start = std::ceil(lo / step) * step;
    for (double v = start; v <= hi + 0.5 * step; v += step) ticks.push_back(v);
    return ticks;
}

} // namespace

void fill(ImageRgb8& img, Rgb color) {
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = color[0];
        img.pixels[i + 1] = color[1];
        img.pixels[i + 2] = color[2];
    }
}

void draw_line(ImageRgb8& img, int x0, int y0, int x1, int y1, Rgb color, bool dashed) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    long step = 0;
    for (;;) {
        if (!dashed || (step / 5) % 2 == 0) put_pixel(img, x0, y0, color);
        ++step;
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
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

void draw_marker(ImageRgb8& img, int x, int y, Rgb color) {
    for (int oy = -1; oy <= 1; ++oy)
        for (int ox = -1; ox <= 1; ++ox) put_pixel(img, x + ox, y + oy, color);
}

void draw_text(ImageRgb8& img, int x, int y, const std::string& text, Rgb color) {
    int cx = x;
    for (char c : text) {
        const Glyph* g = find_glyph(c);
        if (g) {
            for (int col = 0; col < 5; ++col)
                for (int row = 0; row < 7; ++row)
                    if (g->col[col] & (1 << row)) put_pixel(img, cx + col, y + row, color);
        }
        cx += 6;
    }
}

int text_width(const std::string& text) { return static_cast<int>(text.size()) * 6; }

std::vector<Rgb> default_palette() {
    return {{214, 39, 40}, {31, 119, 180}, {44, 160, 44}, {255, 127, 14},
            {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207}};
}

ImageRgb8 render_line_chart(const std::vector<Series>& series, const ChartSpec& spec) {
    if (spec.width < 200 || spec.height < 150) throw InvalidArgument("chart: too small");
    ImageRgb8 img;
    img.nx = spec.width;
    img.ny = spec.height;
    img.pixels.assign(static_cast<std::size_t>(spec.width) * spec.height * 3, 255);

    const Rgb black{0, 0, 0}, gray{210, 210, 210};
    const int ml = 72, mr = 24, mt = 34, mb = 52;
    const int x0 = ml, x1 = spec.width - mr, y0 = spec.height - mb, y1 = mt;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax >= xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) {
        xmax += 1;
        xmin -= 1;
    }
    if (ymax == ymin) {
        ymax += 1;
        ymin -= 1;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) {
        return x0 + static_cast<int>(std::lround((v - xmin) / (xmax - xmin) * (x1 - x0)));
    };
    auto py = [&](double v) {
        return y0 - static_cast<int>(std::lround((v - ymin) / (ymax - ymin) * (y0 - y1)));
    };

    for (double t : nice_ticks(xmin, xmax, 6)) {
        const int x = px(t);
        draw_line(img, x, y1, x, y0, gray);
        const std::string lbl = tick_label(t);
        draw_text(img, x - text_width(lbl) / 2, y0 + 6, lbl, black);
    }
    for (double t : nice_ticks(ymin, ymax, 6)) {
        const int y = py(t);
        draw_line(img, x0, y, x1, y, gray);
        const std::string lbl = tick_label(t);
        draw_text(img, x0 - 6 - text_width(lbl), y - 3, lbl, black);
    }
    draw_line(img, x0, y0, x1, y0, black);
    draw_line(img, x0, y0, x0, y1, black);

    draw_text(img, (x0 + x1) / 2 - text_width(spec.title) / 2, 10, spec.title, black);
    draw_text(img, (x0 + x1) / 2 - text_width(spec.xlabel) / 2, spec.height - 18, spec.xlabel,
              black);
    draw_text(img, 6, y1 - 14, spec.ylabel, black);

    for (const auto& s : series) {
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
            draw_line(img, px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), s.color,
                      s.dashed);
        for (std::size_t i = 0; i < s.x.size(); ++i)
            draw_marker(img, px(s.x[i]), py(s.y[i]), s.color);
    }

    int ly = y1 + 6;
    for (const auto& s : series) {
        const int lx = x1 - 150;
        draw_line(img, lx, ly + 3, lx + 18, ly + 3, s.color, s.dashed);
        draw_text(img, lx + 24, ly, s.label, black);
        ly += 11;
    }
    return img;
}

} // namespace chv
