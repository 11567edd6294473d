#ifndef CHV_PLOT_HPP
#define CHV_PLOT_HPP

#include <array>
#include <string>
#include <vector>

#include "chv/image_io.hpp"

namespace chv {

using Rgb = std::array<std::uint8_t, 3>;

struct Series {
    std::string label;
    Rgb color{0, 0, 0};
    bool dashed = false;
    std::vector<double> x, y;
};

struct ChartSpec {
    std::string title, xlabel, ylabel;
    int width = 900, height = 600;
};

/// Minimal static line chart: axes, 1-2-5 ticks, grid, dashed/solid
/// polylines, point markers and a legend. Bitmap-font labels.
ImageRgb8 render_line_chart(const std::vector<Series>& series, const ChartSpec& spec);

// Raw drawing helpers (used by the track plot in the CLI).
void fill(ImageRgb8& img, Rgb color);
void draw_line(ImageRgb8& img, int x0, int y0, int x1, int y1, Rgb color, bool dashed = false);
void draw_marker(ImageRgb8& img, int x, int y, Rgb color);
void draw_text(ImageRgb8& img, int x, int y, const std::string& text, Rgb color);
int text_width(const std::string& text);

std::vector<Rgb> default_palette();

} // namespace chv

#endif
