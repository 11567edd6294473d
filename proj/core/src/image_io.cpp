#include "chv/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "chv/errors.hpp"

namespace chv {

namespace {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

void write_png_impl(const std::string& path, int ny, int nx, int color_type,
                    const std::uint8_t* pixels, std::size_t row_bytes) {
    FileCloser fc{std::fopen(path.c_str(), "wb")};
    if (!fc.f) throw IoError("png: cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: write failed: " + path);
    }
    png_init_io(png, fc.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(nx), static_cast<png_uint_32>(ny), 8,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int iy = 0; iy < ny; ++iy)
        png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(iy) * row_bytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageGray8 read_png_gray(const std::string& path) {
    FileCloser fc{std::fopen(path.c_str(), "rb")};
    if (!fc.f) throw IoError("png: cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: read failed: " + path);
    }
    png_init_io(png, fc.f);
    png_read_info(png, info);

    // Normalize everything to 8-bit grayscale.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY &&
        png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    const auto ct = png_get_color_type(png, info);
    if (ct == PNG_COLOR_TYPE_RGB || ct == PNG_COLOR_TYPE_RGB_ALPHA ||
        ct == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    ImageGray8 img;
    img.nx = static_cast<int>(png_get_image_width(png, info));
    img.ny = static_cast<int>(png_get_image_height(png, info));
    img.pixels.resize(static_cast<std::size_t>(img.nx) * img.ny);
    for (int iy = 0; iy < img.ny; ++iy)
        png_read_row(png, img.pixels.data() + static_cast<std::size_t>(iy) * img.nx, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

ImageGray8 read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("pgm: cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw IoError("pgm: only binary P5 supported: " + path);
    auto next_int = [&]() {
        // skip whitespace and '#' comments
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v;
        in >> v;
        return v;
    };
    const long w = next_int(), h = next_int(), maxval = next_int();
    if (w < 1 || h < 1 || maxval != 255)
        throw IoError("pgm: unsupported dimensions or maxval in " + path);
    in.get(); // single whitespace before payload
    ImageGray8 img;
    img.nx = static_cast<int>(w);
    img.ny = static_cast<int>(h);
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw IoError("pgm: truncated payload in " + path);
    return img;
}

} // namespace

void write_png(const std::string& path, const ImageGray8& img) {
    if (img.pixels.size() != static_cast<std::size_t>(img.nx) * img.ny)
        throw InvalidArgument("png: pixel buffer mismatch");
    write_png_impl(path, img.ny, img.nx, PNG_COLOR_TYPE_GRAY, img.pixels.data(),
                   static_cast<std::size_t>(img.nx));
}

void write_png(const std::string& path, const ImageRgb8& img) {
    if (img.pixels.size() != static_cast<std::size_t>(img.nx) * img.ny * 3)
        throw InvalidArgument("png: pixel buffer mismatch");
    write_png_impl(path, img.ny, img.nx, PNG_COLOR_TYPE_RGB, img.pixels.data(),
                   static_cast<std::size_t>(img.nx) * 3);
}

void write_pgm(const std::string& path, const ImageGray8& img) {
    if (img.pixels.size() != static_cast<std::size_t>(img.nx) * img.ny)
        throw InvalidArgument("pgm: pixel buffer mismatch");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("pgm: cannot open for writing: " + path);
    out << "P5\n" << img.nx << ' ' << img.ny << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    out.close();
    if (out.fail()) throw IoError("pgm: write failed: " + path);
}

RVector load_image_gray01(const std::string& path, int& ny, int& nx) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("image: cannot open: " + path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();

    ImageGray8 img;
    if (magic[0] == 'P' && magic[1] == '5') {
        img = read_pgm(path);
    } else if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        img = read_png_gray(path);
    } else {
        throw IoError("image: unrecognized format (expect PNG or binary PGM): " + path);
    }
    ny = img.ny;
    nx = img.nx;
    RVector out(img.pixels.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<double>(img.pixels[i]) / 255.0;
    return out;
}

ImageGray8 to_gray8(const RVector& values, int ny, int nx) {
    if (values.size() != static_cast<std::size_t>(ny) * nx)
        throw InvalidArgument("to_gray8: size mismatch");
    double lo = values.empty() ? 0.0 : values[0], hi = lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    ImageGray8 img;
    img.nx = nx;
    img.ny = ny;
    img.pixels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::lround((values[i] - lo) * scale));
    return img;
}

} // namespace chv
