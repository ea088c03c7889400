#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace datt {

// 8-bit interleaved RGB image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // size = width * height * 3

    Image() = default;
    Image(int w, int h, uint8_t fill = 0) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, fill) {}

    uint8_t* px(int x, int y) { return data.data() + (static_cast<size_t>(y) * width + x) * 3; }
    const uint8_t* px(int x, int y) const { return data.data() + (static_cast<size_t>(y) * width + x) * 3; }
    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// PNG I/O (8-bit RGB; reads gray/palette/alpha files by converting to RGB).
// Both throw Error("IoFailure", ...) on failure.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

// Bilinear resize.
Image resize_bilinear(const Image& src, int out_w, int out_h);

Image flip_horizontal(const Image& src);

// Crop [x0, x0+w) x [y0, y0+h); the window must lie inside the image.
Image crop(const Image& src, int x0, int y0, int w, int h);

// rgb in [0,255] -> h in [0,1), s,v in [0,1]
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

// Drawing helpers (used for overlays and plots).
void draw_line(Image& img, double x0, double y0, double x1, double y1, uint8_t r, uint8_t g, uint8_t b);
void draw_rect(Image& img, double x0, double y0, double x1, double y1, uint8_t r, uint8_t g, uint8_t b);
void fill_rect(Image& img, int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b);
void draw_marker(Image& img, double x, double y, int radius, uint8_t r, uint8_t g, uint8_t b);
// 3x5 bitmap glyphs: digits, '.', '-', '%', and uppercase letters.
void draw_text(Image& img, int x, int y, const std::string& text, uint8_t r, uint8_t g, uint8_t b, int scale = 1);

}  // namespace datt
