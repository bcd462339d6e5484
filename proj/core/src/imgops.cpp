#include "gcm/imgops.hpp"

#include <algorithm>
#include <cmath>

namespace gcm {

ImageGrid crop(const ImageGrid& img, int r0, int r1, int c0, int c1) {
    if (r0 < 0 || c0 < 0 || r1 > img.height || c1 > img.width || r0 >= r1 || c0 >= c1) {
        throw invalid_input_error("crop: window [" + std::to_string(r0) + "," + std::to_string(r1) +
                                  ")x[" + std::to_string(c0) + "," + std::to_string(c1) +
                                  ") outside " + std::to_string(img.height) + "x" +
                                  std::to_string(img.width));
    }
    ImageGrid out(r1 - r0, c1 - c0);
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            out.at(r - r0, c - c0) = img.at(r, c);
        }
    }
    return out;
}

ImageGrid crop_rows(const ImageGrid& img, int r0, int r1) { return crop(img, r0, r1, 0, img.width); }

ImageGrid superior_half(const ImageGrid& img) { return crop_rows(img, 0, img.height / 2); }

ImageGrid inferior_half(const ImageGrid& img) { return crop_rows(img, img.height / 2, img.height); }

ImageGrid half_view(const ImageGrid& img, Side side) {
    return side == Side::superior ? superior_half(img) : inferior_half(img);
}

ImageGrid resize_bilinear(const ImageGrid& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) throw invalid_input_error("resize_bilinear: non-positive output shape");
    if (out_h == img.height && out_w == img.width) return img;

    ImageGrid out(out_h, out_w);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int r = 0; r < out_h; ++r) {
        const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int c = 0; c < out_w; ++c) {
            const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(y0, x0) * (1.0 - wx) + img.at(y0, x1) * wx;
            const double bot = img.at(y1, x0) * (1.0 - wx) + img.at(y1, x1) * wx;
            out.at(r, c) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

ImageGrid flip_horizontal(const ImageGrid& img) {
    ImageGrid out(img.height, img.width);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            out.at(r, c) = img.at(r, img.width - 1 - c);
        }
    }
    return out;
}

ImageGrid gaussian_blur(const ImageGrid& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    auto reflect = [](int i, int n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
        return std::clamp(i, 0, n - 1);
    };

    ImageGrid tmp(img.height, img.width);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * img.at(r, reflect(c + i, img.width));
            }
            tmp.at(r, c) = acc;
        }
    }
    ImageGrid out(img.height, img.width);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * tmp.at(reflect(r + i, img.height), c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

}  // namespace gcm
