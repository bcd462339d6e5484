#pragma once

#include "gcm/types.hpp"

namespace gcm {

/// Copies rows [r0, r1) and columns [c0, c1).
ImageGrid crop(const ImageGrid& img, int r0, int r1, int c0, int c1);

/// Copies rows [r0, r1), full width.
ImageGrid crop_rows(const ImageGrid& img, int r0, int r1);

/// Rows [0, H/2) — the superior half (H/2 floors for odd heights).
ImageGrid superior_half(const ImageGrid& img);

/// Rows [H/2, H) — the inferior half.
ImageGrid inferior_half(const ImageGrid& img);

ImageGrid half_view(const ImageGrid& img, Side side);

/// Bilinear resample to (out_h, out_w) with half-pixel center alignment.
/// Identity when the shape already matches.
ImageGrid resize_bilinear(const ImageGrid& img, int out_h, int out_w);

ImageGrid flip_horizontal(const ImageGrid& img);

/// Separable Gaussian blur with reflect padding; sigma <= 0 is the identity.
ImageGrid gaussian_blur(const ImageGrid& img, double sigma);

}  // namespace gcm
