#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "gcm/types.hpp"

namespace gcm {

/// A 3D intensity array with shape (dim[0], dim[1], dim[2]), stored with
/// dim[0] varying fastest (the NIfTI voxel order).
struct Volume {
    std::array<int, 3> dim{0, 0, 0};
    std::vector<double> data;

    double at(int i, int j, int k) const {
        return data[static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(dim[0]) * (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(dim[1]) * static_cast<std::size_t>(k))];
    }
    std::size_t size() const {
        return static_cast<std::size_t>(dim[0]) * dim[1] * dim[2];
    }
};

/// Picks the slice at the intensity-weighted center of mass along `axis`
/// (rounded to the nearest index) and returns it as a raw 2D grid, not yet
/// normalized. Which axis is "coronal" depends on the acquisition convention,
/// so the axis index is explicit. Throws on an all-zero volume.
ImageGrid extract_center_of_mass_slice(const Volume& volume, int axis);

/// Min-max scales a raw grid so min -> 0 and max -> 1 exactly.
/// Throws invalid_input_error for a constant image (no dynamic range).
ImageGrid normalize_intensity(const ImageGrid& raw);

/// Minimal NIfTI-1 reader: consumes only the dimensions and the intensity
/// array (scl_slope/scl_inter applied when set). Handles .nii and .nii.gz.
Volume read_nifti(const std::filesystem::path& path);

}  // namespace gcm
