#include "gcm/ingest.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <vector>

namespace gcm {
namespace {

// Offsets and codes from the NIfTI-1 header layout (348 bytes).
constexpr int kHeaderSize = 348;
constexpr int kOffDim = 40;        // short dim[8]
constexpr int kOffDatatype = 70;   // short
constexpr int kOffSclSlope = 112;  // float
constexpr int kOffSclInter = 116;  // float
constexpr int kOffVoxOffset = 108; // float
constexpr int kOffMagic = 344;     // char[4]

template <typename T>
T read_le(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

}  // namespace

ImageGrid extract_center_of_mass_slice(const Volume& volume, int axis) {
    if (axis < 0 || axis > 2) throw invalid_input_error("extract_center_of_mass_slice: axis must be 0..2");
    if (volume.size() == 0 || volume.data.size() != volume.size()) {
        throw invalid_input_error("extract_center_of_mass_slice: empty or inconsistent volume");
    }

    // Intensity-weighted center of mass along the chosen axis.
    double total = 0.0, weighted = 0.0;
    for (int k = 0; k < volume.dim[2]; ++k) {
        for (int j = 0; j < volume.dim[1]; ++j) {
            for (int i = 0; i < volume.dim[0]; ++i) {
                const double v = volume.at(i, j, k);
                if (v < 0.0) continue;  // negative intensities carry no mass
                const int idx = axis == 0 ? i : (axis == 1 ? j : k);
                total += v;
                weighted += v * idx;
            }
        }
    }
    if (total <= 0.0) {
        throw invalid_input_error("extract_center_of_mass_slice: all-zero volume, center of mass undefined");
    }
    const int slice = static_cast<int>(std::floor(weighted / total + 0.5));

    // Remaining two axes become (height, width) in ascending axis order.
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    ImageGrid out(volume.dim[a1], volume.dim[a2]);
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            int ijk[3];
            ijk[axis] = slice;
            ijk[a1] = r;
            ijk[a2] = c;
            out.at(r, c) = volume.at(ijk[0], ijk[1], ijk[2]);
        }
    }
    return out;
}

ImageGrid normalize_intensity(const ImageGrid& raw) {
    raw.require_valid(1);
    double mn = raw.pixels[0], mx = raw.pixels[0];
    for (double v : raw.pixels) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (mx == mn) {
        throw invalid_input_error("normalize_intensity: constant image has no dynamic range");
    }
    ImageGrid out(raw.height, raw.width);
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < raw.pixels.size(); ++i) {
        out.pixels[i] = (raw.pixels[i] - mn) * inv;
    }
    return out;
}

Volume read_nifti(const std::filesystem::path& path) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (!f) throw io_error("read_nifti: cannot open " + path.string());

    std::vector<unsigned char> header(kHeaderSize);
    if (gzread(f, header.data(), kHeaderSize) != kHeaderSize) {
        gzclose(f);
        throw io_error("read_nifti: truncated header in " + path.string());
    }
    if (std::memcmp(header.data() + kOffMagic, "n+1", 3) != 0 &&
        std::memcmp(header.data() + kOffMagic, "ni1", 3) != 0) {
        gzclose(f);
        throw io_error("read_nifti: " + path.string() + " is not a NIfTI-1 file");
    }

    const int ndim = read_le<short>(header.data() + kOffDim);
    if (ndim < 3) {
        gzclose(f);
        throw invalid_input_error("read_nifti: need a 3D volume, got dim " + std::to_string(ndim));
    }
    Volume vol;
    for (int a = 0; a < 3; ++a) {
        vol.dim[a] = read_le<short>(header.data() + kOffDim + 2 * (a + 1));
        if (vol.dim[a] < 1) {
            gzclose(f);
            throw invalid_input_error("read_nifti: non-positive dimension");
        }
    }
    const short datatype = read_le<short>(header.data() + kOffDatatype);
    float slope = read_le<float>(header.data() + kOffSclSlope);
    const float inter = read_le<float>(header.data() + kOffSclInter);
    if (slope == 0.0f) slope = 1.0f;
    const long vox_offset = static_cast<long>(read_le<float>(header.data() + kOffVoxOffset));

    // Skip the extension area between the header and the voxel data.
    for (long skip = vox_offset - kHeaderSize; skip > 0;) {
        char buf[4096];
        const int chunk = static_cast<int>(std::min<long>(skip, sizeof(buf)));
        if (gzread(f, buf, chunk) != chunk) {
            gzclose(f);
            throw io_error("read_nifti: truncated extension area in " + path.string());
        }
        skip -= chunk;
    }

    const std::size_t n = vol.size();
    vol.data.resize(n);

    auto load = [&](auto tag) {
        using T = decltype(tag);
        std::vector<T> raw(n);
        const std::size_t bytes = n * sizeof(T);
        if (static_cast<std::size_t>(gzread(f, raw.data(), static_cast<unsigned>(bytes))) != bytes) {
            gzclose(f);
            throw io_error("read_nifti: truncated voxel data in " + path.string());
        }
        for (std::size_t i = 0; i < n; ++i) {
            vol.data[i] = static_cast<double>(raw[i]) * slope + inter;
        }
    };

    switch (datatype) {
        case 2: load(std::uint8_t{}); break;    // DT_UINT8
        case 4: load(std::int16_t{}); break;    // DT_INT16
        case 8: load(std::int32_t{}); break;    // DT_INT32
        case 16: load(float{}); break;          // DT_FLOAT32
        case 64: load(double{}); break;         // DT_FLOAT64
        case 256: load(std::int8_t{}); break;   // DT_INT8
        case 512: load(std::uint16_t{}); break; // DT_UINT16
        default:
            gzclose(f);
            throw io_error("read_nifti: unsupported datatype code " + std::to_string(datatype));
    }
    gzclose(f);
    return vol;
}

}  // namespace gcm
