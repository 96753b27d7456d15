#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ding {

struct VolumeShape {
    std::size_t frames = 1;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const { return frames * height * width; }
    friend bool operator==(const VolumeShape&, const VolumeShape&) = default;
};

/// Binary (frames, height, width) grid stored row-major, frame by frame.
/// 1 = observed / preserved, 0 = to be edited.
class BinaryVolume {
public:
    BinaryVolume() = default;
    BinaryVolume(VolumeShape shape, std::uint8_t fill);
    BinaryVolume(VolumeShape shape, std::vector<std::uint8_t> data);

    const VolumeShape& shape() const { return shape_; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    std::uint8_t at(std::size_t t, std::size_t y, std::size_t x) const {
        return data_[index(t, y, x)];
    }
    void set(std::size_t t, std::size_t y, std::size_t x, std::uint8_t v) {
        data_[index(t, y, x)] = v;
    }

    std::size_t count_observed() const;
    std::size_t count_edited() const { return data_.size() - count_observed(); }

    friend bool operator==(const BinaryVolume&, const BinaryVolume&) = default;

private:
    std::size_t index(std::size_t t, std::size_t y, std::size_t x) const {
        return (t * shape_.height + y) * shape_.width + x;
    }

    VolumeShape shape_;
    std::vector<std::uint8_t> data_;
};

/// Pixel-space mask; frames = 1 for images.
struct PixelMask {
    BinaryVolume grid;
};

/// Encoder downsampling factors along (time, height, width).
struct LiftFactors {
    std::size_t time = 1;
    std::size_t height = 8;
    std::size_t width = 8;
};

struct LatentMask {
    BinaryVolume grid;
    LiftFactors factors;
};

/// Grows the edited region by a Chebyshev radius in space and, separately,
/// by time_radius along the frame axis. radius = 0 and time_radius = 0 is the
/// identity.
PixelMask dilate_mask(const PixelMask& mask, std::size_t radius, std::size_t time_radius = 0);

/// A latent cell is observed iff every pixel of its block is observed. This is
/// the only blockwise rule under which no edited pixel can end up inside an
/// observed cell. Non-divisible shapes throw ErrorKind::Shape.
LatentMask downsample_mask(const PixelMask& mask, const LiftFactors& factors);

/// dilate_mask followed by downsample_mask.
LatentMask lift_mask(const PixelMask& mask, const LiftFactors& factors, std::size_t radius,
                     std::size_t time_radius = 0);

/// Default spatial dilation: half the height factor, rounded down.
std::size_t default_dilation(const LiftFactors& factors);

struct LeakageReport {
    /// Edited pixels whose latent cell is marked observed; context leakage risk.
    std::size_t edited_pixels_in_observed_cells = 0;
    /// Observed pixels whose latent cell is marked edited; context given up.
    std::size_t observed_pixels_in_edited_cells = 0;
};

/// Compares the block-upsampled latent mask with the pixel mask.
LeakageReport leakage_report(const PixelMask& pixel, const LatentMask& latent,
                             const LiftFactors& factors);

}  // namespace ding
