#include "ding/masklift.hpp"

#include <algorithm>
#include <string>

#include "ding/error.hpp"

namespace ding {

BinaryVolume::BinaryVolume(VolumeShape shape, std::uint8_t fill)
    : BinaryVolume(shape, std::vector<std::uint8_t>(shape.size(), fill)) {}

BinaryVolume::BinaryVolume(VolumeShape shape, std::vector<std::uint8_t> data)
    : shape_(shape), data_(std::move(data)) {
    require(shape_.frames > 0 && shape_.height > 0 && shape_.width > 0, ErrorKind::Shape,
            "mask dimensions must be positive");
    require(data_.size() == shape_.size(), ErrorKind::Shape,
            "mask data length does not match its shape");
    for (std::uint8_t v : data_) {
        require(v <= 1, ErrorKind::InvalidParameter, "mask entries must be 0 or 1");
    }
}

std::size_t BinaryVolume::count_observed() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

namespace {

// Separable running max of the edited indicator along one axis.
void grow_edited(BinaryVolume& vol, std::size_t radius, int axis) {
    if (radius == 0) {
        return;
    }
    const VolumeShape s = vol.shape();
    const BinaryVolume src = vol;
    const std::size_t len = axis == 0 ? s.frames : axis == 1 ? s.height : s.width;
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t y = 0; y < s.height; ++y) {
            for (std::size_t x = 0; x < s.width; ++x) {
                const std::size_t pos = axis == 0 ? t : axis == 1 ? y : x;
                const std::size_t lo = pos >= radius ? pos - radius : 0;
                const std::size_t hi = std::min(len - 1, pos + radius);
                bool edited = false;
                for (std::size_t q = lo; q <= hi && !edited; ++q) {
                    const std::uint8_t v = axis == 0 ? src.at(q, y, x)
                                         : axis == 1 ? src.at(t, q, x)
                                                     : src.at(t, y, q);
                    edited = v == 0;
                }
                if (edited) {
                    vol.set(t, y, x, 0);
                }
            }
        }
    }
}

void check_factors(const VolumeShape& s, const LiftFactors& f) {
    require(f.time > 0 && f.height > 0 && f.width > 0, ErrorKind::InvalidParameter,
            "downsampling factors must be positive");
    if (s.frames % f.time != 0 || s.height % f.height != 0 || s.width % f.width != 0) {
        fail(ErrorKind::Shape, "mask shape " + std::to_string(s.frames) + "x" +
                                   std::to_string(s.height) + "x" + std::to_string(s.width) +
                                   " is not divisible by factors " + std::to_string(f.time) + "x" +
                                   std::to_string(f.height) + "x" + std::to_string(f.width));
    }
}

}  // namespace

PixelMask dilate_mask(const PixelMask& mask, std::size_t radius, std::size_t time_radius) {
    PixelMask out = mask;
    grow_edited(out.grid, time_radius, 0);
    grow_edited(out.grid, radius, 1);
    grow_edited(out.grid, radius, 2);
    return out;
}

LatentMask downsample_mask(const PixelMask& mask, const LiftFactors& factors) {
    const VolumeShape s = mask.grid.shape();
    check_factors(s, factors);
    const VolumeShape ls{s.frames / factors.time, s.height / factors.height,
                         s.width / factors.width};
    BinaryVolume latent(ls, std::uint8_t{1});
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t y = 0; y < s.height; ++y) {
            for (std::size_t x = 0; x < s.width; ++x) {
                if (mask.grid.at(t, y, x) == 0) {
                    latent.set(t / factors.time, y / factors.height, x / factors.width, 0);
                }
            }
        }
    }
    return {std::move(latent), factors};
}

LatentMask lift_mask(const PixelMask& mask, const LiftFactors& factors, std::size_t radius,
                     std::size_t time_radius) {
    return downsample_mask(dilate_mask(mask, radius, time_radius), factors);
}

std::size_t default_dilation(const LiftFactors& factors) {
    return factors.height / 2;
}

LeakageReport leakage_report(const PixelMask& pixel, const LatentMask& latent,
                             const LiftFactors& factors) {
    const VolumeShape s = pixel.grid.shape();
    check_factors(s, factors);
    const VolumeShape expected{s.frames / factors.time, s.height / factors.height,
                               s.width / factors.width};
    require(latent.grid.shape() == expected, ErrorKind::Shape,
            "latent mask shape does not match the pixel mask and factors");

    LeakageReport report;
    for (std::size_t t = 0; t < s.frames; ++t) {
        for (std::size_t y = 0; y < s.height; ++y) {
            for (std::size_t x = 0; x < s.width; ++x) {
                const bool pixel_observed = pixel.grid.at(t, y, x) == 1;
                const bool cell_observed =
                    latent.grid.at(t / factors.time, y / factors.height, x / factors.width) == 1;
                if (!pixel_observed && cell_observed) {
                    ++report.edited_pixels_in_observed_cells;
                } else if (pixel_observed && !cell_observed) {
                    ++report.observed_pixels_in_edited_cells;
                }
            }
        }
    }
    return report;
}

}  // namespace ding
