#pragma once

#include <algorithm>
#include <cstddef>

#include "ding/masklift.hpp"
#include "ding/random.hpp"

namespace ding::testing {

/// A few random edited rectangles plus sparse speckle.
inline PixelMask random_pixel_mask(VolumeShape shape, RandomStream& rng) {
    BinaryVolume v(shape, 1);
    const std::size_t rects = 1 + rng.bits() % 3;
    for (std::size_t r = 0; r < rects; ++r) {
        const std::size_t y0 = rng.bits() % shape.height;
        const std::size_t x0 = rng.bits() % shape.width;
        const std::size_t hh = 1 + rng.bits() % std::max<std::size_t>(1, shape.height / 3);
        const std::size_t ww = 1 + rng.bits() % std::max<std::size_t>(1, shape.width / 3);
        const std::size_t t = rng.bits() % shape.frames;
        for (std::size_t y = y0; y < std::min(shape.height, y0 + hh); ++y) {
            for (std::size_t x = x0; x < std::min(shape.width, x0 + ww); ++x) {
                v.set(t, y, x, 0);
            }
        }
    }
    for (std::size_t t = 0; t < shape.frames; ++t) {
        for (std::size_t y = 0; y < shape.height; ++y) {
            for (std::size_t x = 0; x < shape.width; ++x) {
                if (rng.uniform() < 0.01) {
                    v.set(t, y, x, 0);
                }
            }
        }
    }
    return {v};
}

}  // namespace ding::testing
