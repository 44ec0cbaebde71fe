#pragma once

#include <cmath>
#include <cstddef>

#include "wrc/errors.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Self-supervised loss formulas as pure tensor functions. The cosine term is
// averaged over spatial locations; the l2 term is the global Euclidean norm
// over the whole tensor.

/// Rectangular region in a high-res feature grid (for crop alignment).
struct CropRegion {
    std::size_t top = 0, left = 0, height = 0, width = 0;
};

struct LossValue {
    double value = 0.0;
    std::size_t zero_pair_warnings = 0;  ///< locations where both vectors were zero
};

/// 1 - mean_{y,x} cos(a[:,y,x], b[:,y,x]) + ||a - b||_2.
/// A location where both channel vectors are zero contributes cosine 0
/// (maximal dissimilarity) and is counted as a warning.
inline LossValue cosine_l2_loss(const FeatureMap& a, const FeatureMap& b) {
    if (!a.same_shape(b)) throw DimensionError("cosine_l2_loss: shape mismatch");
    const std::size_t C = a.channels(), H = a.height(), W = a.width();
    LossValue out;
    double cos_sum = 0.0;
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t c = 0; c < C; ++c) {
                const double va = a(c, y, x);
                const double vb = b(c, y, x);
                dot += va * vb;
                na += va * va;
                nb += vb * vb;
            }
            if (na == 0.0 && nb == 0.0) {
                ++out.zero_pair_warnings;  // cosine defined as 0
            } else if (dot == na && na == nb) {
                cos_sum += 1.0;  // bitwise-identical vectors: exactly aligned
            } else if (na > 0.0 && nb > 0.0) {
                cos_sum += dot / std::sqrt(na * nb);
            }
            // one-sided zero vector: dot is 0, cosine contribution 0
        }
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        sq += d * d;
    }
    out.value = 1.0 - cos_sum / static_cast<double>(H * W) + std::sqrt(sq);
    return out;
}

/// Extract the region slab from z_pp and score it against the crop feature.
inline LossValue local_loss(const FeatureMap& z_c, const FeatureMap& z_pp,
                            const CropRegion& region) {
    if (region.top + region.height > z_pp.height() ||
        region.left + region.width > z_pp.width()) {
        throw DimensionError("local_loss: region out of bounds");
    }
    if (z_c.height() != region.height || z_c.width() != region.width ||
        z_c.channels() != z_pp.channels()) {
        throw DimensionError("local_loss: region shape must equal z_c spatial shape");
    }
    FeatureMap slab(z_pp.channels(), region.height, region.width);
    for (std::size_t c = 0; c < z_pp.channels(); ++c) {
        for (std::size_t y = 0; y < region.height; ++y) {
            for (std::size_t x = 0; x < region.width; ++x) {
                slab(c, y, x) = z_pp(c, region.top + y, region.left + x);
            }
        }
    }
    return cosine_l2_loss(z_c, slab);
}

/// Plain sum of the three loss terms.
inline double total_loss(double l_global, double l_local, double l_self) {
    return l_global + l_local + l_self;
}

}  // namespace wrc
