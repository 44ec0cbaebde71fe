#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wrc/errors.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Near-BCCB structure analysis of square attention matrices: Frobenius
// projection onto the block-circulant-with-circulant-blocks subspace and
// residual statistics.

/// (h*w) x (h*w) real matrix over an h x w token grid; row = query token in
/// row-major grid order.
struct AttentionMatrix {
    std::size_t grid_h = 0, grid_w = 0;
    std::vector<double> data;  // row-major, side = grid_h * grid_w

    std::size_t side() const { return grid_h * grid_w; }
    double operator()(std::size_t q, std::size_t p) const { return data[q * side() + p]; }
    double& operator()(std::size_t q, std::size_t p) { return data[q * side() + p]; }
};

/// First row of a BCCB matrix, indexed by 2-D circular shift (dy, dx); the
/// expanded matrix entry at (q, p) is gen[(p_y - q_y) mod h, (p_x - q_x) mod w].
struct BccbGenerator {
    std::size_t grid_h = 0, grid_w = 0;
    std::vector<double> gen;  // h x w, row-major

    double operator()(std::size_t dy, std::size_t dx) const { return gen[dy * grid_w + dx]; }
};

namespace bccb_detail {

inline void check_square(const AttentionMatrix& m) {
    if (m.grid_h == 0 || m.grid_w == 0 || m.data.size() != m.side() * m.side()) {
        throw DimensionError("AttentionMatrix: data size must be (h*w)^2");
    }
}

}  // namespace bccb_detail

/// Frobenius-orthogonal projection onto the BCCB subspace: each generator
/// entry is the mean of its circular offset class (every class has exactly
/// h*w members, one per query).
inline BccbGenerator project_bccb(const AttentionMatrix& m) {
    bccb_detail::check_square(m);
    const std::size_t h = m.grid_h, w = m.grid_w, n = m.side();
    BccbGenerator g{h, w, std::vector<double>(n, 0.0)};
    for (std::size_t qy = 0; qy < h; ++qy) {
        for (std::size_t qx = 0; qx < w; ++qx) {
            const std::size_t q = qy * w + qx;
            for (std::size_t py = 0; py < h; ++py) {
                for (std::size_t px = 0; px < w; ++px) {
                    const std::size_t dy = (py + h - qy) % h;
                    const std::size_t dx = (px + w - qx) % w;
                    g.gen[dy * w + dx] += m(q, py * w + px);
                }
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& e : g.gen) e *= inv;
    return g;
}

/// Materialize the (hw) x (hw) matrix from a generator via the shift rule.
inline AttentionMatrix expand_bccb(const BccbGenerator& g) {
    const std::size_t h = g.grid_h, w = g.grid_w, n = h * w;
    AttentionMatrix m{h, w, std::vector<double>(n * n)};
    for (std::size_t qy = 0; qy < h; ++qy) {
        for (std::size_t qx = 0; qx < w; ++qx) {
            const std::size_t q = qy * w + qx;
            for (std::size_t py = 0; py < h; ++py) {
                for (std::size_t px = 0; px < w; ++px) {
                    const std::size_t dy = (py + h - qy) % h;
                    const std::size_t dx = (px + w - qx) % w;
                    m(q, py * w + px) = g.gen[dy * w + dx];
                }
            }
        }
    }
    return m;
}

struct BccbResidual {
    double rel_residual = 0.0;  ///< ||m - P(m)||_F / ||m||_F, in [0, 1]
    BccbGenerator gen;
};

/// Relative Frobenius distance of m from its nearest BCCB matrix.
inline BccbResidual bccb_residual(const AttentionMatrix& m) {
    bccb_detail::check_square(m);
    BccbGenerator g = project_bccb(m);
    AttentionMatrix proj = expand_bccb(g);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        const double r = m.data[i] - proj.data[i];
        num += r * r;
        den += m.data[i] * m.data[i];
    }
    if (den == 0.0) throw ContractError("bccb_residual: zero matrix");
    return {std::sqrt(num / den), std::move(g)};
}

/// Head-averaged per-layer report: matrices are averaged entrywise before
/// projection, matching how per-layer attention maps are visualized.
inline BccbResidual layer_report(const std::vector<AttentionMatrix>& mats) {
    if (mats.empty()) throw ContractError("layer_report: no matrices");
    bccb_detail::check_square(mats.front());
    AttentionMatrix mean = mats.front();
    for (std::size_t k = 1; k < mats.size(); ++k) {
        if (mats[k].grid_h != mean.grid_h || mats[k].grid_w != mean.grid_w) {
            throw DimensionError("layer_report: grid mismatch");
        }
        for (std::size_t i = 0; i < mean.data.size(); ++i) {
            mean.data[i] += mats[k].data[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(mats.size());
    for (auto& e : mean.data) e *= inv;
    return bccb_residual(mean);
}

}  // namespace wrc
