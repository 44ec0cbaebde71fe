#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wrc/errors.hpp"
#include "wrc/fft_ops.hpp"
#include "wrc/solver.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Brute-force verification path: the vectorized operators as explicit dense
// matrices, solved by the weighted normal equations. Ground truth for the FFT
// solvers; capped at N_h <= 4096.

constexpr std::size_t kDenseCapacity = 4096;

struct DenseProblem {
    Eigen::MatrixXd a_conv;  ///< N_h x N_h circulant-of-circulant convolution
    Eigen::MatrixXd a_down;  ///< N_l x N_h selector (one 1 per row)
    Eigen::VectorXd d_w;     ///< |W|^2 diagonal, length N_l
    Eigen::VectorXd d_reg;   ///< |W_lam|^2 diagonal (epsilon included), length N_h
    Eigen::VectorXd y_vec;
    Eigen::VectorXd x0_vec;
    std::size_t H = 0, W = 0, s = 1;

    std::size_t n_high() const { return H * W; }
    std::size_t n_low() const { return n_high() / (s * s); }
};

/// Assemble the dense operators for one channel of a WrcProblem. The epsilon
/// guard is folded into d_reg so the dense solve matches wrc_solve's
/// effective objective.
inline DenseProblem assemble(const WrcProblem& p, std::size_t channel) {
    solver_detail::validate(p);
    const std::size_t H = p.x0.height(), W = p.x0.width(), s = p.spec.s;
    const std::size_t nh = H * W;
    const std::size_t nl = nh / (s * s);
    if (nh > kDenseCapacity) {
        throw CapacityError("dense oracle: N_h = " + std::to_string(nh) +
                            " exceeds capacity " + std::to_string(kDenseCapacity));
    }
    DenseProblem d;
    d.H = H;
    d.W = W;
    d.s = s;

    // embedded PSF with the origin tap at (0,0)
    const Kernel& k = p.spec.kernel;
    std::vector<double> psf(nh, 0.0);
    for (std::size_t i = 0; i < k.kh(); ++i) {
        for (std::size_t j = 0; j < k.kw(); ++j) {
            const std::size_t y = (i + H - k.origin_y()) % H;
            const std::size_t x = (j + W - k.origin_x()) % W;
            psf[y * W + x] = k(channel, i, j);
        }
    }

    d.a_conv.setZero(static_cast<Eigen::Index>(nh), static_cast<Eigen::Index>(nh));
    for (std::size_t ry = 0; ry < H; ++ry) {
        for (std::size_t rx = 0; rx < W; ++rx) {
            const std::size_t r = ry * W + rx;
            for (std::size_t cy = 0; cy < H; ++cy) {
                for (std::size_t cx = 0; cx < W; ++cx) {
                    const std::size_t dy = (ry + H - cy) % H;
                    const std::size_t dx = (rx + W - cx) % W;
                    d.a_conv(static_cast<Eigen::Index>(r),
                             static_cast<Eigen::Index>(cy * W + cx)) = psf[dy * W + dx];
                }
            }
        }
    }

    d.a_down.setZero(static_cast<Eigen::Index>(nl), static_cast<Eigen::Index>(nh));
    for (std::size_t u = 0; u < H / s; ++u) {
        for (std::size_t v = 0; v < W / s; ++v) {
            d.a_down(static_cast<Eigen::Index>(u * (W / s) + v),
                     static_cast<Eigen::Index>((u * s) * W + v * s)) = 1.0;
        }
    }

    d.d_w.resize(static_cast<Eigen::Index>(nl));
    d.y_vec.resize(static_cast<Eigen::Index>(nl));
    for (std::size_t i = 0; i < nl; ++i) {
        d.d_w(static_cast<Eigen::Index>(i)) = p.w_data.channel(channel)[i];
        d.y_vec(static_cast<Eigen::Index>(i)) = p.y.channel(channel)[i];
    }
    d.d_reg.resize(static_cast<Eigen::Index>(nh));
    d.x0_vec.resize(static_cast<Eigen::Index>(nh));
    for (std::size_t i = 0; i < nh; ++i) {
        d.d_reg(static_cast<Eigen::Index>(i)) = p.w_reg.channel(channel)[i] + p.eps;
        d.x0_vec(static_cast<Eigen::Index>(i)) = p.x0.channel(channel)[i];
    }
    return d;
}

/// Solve the weighted normal equations M x = A^T D_w y + D_reg x0 with
/// M = A^T D_w A + D_reg, by dense Cholesky.
inline Eigen::VectorXd dense_solve(const DenseProblem& d) {
    const Eigen::MatrixXd a = d.a_down * d.a_conv;
    const Eigen::MatrixXd m =
        a.transpose() * d.d_w.asDiagonal() * a + Eigen::MatrixXd(d.d_reg.asDiagonal());
    const Eigen::VectorXd b =
        a.transpose() * (d.d_w.asDiagonal() * d.y_vec) + d.d_reg.asDiagonal() * d.x0_vec;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        throw SingularityError(
            "dense_solve: normal matrix not SPD (eigenvalue range [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "])");
    }
    Eigen::VectorXd x = llt.solve(b);
    const double bn = b.norm();
    if (bn > 0.0 && (m * x - b).norm() / bn >= 1e-10) {
        throw NumericalError("dense_solve: factorization residual too large");
    }
    return x;
}

/// Quadratic form of the weighted objective, spatial-diagonal reading.
inline double dense_objective(const DenseProblem& d, const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = d.y_vec - d.a_down * (d.a_conv * x);
    const Eigen::VectorXd q = x - d.x0_vec;
    return r.dot(d.d_w.asDiagonal() * r) + q.dot(d.d_reg.asDiagonal() * q);
}

namespace dense_detail {

/// Unitary 2-D DFT matrix for an H x W grid, row-major flattening.
inline Eigen::MatrixXcd unitary_dft2(std::size_t H, std::size_t W) {
    const std::size_t n = H * W;
    Eigen::MatrixXcd f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t ky = 0; ky < H; ++ky) {
        for (std::size_t kx = 0; kx < W; ++kx) {
            for (std::size_t y = 0; y < H; ++y) {
                for (std::size_t x = 0; x < W; ++x) {
                    const double ang =
                        -2.0 * std::numbers::pi *
                        (static_cast<double>(ky * y) / static_cast<double>(H) +
                         static_cast<double>(kx * x) / static_cast<double>(W));
                    f(static_cast<Eigen::Index>(ky * W + kx),
                      static_cast<Eigen::Index>(y * W + x)) =
                        std::complex<double>(std::cos(ang), std::sin(ang)) * scale;
                }
            }
        }
    }
    return f;
}

}  // namespace dense_detail

/// Alternative solve through the frequency-domain Woodbury identity. Valid
/// only for a constant regularizer diagonal, where the spatial and frequency
/// readings of the regularizer coincide.
inline Eigen::VectorXd woodbury_solve(const DenseProblem& d) {
    const std::size_t nh = d.n_high();
    const std::size_t nl = d.n_low();
    const std::size_t s = d.s;
    const std::size_t dd = s * s;
    const double lam = d.d_reg(0);
    if ((d.d_reg.array() != lam).any()) {
        throw ContractError("woodbury_solve: requires a constant regularizer diagonal");
    }
    if (!(lam > 0.0)) throw ContractError("woodbury_solve: regularizer must be positive");

    using cd = std::complex<double>;
    const Eigen::MatrixXcd fh = dense_detail::unitary_dft2(d.H, d.W);
    const Eigen::MatrixXcd fl = dense_detail::unitary_dft2(d.H / s, d.W / s);

    // circulant eigenvalues: unnormalized DFT of the embedded PSF
    // (first column of a_conv)
    Eigen::VectorXcd lam_vec =
        std::sqrt(static_cast<double>(nh)) * (fh * d.a_conv.col(0));

    // permutation j = (coset (iy,ix), low-res frequency (u,v)) -> standard index
    const std::size_t hl = d.H / s, wl = d.W / s;
    std::vector<std::size_t> perm(nh);
    for (std::size_t iy = 0; iy < s; ++iy) {
        for (std::size_t ix = 0; ix < s; ++ix) {
            for (std::size_t u = 0; u < hl; ++u) {
                for (std::size_t v = 0; v < wl; ++v) {
                    perm[(iy * s + ix) * nl + u * wl + v] =
                        (u + iy * hl) * d.W + (v + ix * wl);
                }
            }
        }
    }

    Eigen::MatrixXcd lam_under =
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nl),
                               static_cast<Eigen::Index>(nh));
    for (std::size_t i = 0; i < dd; ++i) {
        for (std::size_t r = 0; r < nl; ++r) {
            lam_under(static_cast<Eigen::Index>(r),
                      static_cast<Eigen::Index>(i * nl + r)) =
                lam_vec(static_cast<Eigen::Index>(perm[i * nl + r]));
        }
    }

    const Eigen::MatrixXcd c_mat =
        (1.0 / static_cast<double>(dd)) *
        (fl * d.d_w.asDiagonal() * fl.adjoint());

    // G = Lambda^H F S^H |W|^2 y + lam F x0, then permuted
    Eigen::VectorXd up = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nh));
    for (std::size_t u = 0; u < hl; ++u) {
        for (std::size_t v = 0; v < wl; ++v) {
            up(static_cast<Eigen::Index>((u * s) * d.W + v * s)) =
                d.d_w(static_cast<Eigen::Index>(u * wl + v)) *
                d.y_vec(static_cast<Eigen::Index>(u * wl + v));
        }
    }
    const Eigen::VectorXcd g_std =
        lam_vec.conjugate().cwiseProduct(fh * up.cast<cd>()) +
        lam * (fh * d.x0_vec.cast<cd>());
    Eigen::VectorXcd g(static_cast<Eigen::Index>(nh));
    for (std::size_t j = 0; j < nh; ++j) {
        g(static_cast<Eigen::Index>(j)) = g_std(static_cast<Eigen::Index>(perm[j]));
    }

    // x_hat = [D^-1 - D^-1 L^H (C^-1 + L D^-1 L^H)^-1 L D^-1] G, D = lam I
    const double dinv = 1.0 / lam;
    const Eigen::MatrixXcd inner =
        c_mat.inverse() + dinv * (lam_under * lam_under.adjoint());
    const Eigen::VectorXcd correction =
        lam_under.adjoint() * inner.partialPivLu().solve(lam_under * g);
    Eigen::VectorXcd xhat_perm = dinv * g - (dinv * dinv) * correction;

    Eigen::VectorXcd xhat(static_cast<Eigen::Index>(nh));
    for (std::size_t j = 0; j < nh; ++j) {
        xhat(static_cast<Eigen::Index>(perm[j])) = xhat_perm(static_cast<Eigen::Index>(j));
    }
    return (fh.adjoint() * xhat).real();
}

}  // namespace wrc
