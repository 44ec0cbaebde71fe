#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "wrc/errors.hpp"

namespace wrc {

/// Role a weight field plays in the inverse problem.
enum class WeightRole {
    DataFidelity,  ///< low-resolution field multiplying the data residual
    Regularizer,   ///< high-resolution field multiplying the prior residual
};

namespace detail {

inline std::size_t flat_index(std::size_t c, std::size_t y, std::size_t x,
                              std::size_t height, std::size_t width) {
    return (c * height + y) * width + x;
}

inline void check_finite(const std::vector<double>& data, const char* what) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string(what) + ": non-finite entry");
        }
    }
}

}  // namespace detail

/// Dense real C x H x W tensor, channel-major then row-major, 64-bit floats.
class FeatureMap {
public:
    FeatureMap(std::size_t channels, std::size_t height, std::size_t width)
        : channels_(channels), height_(height), width_(width),
          data_(channels * height * width, 0.0) {}

    FeatureMap(std::size_t channels, std::size_t height, std::size_t width,
               std::vector<double> data)
        : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != channels_ * height_ * width_) {
            throw DimensionError("FeatureMap: data length does not match C*H*W");
        }
        detail::check_finite(data_, "FeatureMap");
    }

    std::size_t channels() const { return channels_; }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[detail::flat_index(c, y, x, height_, width_)];
    }
    double& operator()(std::size_t c, std::size_t y, std::size_t x) {
        return data_[detail::flat_index(c, y, x, height_, width_)];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    const double* channel(std::size_t c) const { return data_.data() + c * height_ * width_; }
    double* channel(std::size_t c) { return data_.data() + c * height_ * width_; }

    bool same_shape(const FeatureMap& other) const {
        return channels_ == other.channels_ && height_ == other.height_ &&
               width_ == other.width_;
    }

private:
    std::size_t channels_, height_, width_;
    std::vector<double> data_;
};

/// Per-channel k_H x k_W convolution kernel with an explicit origin tap.
///
/// `origin` names the tap that lands at spatial index (0,0) when the kernel is
/// circularly embedded into a full-size canvas. The common centered convention
/// is origin = (kh/2, kw/2).
class Kernel {
public:
    Kernel(std::size_t channels, std::size_t kh, std::size_t kw,
           std::vector<double> taps, std::size_t oy, std::size_t ox)
        : channels_(channels), kh_(kh), kw_(kw), taps_(std::move(taps)), oy_(oy), ox_(ox) {
        if (taps_.size() != channels_ * kh_ * kw_) {
            throw DimensionError("Kernel: taps length does not match C*kh*kw");
        }
        if (oy_ >= kh_ || ox_ >= kw_) {
            throw ValidationError("Kernel: origin outside tap grid");
        }
        detail::check_finite(taps_, "Kernel");
    }

    std::size_t channels() const { return channels_; }
    std::size_t kh() const { return kh_; }
    std::size_t kw() const { return kw_; }
    std::size_t origin_y() const { return oy_; }
    std::size_t origin_x() const { return ox_; }

    double operator()(std::size_t c, std::size_t i, std::size_t j) const {
        return taps_[(c * kh_ + i) * kw_ + j];
    }
    double& operator()(std::size_t c, std::size_t i, std::size_t j) {
        return taps_[(c * kh_ + i) * kw_ + j];
    }

    const std::vector<double>& taps() const { return taps_; }

    /// Single-tap identity kernel for every channel.
    static Kernel delta(std::size_t channels) {
        return Kernel(channels, 1, 1, std::vector<double>(channels, 1.0), 0, 0);
    }

private:
    std::size_t channels_, kh_, kw_;
    std::vector<double> taps_;
    std::size_t oy_, ox_;
};

/// Nonnegative per-location weight map. Stores the already-squared magnitude
/// playing the role of |W|^2 (data fidelity) or |W_lambda|^2 (regularizer).
class WeightField {
public:
    WeightField(std::size_t channels, std::size_t height, std::size_t width,
                std::vector<double> data, WeightRole role)
        : channels_(channels), height_(height), width_(width),
          data_(std::move(data)), role_(role) {
        if (data_.size() != channels_ * height_ * width_) {
            throw DimensionError("WeightField: data length does not match C*H*W");
        }
        for (double v : data_) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ValidationError("WeightField: entries must be finite and >= 0");
            }
        }
    }

    /// Constant-valued field.
    static WeightField constant(std::size_t channels, std::size_t height,
                                std::size_t width, double value, WeightRole role) {
        return WeightField(channels, height, width,
                           std::vector<double>(channels * height * width, value), role);
    }

    std::size_t channels() const { return channels_; }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    WeightRole role() const { return role_; }

    double operator()(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[detail::flat_index(c, y, x, height_, width_)];
    }

    const std::vector<double>& data() const { return data_; }
    const double* channel(std::size_t c) const { return data_.data() + c * height_ * width_; }

private:
    std::size_t channels_, height_, width_;
    std::vector<double> data_;
    WeightRole role_;
};

/// Complex C x H x W tensor with the same layout as FeatureMap.
class Spectrum {
public:
    using value_type = std::complex<double>;

    Spectrum(std::size_t channels, std::size_t height, std::size_t width)
        : channels_(channels), height_(height), width_(width),
          data_(channels * height * width, value_type(0.0, 0.0)) {}

    Spectrum(std::size_t channels, std::size_t height, std::size_t width,
             std::vector<value_type> data)
        : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != channels_ * height_ * width_) {
            throw DimensionError("Spectrum: data length does not match C*H*W");
        }
    }

    std::size_t channels() const { return channels_; }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    value_type operator()(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[detail::flat_index(c, y, x, height_, width_)];
    }
    value_type& operator()(std::size_t c, std::size_t y, std::size_t x) {
        return data_[detail::flat_index(c, y, x, height_, width_)];
    }

    const std::vector<value_type>& data() const { return data_; }
    std::vector<value_type>& data() { return data_; }

    value_type* channel(std::size_t c) { return data_.data() + c * height_ * width_; }
    const value_type* channel(std::size_t c) const {
        return data_.data() + c * height_ * width_;
    }

    bool same_shape(const Spectrum& other) const {
        return channels_ == other.channels_ && height_ == other.height_ &&
               width_ == other.width_;
    }

private:
    std::size_t channels_, height_, width_;
    std::vector<value_type> data_;
};

}  // namespace wrc
