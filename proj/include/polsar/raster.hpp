#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polsar/error.hpp"

namespace polsar {

/// Row-major single-channel raster.
template <class T>
class Raster {
public:
    Raster() = default;
    Raster(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }

    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    template <class U>
    bool same_shape(const Raster<U>& other) const {
        return height_ == other.height() && width_ == other.width();
    }

    friend bool operator==(const Raster& a, const Raster& b) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

template <class T, class U>
void require_same_shape(const Raster<T>& a, const Raster<U>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ArgumentError(std::string(what) + ": raster dimensions differ (" +
                            std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                            std::to_string(b.height()) + "x" + std::to_string(b.width()) + ")");
    }
}

} // namespace polsar
