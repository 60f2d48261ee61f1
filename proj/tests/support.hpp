#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "polsar/core.hpp"

namespace polsar::test {

inline Herm2 random_psd(std::mt19937_64& gen, bool allow_singular = false) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    // Sum of outer products of random vectors; one term gives rank one.
    const int terms = allow_singular && (gen() % 4 == 0) ? 1 : 3;
    Herm2 m;
    for (int t = 0; t < terms; ++t) {
        const Complex a(n(gen), n(gen)), b(n(gen), n(gen));
        m.c11 += std::norm(a);
        m.c22 += std::norm(b);
        m.c12 += a * std::conj(b);
    }
    return m.scaled(std::pow(10.0, u(gen)));
}

inline SlcImage random_slc(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<float> n(0.0f, 1.0f);
    SlcImage slc{Raster<Complex64>(h, w), Raster<Complex64>(h, w), {}};
    for (std::size_t i = 0; i < slc.hh.size(); ++i) {
        slc.hh[i] = {n(gen), n(gen)};
        slc.vv[i] = {0.5f * n(gen), 0.5f * n(gen)};
    }
    slc.meta.scene_id = "rand" + std::to_string(seed);
    return slc;
}

inline Eigen::Matrix2cd to_eigen(const Herm2& m) {
    Eigen::Matrix2cd a;
    a << m.c11, m.c12, std::conj(m.c12), m.c22;
    return a;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("polsar_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace polsar::test
