// types.hpp — state, operator and sampling types used across the library.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace dtc::num {

using Complex = std::complex<double>;

// Amplitudes in the computational basis; dimension 2 or 2^L.
using State = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

inline Matrix2 identity2() { return Matrix2::Identity(); }

inline Matrix2 pauli_x() {
    Matrix2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix2 pauli_y() {
    Matrix2 m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

inline Matrix2 pauli_z() {
    Matrix2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// Largest singular value.
inline double operator_norm(const Matrix2& m) {
    Eigen::JacobiSVD<Matrix2> svd(m);
    return svd.singularValues()(0);
}

// Uniform sampling of [t0, t1]; a single sample means t1 == t0.
class TimeGrid {
public:
    TimeGrid(double t0, double t1, std::size_t samples);

    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }
    std::size_t samples() const noexcept { return samples_; }
    double spacing() const noexcept;
    double at(std::size_t k) const noexcept;
    std::vector<double> points() const;

private:
    double t0_;
    double t1_;
    std::size_t samples_;
};

// Time grid plus real observable samples (input to spectra and lifetime fits).
struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> values;
};

} // namespace dtc::num
