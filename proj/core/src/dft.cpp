#include "dtc/num/dft.hpp"

#include "dtc/num/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>

namespace dtc::num {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

} // namespace

Spectrum Spectrum::one_sided() const {
    Spectrum out;
    const std::size_t n = magnitude.size();
    const std::size_t keep = n == 0 ? 0 : n / 2 + 1;
    out.frequency.assign(frequency.begin(), frequency.begin() + static_cast<std::ptrdiff_t>(keep));
    out.magnitude.assign(magnitude.begin(), magnitude.begin() + static_cast<std::ptrdiff_t>(keep));
    out.coefficients.assign(coefficients.begin(),
                            coefficients.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

std::size_t Spectrum::dominant_bin() const {
    const std::size_t keep = magnitude.empty() ? 0 : magnitude.size() / 2 + 1;
    if (keep == 0) throw ValidationError("Spectrum: empty");
    const auto first = magnitude.begin();
    return static_cast<std::size_t>(
        std::max_element(first, first + static_cast<std::ptrdiff_t>(keep)) - first);
}

Spectrum dft(const ObservableSeries& series, double omega) {
    const std::size_t n = series.values.size();
    if (n < 2 || series.times.size() != n) {
        throw ValidationError("dft: need at least 2 samples with matching time stamps");
    }
    if (!(omega > 0.0)) throw ValidationError("dft: omega must be positive");
    const double dt = (series.times.back() - series.times.front()) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw ValidationError("dft: time stamps must increase");
    for (std::size_t k = 1; k < n; ++k) {
        const double step = series.times[k] - series.times[k - 1];
        if (std::abs(step - dt) > 1e-9 * dt) {
            throw ValidationError("dft: sampling grid is not uniform");
        }
    }

    std::unique_ptr<fftw_complex, FftwFree> buffer(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buffer.get(), buffer.get(), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < n; ++k) {
        buffer.get()[k][0] = series.values[k];
        buffer.get()[k][1] = 0.0;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    Spectrum out;
    out.frequency.resize(n);
    out.magnitude.resize(n);
    out.coefficients.resize(n);
    // angular frequency of bin k is 2 pi k / (n dt); report it in units of omega
    const double unit = 2.0 * kPi / (static_cast<double>(n) * dt * omega);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto signed_k = k <= n / 2 ? static_cast<double>(k)
                                         : static_cast<double>(k) - static_cast<double>(n);
        out.frequency[k] = signed_k * unit;
        const Complex c(buffer.get()[k][0] * inv_n, buffer.get()[k][1] * inv_n);
        out.coefficients[k] = c;
        out.magnitude[k] = std::abs(c);
    }
    return out;
}

} // namespace dtc::num
