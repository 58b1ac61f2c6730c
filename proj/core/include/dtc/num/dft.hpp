// dft.hpp — discrete Fourier transform of uniformly sampled real series.

#pragma once

#include "dtc/num/types.hpp"

#include <vector>

namespace dtc::num {

struct Spectrum {
    // Angular frequency in units of the driving frequency, FFT ordering
    // (non-negative bins first, then negative).
    std::vector<double> frequency;
    // |X_k| / N
    std::vector<double> magnitude;
    std::vector<Complex> coefficients;

    // Bins 0..N/2 only.
    Spectrum one_sided() const;
    // Index of the largest magnitude among bins 0..N/2.
    std::size_t dominant_bin() const;
};

// Throws ValidationError for fewer than 2 samples or non-uniform spacing.
Spectrum dft(const ObservableSeries& series, double omega = 1.0);

} // namespace dtc::num
