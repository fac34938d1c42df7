#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace dsrclink {

using cplx = std::complex<double>;

/// Baseband I/Q samples at some oversampling rate.
using SampleStream = std::vector<cplx>;
/// Constellation points at one sample per symbol.
using SymbolStream = std::vector<cplx>;
/// 2-bit symbol values in [0, 4).
using DibitStream = std::vector<std::uint8_t>;
using ByteStream = std::vector<std::uint8_t>;

/// Real FIR coefficients together with the samples-per-symbol they were
/// designed for.
struct FirTaps {
    std::vector<double> coefficients;
    int sps = 1;
};

/// Stride-decimated sub-filters of a prototype filter, plus the same
/// decomposition of the prototype's central difference. Bank k holds the
/// prototype taps at indices k, k+nfilts, k+2*nfilts, ... zero-padded so
/// every bank has equal length.
struct PolyphaseBank {
    int nfilts = 0;
    std::vector<std::vector<double>> banks;
    std::vector<std::vector<double>> derivative_banks;
};

} // namespace dsrclink
