#pragma once

#include <stdexcept>
#include <string>

namespace maxiset {

/// Bandwidth too small for the grid: M*h fell below the resolvability floor,
/// so the Riemann sum of the kernel would be too coarse.
class UnderResolvedBandwidth : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The scaled kernel support does not fit inside one period (2*A*h >= 1), so
/// the circular convolution would overlap itself.
class KernelWraparound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The bandwidth rule produced h >= 1/2; use a larger n or a smaller C.
class BandwidthTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace maxiset
