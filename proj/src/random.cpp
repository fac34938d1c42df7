#include "dsrclink/random.hpp"

#include <cmath>
#include <stdexcept>

namespace dsrclink {

std::uint32_t Rng::uniform_int(std::uint32_t bound) {
    if (bound == 0)
        throw std::invalid_argument("Rng::uniform_int: bound must be >= 1");
    // Rejection sampling on the top 32 bits keeps the draw unbiased.
    const std::uint64_t span = 0x100000000ull;
    const std::uint64_t limit = span - span % bound;
    std::uint64_t r;
    do {
        r = next_u64() >> 32;
    } while (r >= limit);
    return static_cast<std::uint32_t>(r % bound);
}

double Rng::uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] x [0,1).
    const double u = 1.0 - uniform_double();
    const double v = uniform_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * 3.14159265358979323846 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over the combined value.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace dsrclink
