#include "glyphforge/rng.hpp"

#include "glyphforge/error.hpp"

namespace glyphforge {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

std::uint64_t Rng::next() { return engine_(); }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::invalid_argument, "Rng::below(0)");
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

long long Rng::range_int(long long lo, long long hi) {
    if (lo > hi) fail(ErrorKind::invalid_argument, "Rng::range_int: lo > hi");
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

float Rng::range(float lo, float hi) {
    return lo + static_cast<float>(unit()) * (hi - lo);
}

Rng Rng::fork(std::uint64_t stream) const {
    return Rng(mix64(seed_ ^ mix64(stream + 0x517cc1b727220a95ull)));
}

} // namespace glyphforge
