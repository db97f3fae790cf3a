// Portable random sources. Distributions are hand-rolled on top of the raw
// 64-bit engines so results do not depend on the standard library vendor.

#ifndef UWROUTE_RANDOM_HPP
#define UWROUTE_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uwroute
{

inline std::uint64_t
splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Maps 64 random bits to [0, 1) with 53 bits of resolution.
inline double
bits_to_unit(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based uniform draw: the same key always yields the same value.
/// Used for channel loss so that a given transmission meets the same fate
/// under every protocol variant run on the same seed.
inline double
keyed_uniform(std::initializer_list<std::uint64_t> key)
{
    std::uint64_t h = 0x51a3c0ffee15bad5ULL;
    for (auto k : key)
    {
        h = splitmix64(h ^ k);
    }
    return bits_to_unit(h);
}

class Rng
{
  public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : m_engine(splitmix64(seed ^ splitmix64(stream + 0x1234567ULL)))
    {
    }

    double uniform() { return bits_to_unit(m_engine()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return m_engine(); }

  private:
    std::mt19937_64 m_engine;
};

} // namespace uwroute

#endif
