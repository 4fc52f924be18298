#pragma once

#include <cstdint>
#include <random>

namespace dmvo
{
    /// SplitMix64 finalizer.
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Seed of the independent substream for `index` under `master`.
    constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept
    {
        return mix64(mix64(master) ^ mix64(index + 0xD1B54A32D192ED03ull));
    }

    /// Standard-normal generator over one substream.
    class NormalStream
    {
    public:
        explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

        double operator()() { return normal_(engine_); }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };
}
