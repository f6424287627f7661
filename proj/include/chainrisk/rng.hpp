#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace chainrisk {

/// Source of independent Uniform(0,1) variates. Values are strictly inside
/// the open interval so inverse-CDF transforms stay finite.
class UniformSource {
public:
    virtual ~UniformSource() = default;
    virtual double next_uniform() = 0;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Streams with different ids never share substreams for the same seed.
enum class StreamId : std::uint64_t {
    Replication = 1,
    Cycle = 2,
    Auxiliary = 3,
};

/// Key of the substream for replication `index` of a run seeded with `seed`.
/// Depends only on (seed, stream, index), never on scheduling.
constexpr std::uint64_t substream_key(std::uint64_t seed, StreamId stream,
                                      std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) ^ index);
}

/// Uniform source backed by a 64-bit Mersenne twister.
class EngineSource final : public UniformSource {
public:
    explicit EngineSource(std::uint64_t key) : engine_(key) {}

    double next_uniform() override {
        // 53 random bits, shifted by half an ulp so 0 is never produced.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

inline EngineSource make_substream(std::uint64_t seed, StreamId stream, std::uint64_t index) {
    return EngineSource(substream_key(seed, stream, index));
}

/// Replays a fixed list of uniforms; throws std::out_of_range when exhausted.
class ScriptedSource final : public UniformSource {
public:
    explicit ScriptedSource(std::vector<double> values) : values_(std::move(values)) {}
    double next_uniform() override;
    std::size_t consumed() const noexcept { return pos_; }

private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

/// Forwards to another source and counts the draws.
class CountingSource final : public UniformSource {
public:
    explicit CountingSource(UniformSource& inner) : inner_(inner) {}
    double next_uniform() override {
        ++count_;
        return inner_.next_uniform();
    }
    std::size_t count() const noexcept { return count_; }

private:
    UniformSource& inner_;
    std::size_t count_ = 0;
};

}  // namespace chainrisk
