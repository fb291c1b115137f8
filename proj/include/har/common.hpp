#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace har {

using Vec = std::vector<double>;

// Error hierarchy. Parse/data/config errors map onto the CLI exit codes
// (config -> 2, data -> 3); everything else is a programming error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct DegenerateSkeleton : Error {
    using Error::Error;
};

// Non-fatal diagnostics. Callers that pass nullptr get them on stderr.
class Warnings {
public:
    void add(std::string message);
    const std::vector<std::string>& messages() const { return messages_; }
    std::size_t count() const { return messages_.size(); }

private:
    std::vector<std::string> messages_;
};

void warn(Warnings* sink, std::string message);

// Deterministic RNG with a fixed algorithm (splitmix64 core) so that seeded
// runs reproduce bit-for-bit across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);
    // Uniform double in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller.
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

    // Derives an independent stream; used to give every fold/layer its own
    // seed so results do not depend on scheduling order.
    Rng fork(std::uint64_t salt) const;

private:
    std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

double squared_distance(const Vec& a, const Vec& b);
double distance(const Vec& a, const Vec& b);
// Partial squared distance that bails out once the running sum exceeds
// `bound`; returns a value > bound in that case.
double squared_distance_bounded(const Vec& a, const Vec& b, double bound);

// Runs `tasks` on up to `jobs` worker threads. Tasks must be independent;
// each one typically fills its own result slot.
void run_parallel(std::size_t jobs, const std::vector<std::function<void()>>& tasks);

}  // namespace har
