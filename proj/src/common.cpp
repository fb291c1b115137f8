#include "har/common.hpp"

#include <atomic>
#include <iostream>
#include <thread>

namespace har {

void Warnings::add(std::string message) {
    messages_.push_back(std::move(message));
}

void warn(Warnings* sink, std::string message) {
    if (sink) {
        sink->add(std::move(message));
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    return splitmix64(state_);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % n;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    // u1 == 0 would blow up the log
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Rng Rng::fork(std::uint64_t salt) const {
    std::uint64_t s = state_;
    std::uint64_t a = splitmix64(s);
    return Rng(mix_seed(a, salt));
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(state);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix_seed(mix_seed(a, b, c), d);
}

double squared_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("squared_distance: dimensions differ (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double distance(const Vec& a, const Vec& b) {
    return std::sqrt(squared_distance(a, b));
}

double squared_distance_bounded(const Vec& a, const Vec& b, double bound) {
    if (a.size() != b.size())
        throw DimensionMismatch("squared_distance_bounded: dimensions differ");
    double sum = 0.0;
    const std::size_t n = a.size();
    std::size_t i = 0;
    while (i < n) {
        const std::size_t chunk_end = std::min(n, i + 16);
        for (; i < chunk_end; ++i) {
            const double d = a[i] - b[i];
            sum += d * d;
        }
        if (sum > bound) return sum;
    }
    return sum;
}

void run_parallel(std::size_t jobs, const std::vector<std::function<void()>>& tasks) {
    if (tasks.empty()) return;
    if (jobs <= 1 || tasks.size() == 1) {
        for (const auto& task : tasks) task();
        return;
    }
    jobs = std::min(jobs, tasks.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                tasks[i]();
            }
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace har
