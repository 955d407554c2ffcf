#include "spikewhite/rng.hpp"

#include <algorithm>
#include <unordered_set>

namespace spikewhite {

std::vector<std::uint64_t> Rng::sample_without_replacement(std::uint64_t n, std::uint64_t k) {
    if (k >= n) {
        std::vector<std::uint64_t> all(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            all[i] = i;
        }
        return all;
    }
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(k * 2);
    for (std::uint64_t j = n - k; j < n; ++j) {
        const std::uint64_t r = below(j + 1);
        if (!chosen.insert(r).second) {
            chosen.insert(j);
        }
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace spikewhite
