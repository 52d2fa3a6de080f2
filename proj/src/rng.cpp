#include "growthlab/rng.hpp"

#include <algorithm>
#include <unordered_set>

#include "growthlab/error.hpp"

namespace growthlab {

std::vector<std::int64_t> random_distinct_integers(std::uint64_t seed, std::size_t n,
                                                   std::int64_t lo, std::int64_t hi) {
    if (hi < lo) raise(errc::invalid_argument, "empty universe");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span < n) raise(errc::invalid_argument, "universe smaller than requested size");

    SplitMix64 rng(seed);
    std::unordered_set<std::int64_t> seen;
    std::vector<std::int64_t> out;
    out.reserve(n);
    while (out.size() < n) {
        std::int64_t v = lo + static_cast<std::int64_t>(rng.next_below(span));
        if (seen.insert(v).second) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace growthlab
