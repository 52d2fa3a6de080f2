#pragma once

#include <cstdint>

#include "growthlab/error.hpp"

namespace growthlab {

/// Caps on set growth. max_result_size bounds every materialized set,
/// including fold intermediates. max_pair_evaluations bounds the cumulative
/// number of element-level pair operations one call performs; the dense
/// integer kernel does word-parallel work and charges its actual word count
/// instead of the pair count.
struct GrowthBudget {
    std::int64_t max_result_size = 10'000'000;
    std::int64_t max_pair_evaluations = 1'000'000'000;

    void validate() const {
        if (max_result_size <= 0 || max_pair_evaluations <= 0)
            raise(errc::invalid_argument, "growth budget fields must be positive");
    }
};

/// Running meter for a single operation (folds included).
class BudgetMeter {
public:
    explicit BudgetMeter(const GrowthBudget& b) : budget_(b) { b.validate(); }

    void charge_pairs(std::int64_t n) {
        pairs_ += n;
        if (pairs_ > budget_.max_pair_evaluations)
            raise(errc::budget_exceeded, "pair evaluation budget exhausted");
    }
    void will_evaluate_pairs(std::int64_t n) const {
        if (pairs_ + n > budget_.max_pair_evaluations)
            raise(errc::budget_exceeded, "pair evaluation budget would be exhausted");
    }
    void check_result_size(std::int64_t n) const {
        if (n > budget_.max_result_size)
            raise(errc::budget_exceeded, "result size budget exceeded");
    }
    std::int64_t max_result_size() const { return budget_.max_result_size; }
    std::int64_t pairs_used() const { return pairs_; }

private:
    GrowthBudget budget_;
    std::int64_t pairs_ = 0;
};

} // namespace growthlab
