#pragma once

#include <cstdint>
#include <vector>

namespace adelic {

struct ChiSquareResult {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    int bins = 0;
};

/// Pearson goodness of fit of counts against cell probabilities.  Cells are
/// merged left to right until each merged cell expects at least min_expected
/// observations; a short final group is folded into its predecessor.  The
/// probabilities are renormalized to sum to one first.
ChiSquareResult chi_square_gof(const std::vector<double>& probabilities, const std::vector<std::uint64_t>& counts,
                               double min_expected = 5.0);

}  // namespace adelic
