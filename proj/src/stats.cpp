#include "adelic/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <numeric>
#include <stdexcept>

namespace adelic {

ChiSquareResult chi_square_gof(const std::vector<double>& probabilities, const std::vector<std::uint64_t>& counts,
                               double min_expected) {
    if (probabilities.size() != counts.size() || probabilities.empty()) {
        throw std::invalid_argument("probabilities and counts must have equal, non-zero length");
    }
    const double total_p = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    if (!(total_p > 0) || n == 0) throw std::invalid_argument("empty distribution or sample");

    std::vector<double> expected, observed;
    double e = 0, o = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        e += n * probabilities[i] / total_p;
        o += static_cast<double>(counts[i]);
        if (e >= min_expected) {
            expected.push_back(e);
            observed.push_back(o);
            e = o = 0;
        }
    }
    if (e > 0 || o > 0) {
        if (expected.empty()) {
            expected.push_back(e);
            observed.push_back(o);
        } else {
            expected.back() += e;
            observed.back() += o;
        }
    }
    ChiSquareResult r;
    r.bins = static_cast<int>(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double d = observed[i] - expected[i];
        r.statistic += d * d / expected[i];
    }
    r.dof = r.bins - 1;
    r.p_value = r.dof > 0 ? boost::math::gamma_q(r.dof / 2.0, r.statistic / 2.0) : 1.0;
    return r;
}

}  // namespace adelic
