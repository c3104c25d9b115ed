#include "corelay/expectation.hpp"

#include "corelay/quadrature.hpp"

namespace corelay {

namespace {

double expect_level(const std::function<double(std::span<const double>)>& fn,
                    std::span<const MarginalLaw> laws, std::vector<double>& point,
                    std::size_t level, double tol) {
    if (level == laws.size()) {
        return fn(point);
    }
    const MarginalLaw& law = laws[level];
    if (law.is_degenerate) {
        point[level] = law.fixed_value;
        return expect_level(fn, laws, point, level + 1, tol);
    }
    return integrate(
        [&](double u) {
            point[level] = law.quantile(u);
            return expect_level(fn, laws, point, level + 1, tol);
        },
        0.0, 1.0, tol);
}

}  // namespace

double expect(const std::function<double(std::span<const double>)>& fn,
              std::span<const MarginalLaw> laws, double tol) {
    std::vector<double> point(laws.size(), 0.0);
    return expect_level(fn, laws, point, 0, tol);
}

}  // namespace corelay
