#pragma once

#include <functional>
#include <span>
#include <vector>

#include "corelay/channel.hpp"
#include "corelay/distance_law.hpp"

namespace corelay {

// One integration variable of an expectation: either a point mass or a
// distribution described by its quantile function. Integration runs in
// quantile space, E[g(X)] = int_0^1 g(Q(u)) du, which collapses a point mass
// exactly and handles unbounded supports without truncation.
struct MarginalLaw {
    std::function<double(double)> quantile;
    bool is_degenerate = false;
    double fixed_value = 0.0;

    static MarginalLaw fixed(double value) {
        return {nullptr, true, value};
    }
    static MarginalLaw rayleigh_power() {
        return {[](double u) { return RayleighPowerFading::quantile(u); }, false, 0.0};
    }
    static MarginalLaw distance(const DistanceLaw& law) {
        if (law.degenerate()) return fixed(law.d);
        return {[law](double u) { return law.quantile(u); }, false, 0.0};
    }
};

// Expectation of fn over the product of the given marginals, by nested
// adaptive quadrature with relative tolerance tol per level. fn receives one
// realization per law, in order.
double expect(const std::function<double(std::span<const double>)>& fn,
              std::span<const MarginalLaw> laws, double tol = 1e-6);

}  // namespace corelay
