#pragma once

#include <stdexcept>

#include "corelay/rng.hpp"

namespace corelay {

// Distance distribution of a node population from a receiver. Sampling,
// pdf/cdf and quantile are kept mutually consistent; the uniform laws are
// uniform over area, so the radial pdf is 2r/(r_max^2 - r_min^2).
struct DistanceLaw {
    enum class Kind { Fixed, UniformAnnulus, UniformDisc };

    Kind kind = Kind::Fixed;
    double d = 0.0;      // Fixed
    double r_min = 0.0;  // UniformAnnulus
    double r_max = 0.0;  // UniformAnnulus / UniformDisc

    static DistanceLaw fixed(double distance_m) {
        if (!(distance_m > 0)) throw std::invalid_argument("fixed distance must be > 0");
        DistanceLaw law;
        law.kind = Kind::Fixed;
        law.d = distance_m;
        return law;
    }

    static DistanceLaw annulus(double r_min_m, double r_max_m) {
        if (!(r_min_m > 0) || !(r_min_m <= r_max_m))
            throw std::invalid_argument("annulus requires 0 < r_min <= r_max");
        DistanceLaw law;
        law.kind = Kind::UniformAnnulus;
        law.r_min = r_min_m;
        law.r_max = r_max_m;
        return law;
    }

    static DistanceLaw disc(double r_max_m) {
        if (!(r_max_m > 0)) throw std::invalid_argument("disc requires r_max > 0");
        DistanceLaw law;
        law.kind = Kind::UniformDisc;
        law.r_max = r_max_m;
        return law;
    }

    bool degenerate() const { return kind == Kind::Fixed; }

    double lower() const {
        switch (kind) {
            case Kind::Fixed: return d;
            case Kind::UniformAnnulus: return r_min;
            case Kind::UniformDisc: return 0.0;
        }
        return 0.0;
    }

    double upper() const { return kind == Kind::Fixed ? d : r_max; }

    double pdf(double x) const {
        switch (kind) {
            case Kind::Fixed:
                throw std::logic_error("pdf undefined for a fixed distance");
            case Kind::UniformAnnulus:
                if (x < r_min || x > r_max) return 0.0;
                return 2.0 * x / (r_max * r_max - r_min * r_min);
            case Kind::UniformDisc:
                if (x < 0.0 || x > r_max) return 0.0;
                return 2.0 * x / (r_max * r_max);
        }
        return 0.0;
    }

    double cdf(double x) const {
        switch (kind) {
            case Kind::Fixed: return x >= d ? 1.0 : 0.0;
            case Kind::UniformAnnulus:
                if (x <= r_min) return 0.0;
                if (x >= r_max) return 1.0;
                return (x * x - r_min * r_min) / (r_max * r_max - r_min * r_min);
            case Kind::UniformDisc:
                if (x <= 0.0) return 0.0;
                if (x >= r_max) return 1.0;
                return x * x / (r_max * r_max);
        }
        return 0.0;
    }

    double quantile(double u) const {
        switch (kind) {
            case Kind::Fixed: return d;
            case Kind::UniformAnnulus:
                return std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
            case Kind::UniformDisc:
                return r_max * std::sqrt(u);
        }
        return d;
    }

    double sample(RngStream& rng) const {
        return kind == Kind::Fixed ? d : quantile(rng.uniform01());
    }

    bool operator==(const DistanceLaw&) const = default;
};

}  // namespace corelay
