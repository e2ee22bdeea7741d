// Seeded sample generation for verification sweeps.
#pragma once

#include "spaceform.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace shrinklab {

inline constexpr std::uint64_t default_seed = 42;

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed = default_seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    Vec unit_vector(int dim) {
        Vec v(dim);
        do {
            for (int i = 0; i < dim; ++i) v(i) = normal();
        } while (v.norm() < 1e-12);
        return v.normalized();
    }

    /// Uniform in the Euclidean ball of the given radius.
    Vec in_ball(int dim, double radius) {
        const double t = radius * std::pow(uniform(0.0, 1.0), 1.0 / dim);
        return t * unit_vector(dim);
    }

    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
};

/// Radius of the sampling ball for a chart: 0.8 of the hyperbolic chart,
/// 2.0 for the unbounded charts.
inline double sampling_radius(Curvature k) { return k == Curvature::hyperbolic ? 0.8 : 2.0; }

} // namespace shrinklab
