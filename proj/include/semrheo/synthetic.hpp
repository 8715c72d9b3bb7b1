#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "semrheo/trajectory.hpp"

namespace semrheo {

/// Reference diffusion processes with known MSD laws.
namespace synthetic {

struct Brownian {
    double step_std = 1.0;  // per axis
};

struct Ballistic {
    Eigen::VectorXd velocity;
};

/// Ornstein-Uhlenbeck process confined around the origin.
struct OuConfined {
    double reversion_rate = 0.05;  // theta, per step
    double stationary_std = 1.0;   // sigma, per axis
};

/// Pareto step lengths (density ~ x^-(mu+1) for x >= min_step) in uniformly
/// random directions.
struct Levy {
    double tail_exponent = 1.5;  // mu in (0, 3]
    double min_step = 1.0;
};

enum class Kind { brownian, ballistic, ou_confined, levy };

std::string_view to_string(Kind k) noexcept;

struct Spec {
    std::size_t dims = 1;
    std::size_t steps = 2;
    std::uint64_t seed = 0;
    std::variant<Brownian, Ballistic, OuConfined, Levy> params = Brownian{};

    Kind kind() const noexcept { return static_cast<Kind>(params.index()); }
};

/// Throws InvalidArgument on a bad parameter set.
void validate(const Spec& spec);

/// steps + 1 points, deterministic in the seed. Random draws (all from one
/// Rng(seed)) in order:
///   brownian:    per step, `dims` normals
///   ballistic:   none (x_t = t v)
///   ou_confined: `dims` normals for x_0 ~ N(0, sigma^2), then per step `dims` normals
///                x_{t+1} = x_t e^{-theta} + sigma sqrt(1 - e^{-2 theta}) xi
///   levy:        per step one uniform for the length x_min U^{-1/mu}, then the
///                direction (`dims` normals, normalized; one uniform sign when dims == 1)
Trajectory generate(const Spec& spec);

/// Closed-form MSD: brownian dims sigma^2 delta, ballistic |v|^2 delta^2,
/// OU 2 dims sigma^2 (1 - e^{-theta delta}). Throws UnsupportedError for levy.
std::vector<double> expected_msd(const Spec& spec, std::span<const std::size_t> delays);

} // namespace synthetic

} // namespace semrheo
