#include "semrheo/synthetic.hpp"

#include <cmath>

#include "semrheo/errors.hpp"
#include "semrheo/rng.hpp"

namespace semrheo::synthetic {

std::string_view to_string(Kind k) noexcept
{
    switch (k) {
    case Kind::brownian: return "brownian";
    case Kind::ballistic: return "ballistic";
    case Kind::ou_confined: return "ou_confined";
    case Kind::levy: return "levy";
    }
    return "unknown";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Matrix = Trajectory::Matrix;

Matrix brownian(const Spec& spec, const Brownian& p, Rng& rng)
{
    const auto dims = static_cast<Eigen::Index>(spec.dims);
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(spec.steps + 1), dims);
    for (Eigen::Index t = 1; t < x.rows(); ++t) {
        for (Eigen::Index d = 0; d < dims; ++d) {
            x(t, d) = x(t - 1, d) + p.step_std * rng.normal();
        }
    }
    return x;
}

Matrix ballistic(const Spec& spec, const Ballistic& p)
{
    Matrix x(static_cast<Eigen::Index>(spec.steps + 1), static_cast<Eigen::Index>(spec.dims));
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        x.row(t) = static_cast<double>(t) * p.velocity.transpose();
    }
    return x;
}

Matrix ou_confined(const Spec& spec, const OuConfined& p, Rng& rng)
{
    const auto dims = static_cast<Eigen::Index>(spec.dims);
    Matrix x(static_cast<Eigen::Index>(spec.steps + 1), dims);
    const double decay = std::exp(-p.reversion_rate);
    const double kick = p.stationary_std * std::sqrt(-std::expm1(-2.0 * p.reversion_rate));
    for (Eigen::Index d = 0; d < dims; ++d) {
        x(0, d) = p.stationary_std * rng.normal();
    }
    for (Eigen::Index t = 1; t < x.rows(); ++t) {
        for (Eigen::Index d = 0; d < dims; ++d) {
            x(t, d) = x(t - 1, d) * decay + kick * rng.normal();
        }
    }
    return x;
}

Matrix levy(const Spec& spec, const Levy& p, Rng& rng)
{
    const auto dims = static_cast<Eigen::Index>(spec.dims);
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(spec.steps + 1), dims);
    Eigen::VectorXd dir(dims);
    for (Eigen::Index t = 1; t < x.rows(); ++t) {
        const double length = p.min_step * std::pow(rng.uniform_open_closed(), -1.0 / p.tail_exponent);
        if (dims == 1) {
            dir[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        } else {
            double norm = 0.0;
            do {
                for (Eigen::Index d = 0; d < dims; ++d) {
                    dir[d] = rng.normal();
                }
                norm = dir.norm();
            } while (norm == 0.0);
            dir /= norm;
        }
        x.row(t) = x.row(t - 1) + length * dir.transpose();
    }
    return x;
}

} // namespace

void validate(const Spec& spec)
{
    if (spec.dims < 1) {
        throw InvalidArgument("dims must be >= 1");
    }
    if (spec.steps < 2) {
        throw InvalidArgument("steps must be >= 2");
    }
    std::visit(overloaded{
                   [](const Brownian& p) {
                       if (!(p.step_std >= 0.0) || !std::isfinite(p.step_std)) {
                           throw InvalidArgument("brownian step_std must be finite and >= 0");
                       }
                   },
                   [&](const Ballistic& p) {
                       if (static_cast<std::size_t>(p.velocity.size()) != spec.dims) {
                           throw InvalidArgument("ballistic velocity must have `dims` components");
                       }
                       if (!p.velocity.allFinite()) {
                           throw InvalidArgument("ballistic velocity must be finite");
                       }
                   },
                   [](const OuConfined& p) {
                       if (!(p.reversion_rate > 0.0) || !std::isfinite(p.reversion_rate)) {
                           throw InvalidArgument("OU reversion rate must be > 0");
                       }
                       if (!(p.stationary_std > 0.0) || !std::isfinite(p.stationary_std)) {
                           throw InvalidArgument("OU stationary std must be > 0");
                       }
                   },
                   [](const Levy& p) {
                       if (!(p.tail_exponent > 0.0 && p.tail_exponent <= 3.0)) {
                           throw InvalidArgument("levy tail exponent must be in (0, 3]");
                       }
                       if (!(p.min_step > 0.0) || !std::isfinite(p.min_step)) {
                           throw InvalidArgument("levy min_step must be > 0");
                       }
                   },
               },
               spec.params);
}

Trajectory generate(const Spec& spec)
{
    validate(spec);
    Rng rng(spec.seed);
    Matrix points = std::visit(overloaded{
                                   [&](const Brownian& p) { return brownian(spec, p, rng); },
                                   [&](const Ballistic& p) { return ballistic(spec, p); },
                                   [&](const OuConfined& p) { return ou_confined(spec, p, rng); },
                                   [&](const Levy& p) { return levy(spec, p, rng); },
                               },
                               spec.params);
    return Trajectory(std::move(points), Provenance::synthetic);
}

std::vector<double> expected_msd(const Spec& spec, std::span<const std::size_t> delays)
{
    validate(spec);
    if (spec.kind() == Kind::levy) {
        throw UnsupportedError("levy flights have no finite-variance MSD closed form");
    }
    const auto dims = static_cast<double>(spec.dims);
    std::vector<double> out;
    out.reserve(delays.size());
    for (std::size_t delay : delays) {
        const auto lag = static_cast<double>(delay);
        out.push_back(std::visit(
            overloaded{
                [&](const Brownian& p) { return dims * p.step_std * p.step_std * lag; },
                [&](const Ballistic& p) { return p.velocity.squaredNorm() * lag * lag; },
                [&](const OuConfined& p) {
                    return -2.0 * dims * p.stationary_std * p.stationary_std
                         * std::expm1(-p.reversion_rate * lag);
                },
                [](const Levy&) { return 0.0; },
            },
            spec.params));
    }
    return out;
}

} // namespace semrheo::synthetic
