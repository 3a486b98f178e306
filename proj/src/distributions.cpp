// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/distributions.hpp"

#include <algorithm>
#include <numbers>

namespace edcal {

double gamma_fn(double x) {
    // Lanczos coefficients for g = 7.
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    if (x < 0.5) {
        // Reflection formula; x must not be a non-positive integer.
        const double s = std::sin(std::numbers::pi * x);
        if (s == 0.0) throw DomainError("gamma_fn: pole at non-positive integer");
        return std::numbers::pi / (s * gamma_fn(1.0 - x));
    }
    x -= 1.0;
    double a = c[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

std::pair<double, double> weibull_mean_std(const WeibullParams& p) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0))
        throw DomainError("weibull_mean_std: shape and scale must be positive");
    const double g1 = gamma_fn(1.0 + 1.0 / p.shape);
    const double g2 = gamma_fn(1.0 + 2.0 / p.shape);
    const double mean = p.scale * g1;
    const double var = std::max(0.0, g2 - g1 * g1);
    return {mean, p.scale * std::sqrt(var)};
}

std::size_t categorical_sample(std::span<const double> weights, RngStream& rng) {
    if (weights.empty()) throw DomainError("categorical_sample: empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("categorical_sample: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw DomainError("categorical_sample: weights sum to zero");
    const double u = rng.next_open01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

double RateTable::max_rate() const {
    double m = 0.0;
    for (const auto& day : rates)
        for (double r : day) {
            if (!(r >= 0.0)) throw DomainError("RateTable: negative rate");
            m = std::max(m, r);
        }
    return m;
}

std::vector<double> nhpp_arrivals(const RateTable& rates, int start_day, double horizon,
                                  RngStream& rng) {
    if (start_day < 0 || start_day > 6) throw DomainError("nhpp_arrivals: start_day in 0..6");
    if (!(horizon >= 0.0)) throw DomainError("nhpp_arrivals: negative horizon");
    const double lambda_star = rates.max_rate();
    std::vector<double> out;
    if (lambda_star == 0.0) return out;
    out.reserve(static_cast<std::size_t>(lambda_star * horizon * 0.8) + 16);
    double t = 0.0;
    while (true) {
        t += -std::log(rng.next_open01()) / lambda_star;
        if (t >= horizon) break;
        const double accept = rng.next_open01();
        if (accept * lambda_star <= rates.at(start_day, t)) out.push_back(t);
    }
    return out;
}

}  // namespace edcal
