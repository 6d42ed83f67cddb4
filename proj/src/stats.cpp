// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hwgff {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Asymptotic series for (1 - Phi(z)) * z / phi(z), z large.
double tail_series(double z)
{
    double const r = 1.0 / (z * z);
    return 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
}
}  // namespace

bool within_joint_se(Estimate const& a, Estimate const& b, double k)
{
    return std::abs(a.value - b.value) <= k * std::hypot(a.se, b.se);
}

bool exceeds_by_joint_se(Estimate const& a, Estimate const& b, double k)
{
    return a.value - b.value > k * std::hypot(a.se, b.se);
}

double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z - kLogSqrt2Pi);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

double normal_sf(double z)
{
    return 0.5 * std::erfc(z * kInvSqrt2);
}

double log_normal_sf(double z)
{
    if (z < 30.0)
        return std::log(normal_sf(z));
    return -0.5 * z * z - kLogSqrt2Pi - std::log(z) + std::log(tail_series(z));
}

double log_normal_cdf(double z)
{
    return log_normal_sf(-z);
}

double inverse_mills_lower(double t)
{
    if (t > -30.0)
        return normal_pdf(t) / normal_cdf(t);
    double const a = -t;
    return a / tail_series(a);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");

    // Rational approximation (Acklam), refined by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    double x;
    if (p < plow)
    {
        double const q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    else if (p <= 1.0 - plow)
    {
        double const q = p - 0.5;
        double const r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    else
    {
        double const q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Refine against whichever tail carries the precision.
    double e;
    if (p < 0.5)
        e = normal_cdf(x) - p;
    else
        e = (1.0 - p) - normal_sf(x);
    double const u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double standard_normal(Philox4x32& rng)
{
    return normal_quantile(rng.uniform());
}

double truncated_normal_above(Philox4x32& rng, double mean, double sd, double lower)
{
    double const a = (lower - mean) / sd;
    double const u = rng.uniform();
    double z;
    if (a < 8.0)
    {
        z = -normal_quantile(u * normal_sf(a));
    }
    else
    {
        // Solve log sf(z) = log u + log sf(a) starting from the exponential
        // tail approximation.
        double const target = std::log(u) + log_normal_sf(a);
        z = std::sqrt(a * a - 2.0 * std::log(u));
        for (int it = 0; it < 20; ++it)
        {
            double const lsf = log_normal_sf(z);
            double const hazard = std::exp(-0.5 * z * z - kLogSqrt2Pi - lsf);
            double const step = (lsf - target) / hazard;
            z += step;
            if (std::abs(step) <= 1e-15 * z)
                break;
        }
    }
    if (z < a)
        z = a;
    double x = mean + sd * z;
    return x < lower ? lower : x;
}

double truncated_normal_above_cdf(double x, double mean, double sd, double lower)
{
    if (x <= lower)
        return 0.0;
    double const a = (lower - mean) / sd;
    double const z = (x - mean) / sd;
    return -std::expm1(log_normal_sf(z) - log_normal_sf(a));
}

//---------------------------------------------------------------------------//
void RunningStats::add(double x)
{
    ++n_;
    double const delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(RunningStats const& other)
{
    if (other.n_ == 0)
        return;
    if (n_ == 0)
    {
        *this = other;
        return;
    }
    double const n = static_cast<double>(n_ + other.n_);
    double const delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.n_) / n;
    m2_ += other.m2_
           + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_)
                 / n;
    n_ += other.n_;
}

double RunningStats::variance() const
{
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::sem() const
{
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

//---------------------------------------------------------------------------//
BatchMeans::BatchMeans(std::size_t n_quantities,
                       std::size_t n_batches,
                       std::size_t batch_size)
    : n_q_(n_quantities)
    , n_b_(n_batches)
    , batch_size_(batch_size)
    , sums_(n_quantities * n_batches, 0.0)
{
    if (n_batches < 2 || batch_size < 1)
        throw std::invalid_argument("BatchMeans: need >= 2 batches of >= 1 sample");
}

void BatchMeans::add(std::span<double const> values)
{
    if (filled_ >= n_b_)
        return;
    double* row = sums_.data() + filled_ * n_q_;
    for (std::size_t q = 0; q < n_q_; ++q)
        row[q] += values[q];
    if (++in_batch_ == batch_size_)
    {
        in_batch_ = 0;
        ++filled_;
    }
}

Estimate BatchMeans::estimate(std::size_t q) const
{
    RunningStats rs;
    for (std::size_t b = 0; b < filled_; ++b)
        rs.add(batch_mean(b, q));
    return {rs.mean(), rs.sem(), samples()};
}

Estimate BatchMeans::difference(std::size_t q1, std::size_t q2) const
{
    RunningStats rs;
    for (std::size_t b = 0; b < filled_; ++b)
        rs.add(batch_mean(b, q1) - batch_mean(b, q2));
    return {rs.mean(), rs.sem(), samples()};
}

double kolmogorov_pvalue(double statistic, std::size_t n)
{
    double const sn = std::sqrt(static_cast<double>(n));
    double const lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 1e-3)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k)
    {
        double const term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16)
            break;
    }
    double const p = 2.0 * sum;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

ConvergenceGate geweke_gate(std::span<double const> trace, double level)
{
    std::size_t const third = trace.size() / 3;
    if (third < 10)
        return {0.0, true};
    auto segment = [&](std::size_t begin) {
        std::size_t const nb = 10;
        std::size_t const bs = third / nb;
        RunningStats rs;
        for (std::size_t b = 0; b < nb; ++b)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < bs; ++i)
                s += trace[begin + b * bs + i];
            rs.add(s / static_cast<double>(bs));
        }
        return rs.estimate();
    };
    Estimate const first = segment(0);
    Estimate const last = segment(trace.size() - third);
    double const denom = std::hypot(first.se, last.se);
    double const z = denom > 0.0 ? (first.value - last.value) / denom : 0.0;
    double const crit = normal_quantile(1.0 - level / 2.0);
    return {z, std::abs(z) < crit};
}

}  // namespace hwgff
