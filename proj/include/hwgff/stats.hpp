// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hwgff/rng.hpp"

namespace hwgff {

/// Scalar Monte Carlo statistic: value, standard error, sample count.
struct Estimate
{
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// |a - b| <= k * sqrt(se_a^2 + se_b^2), treating the two as independent.
bool within_joint_se(Estimate const& a, Estimate const& b, double k);

/// True if a.value - b.value exceeds k joint standard errors.
bool exceeds_by_joint_se(Estimate const& a, Estimate const& b, double k);

//---------------------------------------------------------------------------//
// Standard normal distribution
//---------------------------------------------------------------------------//
double normal_pdf(double z);
double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
/// log(1 - Phi(z)), finite for every real z.
double log_normal_sf(double z);
/// log Phi(z).
double log_normal_cdf(double z);
/// Inverse of Phi on (0, 1).
double normal_quantile(double p);
/// phi(t) / Phi(t), stable for very negative t.
double inverse_mills_lower(double t);

double standard_normal(Philox4x32& rng);

/// Draw from N(mean, sd^2) conditioned on [lower, infinity).
///
/// Inverse-CDF on the survival function; when the bound sits more than
/// eight standard deviations above the mean the survival quantile is solved
/// by Newton iteration on the log-tail expansion.
double truncated_normal_above(Philox4x32& rng, double mean, double sd, double lower);

/// CDF of N(mean, sd^2) conditioned on [lower, infinity).
double truncated_normal_above_cdf(double x, double mean, double sd, double lower);

//---------------------------------------------------------------------------//
// Sample statistics
//---------------------------------------------------------------------------//
class RunningStats
{
  public:
    void add(double x);
    void merge(RunningStats const& other);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // unbiased
    double sem() const;
    Estimate estimate() const { return {mean(), sem(), n_}; }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Batch-means accumulator for a fixed vector of quantities.
///
/// Samples are assigned to `n_batches` consecutive batches of equal size;
/// standard errors come from the spread of batch means.
class BatchMeans
{
  public:
    BatchMeans() = default;
    BatchMeans(std::size_t n_quantities, std::size_t n_batches, std::size_t batch_size);

    /// Add one sample of every quantity. Samples beyond the last full batch
    /// are ignored.
    void add(std::span<double const> values);
    std::size_t n_quantities() const { return n_q_; }
    std::size_t n_batches() const { return n_b_; }
    std::size_t batch_size() const { return batch_size_; }
    std::size_t samples() const { return filled_ * batch_size_; }
    bool complete() const { return filled_ == n_b_; }

    double batch_mean(std::size_t batch, std::size_t q) const
    {
        return sums_[batch * n_q_ + q] / static_cast<double>(batch_size_);
    }
    Estimate estimate(std::size_t q) const;
    /// Estimate of mean(q1) - mean(q2) with the batch-level correlation.
    Estimate difference(std::size_t q1, std::size_t q2) const;

  private:
    std::size_t n_q_ = 0;
    std::size_t n_b_ = 0;
    std::size_t batch_size_ = 0;
    std::size_t filled_ = 0;
    std::size_t in_batch_ = 0;
    std::vector<double> sums_;
};

/// Jackknife over batches of a statistic f(batch means of selected quantities).
template <class F>
Estimate jackknife(BatchMeans const& bm, F&& statistic);

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF and
/// its asymptotic p-value.
struct KsResult
{
    double statistic = 0.0;
    double p_value = 0.0;
};
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf);
double kolmogorov_pvalue(double statistic, std::size_t n);

/// Geweke-style comparison of the first and last thirds of a trace.
struct ConvergenceGate
{
    double z = 0.0;
    bool passed = true;
};
ConvergenceGate geweke_gate(std::span<double const> trace, double level = 0.01);

}  // namespace hwgff

#include "hwgff/stats.tpp"
