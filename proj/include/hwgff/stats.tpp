// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

namespace hwgff {

template <class F>
Estimate jackknife(BatchMeans const& bm, F&& statistic)
{
    std::size_t const nb = bm.n_batches();
    std::size_t const nq = bm.n_quantities();
    std::vector<double> full(nq, 0.0);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t q = 0; q < nq; ++q)
            full[q] += bm.batch_mean(b, q) / static_cast<double>(nb);
    double const theta = statistic(std::span<double const>(full));

    std::vector<double> loo(nq);
    std::vector<double> partial(nb);
    for (std::size_t b = 0; b < nb; ++b)
    {
        for (std::size_t q = 0; q < nq; ++q)
        {
            loo[q] = (full[q] * static_cast<double>(nb) - bm.batch_mean(b, q))
                     / static_cast<double>(nb - 1);
        }
        partial[b] = statistic(std::span<double const>(loo));
    }
    double mean_partial = 0.0;
    for (double v : partial)
        mean_partial += v / static_cast<double>(nb);
    double var = 0.0;
    for (double v : partial)
        var += (v - mean_partial) * (v - mean_partial);
    var *= static_cast<double>(nb - 1) / static_cast<double>(nb);
    return {theta, std::sqrt(var), bm.samples()};
}

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf)
{
    std::sort(samples.begin(), samples.end());
    double const n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        double const f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return {d, kolmogorov_pvalue(d, samples.size())};
}

}  // namespace hwgff
