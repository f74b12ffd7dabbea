#pragma once

#include <vector>

namespace lottery {

// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

// Upper tail p-value of a chi-square statistic with df degrees of freedom.
double chi_square_pvalue(double stat, int df);

// Pearson statistic for observed counts against cell probabilities.
double chi_square_stat(const std::vector<long long>& counts, const std::vector<double>& probs,
                       long long total);

// P(X >= x) for X ~ Poisson(lambda), by direct series.
double poisson_tail_exact(double lambda, int x);

}  // namespace lottery
