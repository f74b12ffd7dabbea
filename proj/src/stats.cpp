#include "lottery/stats.hpp"

#include <cmath>

#include "lottery/error.hpp"

namespace lottery {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-14;
constexpr double kTiny = 1e-300;

// Lower regularized gamma by series, for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  require(a > 0 && x >= 0, Err::Domain, "gamma Q needs a > 0, x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, int df) {
  require(df >= 1, Err::Domain, "chi-square needs at least one degree of freedom");
  require(stat >= 0, Err::Domain, "chi-square statistic must be nonnegative");
  return regularized_gamma_q(0.5 * df, 0.5 * stat);
}

double chi_square_stat(const std::vector<long long>& counts, const std::vector<double>& probs,
                       long long total) {
  require(counts.size() == probs.size(), Err::Config, "counts and probabilities must align");
  require(total > 0, Err::Config, "need a positive total");
  double stat = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double expect = probs[i] * double(total);
    require(expect > 0, Err::Config, "every cell needs positive expectation");
    double diff = double(counts[i]) - expect;
    stat += diff * diff / expect;
  }
  return stat;
}

double poisson_tail_exact(double lambda, int x) {
  require(lambda >= 0, Err::Domain, "rate must be nonnegative");
  require(x >= 0, Err::Domain, "tail point must be nonnegative");
  if (x == 0) return 1.0;
  // P(X >= x) = 1 - sum_{j < x} e^-l l^j / j!
  double term = std::exp(-lambda);
  double cdf = term;
  for (int j = 1; j < x; ++j) {
    term *= lambda / double(j);
    cdf += term;
  }
  return std::max(0.0, 1.0 - cdf);
}

}  // namespace lottery
