// Statistical oracles for sampler tests: analytic CDFs, a KS statistic, and
// simple quadrature. Independent of the library's samplers.
#ifndef ALIGNPPL_TESTS_STATS_HPP
#define ALIGNPPL_TESTS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace alignppl::testing {

inline double normalCdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// regularized lower incomplete gamma P(a, x): series + continued fraction
inline double gammaP(double a, double x) {
  if (x <= 0.0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// regularized incomplete beta I_x(a, b) via Lentz continued fraction
inline double betaInc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  auto cf = [](double a2, double b2, double x2) {
    double qab = a2 + b2, qap = a2 + 1.0, qam = a2 - 1.0;
    double c = 1.0, d = 1.0 - qab * x2 / qap;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
      int m2 = 2 * m;
      double aa = m * (b2 - m) * x2 / ((qam + m2) * (a2 + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < 1e-300) d = 1e-300;
      c = 1.0 + aa / c;
      if (std::fabs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a2 + m) * (qab + m) * x2 / ((a2 + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < 1e-300) d = 1e-300;
      c = 1.0 + aa / c;
      if (std::fabs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return h;
  };
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * cf(a, b, x) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) * cf(b, a, 1.0 - x) / b;
}

inline double gammaCdf(double x, double shape, double scale) {
  return gammaP(shape, x / scale);
}

inline double ksStatistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// two-sided asymptotic critical value at level alpha
inline double ksCritical(size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

inline double simpson(const std::function<double(double)>& f, double lo, double hi, int steps) {
  double h = (hi - lo) / steps;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) {
    acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace alignppl::testing

#endif
