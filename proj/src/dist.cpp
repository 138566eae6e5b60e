#include "alignppl/dist.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "alignppl/value.hpp"

namespace alignppl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw DistError(msg);
}

double requireNumeric(const Value& v, const char* what) {
  if (!v.isNumeric()) throw DistError(std::string(what) + ": expected a numeric value");
  return v.asReal();
}

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9. One uniform per draw keeps streams replayable.
double normalQuantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) {
    double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double sampleStdNormal(Rng& rng) { return normalQuantile(rng.nextDouble()); }

// Marsaglia-Tsang for shape >= 1; boost by U^(1/shape) below 1.
double sampleGamma(double shape, double scale, Rng& rng) {
  if (shape < 1.0) {
    double u = rng.nextDouble();
    while (u <= 0.0) u = rng.nextDouble();
    return sampleGamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = sampleStdNormal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.nextDouble();
    if (u <= 0.0) continue;
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
  }
}

// CDF inversion; rates above ~500 are split using Poisson additivity so the
// e^-rate seed never underflows.
int64_t samplePoisson(double rate, Rng& rng) {
  int64_t total = 0;
  while (rate > 500.0) {
    total += samplePoisson(500.0, rng);
    rate -= 500.0;
  }
  double u = rng.nextDouble();
  double p = std::exp(-rate);
  double cdf = p;
  int64_t k = 0;
  while (u > cdf && k < 200000) {
    ++k;
    p *= rate / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

double logBeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

Distribution makeBernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "Bernoulli: p must be in [0,1]");
  return Distribution{DistKind::Bernoulli, p, 0.0, {}};
}

Distribution makeBeta(double a, double b) {
  require(a > 0.0 && b > 0.0, "Beta: parameters must be positive");
  return Distribution{DistKind::Beta, a, b, {}};
}

Distribution makeGamma(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, "Gamma: shape and scale must be positive");
  return Distribution{DistKind::Gamma, shape, scale, {}};
}

Distribution makeExponential(double rate) {
  require(rate > 0.0, "Exponential: rate must be positive");
  return Distribution{DistKind::Exponential, rate, 0.0, {}};
}

Distribution makePoisson(double rate) {
  require(rate > 0.0, "Poisson: rate must be positive");
  return Distribution{DistKind::Poisson, rate, 0.0, {}};
}

Distribution makeNormal(double mean, double stdev) {
  require(stdev > 0.0, "Normal: stdev must be positive");
  require(std::isfinite(mean), "Normal: mean must be finite");
  return Distribution{DistKind::Normal, mean, stdev, {}};
}

Distribution makeUniform(double lo, double hi) {
  require(hi > lo, "Uniform: hi must exceed lo");
  return Distribution{DistKind::Uniform, lo, hi, {}};
}

Distribution makeDirichlet(std::vector<double> alpha) {
  require(alpha.size() >= 2, "Dirichlet: needs at least two concentrations");
  for (double a : alpha) require(a > 0.0, "Dirichlet: concentrations must be positive");
  return Distribution{DistKind::Dirichlet, 0.0, 0.0, std::move(alpha)};
}

Distribution makeCategorical(std::vector<double> weights) {
  require(weights.size() >= 1, "Categorical: needs at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "Categorical: weights must be nonnegative");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "Categorical: weights must sum to 1");
  return Distribution{DistKind::Categorical, 0.0, 0.0, std::move(weights)};
}

std::string distToString(const Distribution& d) {
  std::ostringstream os;
  os.precision(15);
  switch (d.kind) {
    case DistKind::Bernoulli: os << "Bernoulli(" << d.a << ")"; break;
    case DistKind::Beta: os << "Beta(" << d.a << ", " << d.b << ")"; break;
    case DistKind::Gamma: os << "Gamma(" << d.a << ", " << d.b << ")"; break;
    case DistKind::Exponential: os << "Exponential(" << d.a << ")"; break;
    case DistKind::Poisson: os << "Poisson(" << d.a << ")"; break;
    case DistKind::Normal: os << "Normal(" << d.a << ", " << d.b << ")"; break;
    case DistKind::Uniform: os << "Uniform(" << d.a << ", " << d.b << ")"; break;
    case DistKind::Dirichlet: {
      os << "Dirichlet(";
      for (size_t k = 0; k < d.vec.size(); ++k) os << (k ? ", " : "") << d.vec[k];
      os << ")";
      break;
    }
    case DistKind::Categorical: {
      os << "Categorical(";
      for (size_t k = 0; k < d.vec.size(); ++k) os << (k ? ", " : "") << d.vec[k];
      os << ")";
      break;
    }
  }
  return os.str();
}

double logDensity(const Distribution& d, const Value& v) {
  switch (d.kind) {
    case DistKind::Bernoulli: {
      if (v.kind != Value::Kind::Bool) throw DistError("Bernoulli: expected a boolean value");
      double p = v.s.b ? d.a : 1.0 - d.a;
      return p > 0.0 ? std::log(p) : kNegInf;
    }
    case DistKind::Beta: {
      double x = requireNumeric(v, "Beta");
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return (d.a - 1.0) * std::log(x) + (d.b - 1.0) * std::log1p(-x) - logBeta(d.a, d.b);
    }
    case DistKind::Gamma: {
      double x = requireNumeric(v, "Gamma");
      if (x <= 0.0) return kNegInf;
      return (d.a - 1.0) * std::log(x) - x / d.b - std::lgamma(d.a) - d.a * std::log(d.b);
    }
    case DistKind::Exponential: {
      double x = requireNumeric(v, "Exponential");
      if (x < 0.0) return kNegInf;
      return std::log(d.a) - d.a * x;
    }
    case DistKind::Poisson: {
      if (v.kind != Value::Kind::Int) throw DistError("Poisson: expected an integer value");
      int64_t k = v.s.i;
      if (k < 0) return kNegInf;
      return static_cast<double>(k) * std::log(d.a) - d.a - std::lgamma(static_cast<double>(k) + 1.0);
    }
    case DistKind::Normal: {
      double x = requireNumeric(v, "Normal");
      double z = (x - d.a) / d.b;
      return -0.5 * z * z - std::log(d.b) - 0.5 * std::log(2.0 * M_PI);
    }
    case DistKind::Uniform: {
      double x = requireNumeric(v, "Uniform");
      if (x < d.a || x >= d.b) return kNegInf;
      return -std::log(d.b - d.a);
    }
    case DistKind::Dirichlet: {
      if (v.kind != Value::Kind::Seq) throw DistError("Dirichlet: expected a sequence value");
      const auto& xs = asSeq(v).elems;
      if (xs.size() != d.vec.size()) return kNegInf;
      double sum = 0.0, lp = 0.0, alphaSum = 0.0;
      for (size_t k = 0; k < xs.size(); ++k) {
        double x = requireNumeric(xs[k], "Dirichlet");
        if (x <= 0.0) return kNegInf;
        sum += x;
        lp += (d.vec[k] - 1.0) * std::log(x);
        alphaSum += d.vec[k];
        lp -= std::lgamma(d.vec[k]);
      }
      if (std::abs(sum - 1.0) > 1e-9) return kNegInf;
      return lp + std::lgamma(alphaSum);
    }
    case DistKind::Categorical: {
      if (v.kind != Value::Kind::Int) throw DistError("Categorical: expected an integer value");
      int64_t k = v.s.i;
      if (k < 0 || k >= static_cast<int64_t>(d.vec.size())) return kNegInf;
      double w = d.vec[static_cast<size_t>(k)];
      return w > 0.0 ? std::log(w) : kNegInf;
    }
  }
  return kNegInf;
}

Value sample(const Distribution& d, Rng& rng) {
  switch (d.kind) {
    case DistKind::Bernoulli:
      return vBool(rng.nextDouble() < d.a);
    case DistKind::Beta: {
      double x = sampleGamma(d.a, 1.0, rng);
      double y = sampleGamma(d.b, 1.0, rng);
      return vReal(x / (x + y));
    }
    case DistKind::Gamma:
      return vReal(sampleGamma(d.a, d.b, rng));
    case DistKind::Exponential: {
      double u = rng.nextDouble();
      return vReal(-std::log1p(-u) / d.a);
    }
    case DistKind::Poisson:
      return vInt(samplePoisson(d.a, rng));
    case DistKind::Normal:
      return vReal(d.a + d.b * sampleStdNormal(rng));
    case DistKind::Uniform:
      return vReal(d.a + (d.b - d.a) * rng.nextDouble());
    case DistKind::Dirichlet: {
      std::vector<Value> out;
      out.reserve(d.vec.size());
      double sum = 0.0;
      std::vector<double> g(d.vec.size());
      for (size_t k = 0; k < d.vec.size(); ++k) {
        g[k] = sampleGamma(d.vec[k], 1.0, rng);
        sum += g[k];
      }
      for (double x : g) out.push_back(vReal(x / sum));
      return vSeq(std::move(out));
    }
    case DistKind::Categorical: {
      double u = rng.nextDouble();
      double cdf = 0.0;
      for (size_t k = 0; k < d.vec.size(); ++k) {
        cdf += d.vec[k];
        if (u < cdf) return vInt(static_cast<int64_t>(k));
      }
      return vInt(static_cast<int64_t>(d.vec.size()) - 1);
    }
  }
  return vUnit();
}

std::optional<std::vector<Value>> finiteSupport(const Distribution& d) {
  switch (d.kind) {
    case DistKind::Bernoulli:
      return std::vector<Value>{vBool(true), vBool(false)};
    case DistKind::Categorical: {
      std::vector<Value> out;
      for (size_t k = 0; k < d.vec.size(); ++k) out.push_back(vInt(static_cast<int64_t>(k)));
      return out;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace alignppl
