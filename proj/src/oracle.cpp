#include "alignppl/oracle.hpp"

#include <cmath>

namespace alignppl {

std::vector<NameId> restrictSeq(const std::vector<NameId>& l, const std::set<NameId>& names) {
  std::vector<NameId> out;
  for (NameId n : l) {
    if (names.count(n)) out.push_back(n);
  }
  return out;
}

AlignmentReport checkAlignmentEmpirically(const ANFProgramPtr& prog,
                                          const std::set<NameId>& names, size_t runs,
                                          uint64_t seed, const std::string& programId) {
  AlignmentReport report;
  report.programId = programId;
  report.runs = runs;
  report.seed = seed;
  Rng base = Rng::fromSeed(seed);
  std::vector<NameId> reference;
  for (size_t i = 0; i < runs; ++i) {
    EvalOutcome out;
    try {
      out = evalSample(prog, base.child(kAlignmentCheckStream, i));
    } catch (const EvalError& e) {
      throw OracleError("run " + std::to_string(i) + " failed: " + e.what());
    }
    std::vector<NameId> restricted = restrictSeq(out.letSeq, names);
    if (i == 0) {
      reference = std::move(restricted);
      continue;
    }
    if (restricted != reference) {
      report.consistent = false;
      report.runA = 0;
      report.runB = i;
      report.restrictionA = reference;
      report.restrictionB = std::move(restricted);
      return report;
    }
  }
  return report;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Thrown when an enumeration run needs one more draw than the prefix holds.
// Deliberately not a std::runtime_error so it escapes the machine.
struct NeedDrawSignal {
  Distribution dist;
  double logPriorSoFar;
};

struct Enumerator {
  ANFProgramPtr prog;
  size_t maxTraceLen;
  bool allowTruncation;

  std::vector<double> flatLogMasses;
  std::map<std::string, std::vector<double>> perValueLogMasses;
  std::map<std::string, Value> reps;
  double truncatedPriorMass = 0.0;
  size_t pathCount = 0;

  // Runs the program replaying `prefix`; returns the terminal outcome or
  // throws NeedDrawSignal at the first un-prefixed assume.
  EvalOutcome runPrefix(const Trace& prefix) {
    struct Ctx {
      const Trace* prefix;
      size_t idx = 0;
      double logPrior = 0.0;
    } ctx{&prefix};
    Machine m(prog);
    m.setHookMode([&ctx](const Distribution& d, NameId, Machine& mach) -> Value {
      if (ctx.idx >= ctx.prefix->size()) {
        throw NeedDrawSignal{d, ctx.logPrior};
      }
      Value v = (*ctx.prefix)[ctx.idx++];
      double lp = logDensity(d, v);
      ctx.logPrior += lp;
      mach.addPriorLog(lp);
      return v;
    });
    m.run(SuspendSpec::none());
    if (m.status() != Machine::Status::Terminated) {
      throw OracleError("enumeration run failed: " + m.error());
    }
    EvalOutcome out;
    out.value = m.result();
    out.logPrior = m.totalLogPrior();
    out.logLikelihood = m.totalLogLikelihood();
    out.logWeight = out.logPrior + out.logLikelihood;
    return out;
  }

  // Returns the tree-route log normalizing constant of the subtree below
  // `prefix` (conditional on the prefix draws, prior-weighted below).
  double enumerate(Trace& prefix) {
    try {
      EvalOutcome out = runPrefix(prefix);
      ++pathCount;
      flatLogMasses.push_back(out.logWeight);
      std::string key = valueToString(out.value);
      perValueLogMasses[key].push_back(out.logWeight);
      reps.emplace(key, out.value);
      return out.logLikelihood;
    } catch (const NeedDrawSignal& sig) {
      auto support = finiteSupport(sig.dist);
      if (!support) {
        throw OracleError("enumeration requires finite support, found " + distToString(sig.dist));
      }
      if (prefix.size() >= maxTraceLen) {
        if (!allowTruncation) {
          throw OracleError("path exceeds maxTraceLen = " + std::to_string(maxTraceLen));
        }
        truncatedPriorMass += std::exp(sig.logPriorSoFar);
        return kNegInf;
      }
      std::vector<double> branchLogZ;
      for (const Value& v : *support) {
        double lp = logDensity(sig.dist, v);
        if (lp == kNegInf) continue;
        prefix.push_back(v);
        double sub = enumerate(prefix);
        prefix.pop_back();
        branchLogZ.push_back(lp + sub);
      }
      return logSumExp(branchLogZ);
    }
  }
};

}  // namespace

ExactPosterior enumeratePosterior(const ANFProgramPtr& prog, size_t maxTraceLen,
                                  bool allowTruncation) {
  Enumerator e{prog, maxTraceLen, allowTruncation, {}, {}, {}, 0.0, 0};
  Trace prefix;
  double logZTree = e.enumerate(prefix);

  ExactPosterior out;
  out.logZ = logSumExp(e.flatLogMasses);
  out.logZTree = logZTree;
  out.truncatedPriorMass = e.truncatedPriorMass;
  out.pathCount = e.pathCount;
  out.representatives = std::move(e.reps);
  if (out.logZ != kNegInf) {
    for (const auto& [key, masses] : e.perValueLogMasses) {
      out.probs[key] = std::exp(logSumExp(masses) - out.logZ);
    }
  }
  return out;
}

std::map<std::string, double> empiricalDistribution(const std::vector<WeightedSample>& samples) {
  std::map<std::string, double> out;
  if (samples.empty()) return out;
  double mx = kNegInf;
  for (const auto& s : samples) mx = std::max(mx, s.logWeight);
  if (mx == kNegInf) return out;
  double total = 0.0;
  for (const auto& s : samples) {
    double w = std::exp(s.logWeight - mx);
    out[valueToString(s.value)] += w;
    total += w;
  }
  for (auto& [k, v] : out) v /= total;
  return out;
}

double totalVariation(const std::map<std::string, double>& empirical,
                      const std::map<std::string, double>& exact) {
  double tv = 0.0;
  for (const auto& [k, p] : empirical) {
    auto it = exact.find(k);
    double q = it == exact.end() ? 0.0 : it->second;
    tv += std::fabs(p - q);
  }
  for (const auto& [k, q] : exact) {
    if (!empirical.count(k)) tv += q;
  }
  return 0.5 * tv;
}

}  // namespace alignppl
