#ifndef ALIGNPPL_ORACLE_HPP
#define ALIGNPPL_ORACLE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "alignppl/inference.hpp"

namespace alignppl {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Order-preserving filter of a let-sequence to the name set Y.
std::vector<NameId> restrictSeq(const std::vector<NameId>& l, const std::set<NameId>& names);

struct AlignmentReport {
  std::string programId;
  size_t runs = 0;
  bool consistent = true;
  // witness on violation: run indices whose restrictions differ, plus the
  // base seed that reproduces them via Rng::fromSeed(seed).child(kRun, index)
  uint64_t seed = 0;
  size_t runA = 0;
  size_t runB = 0;
  std::vector<NameId> restrictionA;
  std::vector<NameId> restrictionB;
};

constexpr uint64_t kAlignmentCheckStream = 0xA11C;

/// Executes `runs` sampled executions and checks that every letSeq
/// restriction to `names` is identical (the empirical soundness check).
AlignmentReport checkAlignmentEmpirically(const ANFProgramPtr& prog,
                                          const std::set<NameId>& names, size_t runs,
                                          uint64_t seed, const std::string& programId = "");

struct ExactPosterior {
  // canonical value string -> normalized probability
  std::map<std::string, double> probs;
  std::map<std::string, Value> representatives;
  double logZ = 0.0;        // flat-list route
  double logZTree = 0.0;    // tree-recursion route; equal up to rounding
  double truncatedPriorMass = 0.0;  // prior mass of paths cut at maxTraceLen
  size_t pathCount = 0;
};

/// Depth-first enumeration of every trace through a finite-support discrete
/// program. With allowTruncation, paths longer than maxTraceLen contribute
/// their prior mass to truncatedPriorMass instead of failing.
ExactPosterior enumeratePosterior(const ANFProgramPtr& prog, size_t maxTraceLen,
                                  bool allowTruncation = false);

/// Normalized empirical distribution over canonical value strings.
std::map<std::string, double> empiricalDistribution(const std::vector<WeightedSample>& samples);

/// Total variation distance, 0.5 * sum |p - q| over the union of supports.
double totalVariation(const std::map<std::string, double>& empirical,
                      const std::map<std::string, double>& exact);

}  // namespace alignppl

#endif
