#ifndef ALIGNPPL_ANALYSIS_HPP
#define ALIGNPPL_ANALYSIS_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "alignppl/anf.hpp"

namespace alignppl {

/// 0-CFA lattice element: stoch, an abstract lambda, an intrinsic of
/// positive arity, or a structured value tracking which names flow to each
/// position.
struct AbstractValue {
  enum class Kind : uint8_t { Stoch, Lam, Const, Record, Variant, Seq };
  Kind kind = Kind::Stoch;
  NameId param = kNoName;  // Lam
  NameId body = kNoName;   // Lam: name labeling the body
  int arity = 0;           // Const, always >= 1
  std::string tag;         // Variant
  std::vector<std::pair<std::string, std::vector<NameId>>> recFields;  // Record, key-sorted
  std::vector<NameId> nameSet;  // Variant payload / Seq elements, sorted

  bool operator<(const AbstractValue& o) const;
  bool operator==(const AbstractValue& o) const;

  static AbstractValue stoch() { return AbstractValue{}; }
  static AbstractValue lam(NameId p, NameId b) {
    AbstractValue a;
    a.kind = Kind::Lam;
    a.param = p;
    a.body = b;
    return a;
  }
  static AbstractValue konst(int n) {
    AbstractValue a;
    a.kind = Kind::Const;
    a.arity = n;
    return a;
  }
};

using AbsSet = std::set<AbstractValue>;

/// One constraint of the Eq.-style grammar, plus the match-specific forms.
struct Constraint {
  enum class Kind : uint8_t {
    Member,                  // a1 in S_x
    Subset,                  // S_x subset S_y
    CondMember,              // a1 in S_x => a2 in S_y
    LamApp,                  // all lam z.y in S_x => S_y' subset S_z and S_y subset S_z'
    ConstApp,                // all const n in S_x, n>1 => const n-1 in S_z
    ConstStochApp,           // const _ in S_x => (stoch in S_y => stoch in S_z)
    UnalignedImp,            // unaligned_x => unaligned_y
    StochUnaligned,          // stoch in S_x => unaligned_y
    LamsUnaligned,           // all lam z._ in S_x => unaligned_z
    UnalignedLamsUnaligned,  // unaligned_z => (all lam w._ in S_x => unaligned_w)
    StochLamsUnaligned,      // stoch in S_x => (all lam w._ in S_x => unaligned_w)
    MatchStoch,              // stochastic scrutiny => stoch in S_z, branch names unaligned
    MatchBind,               // flow scrutinee structure into pattern variables
  };
  Kind kind;
  AbstractValue a1, a2;
  NameId x = kNoName;  // primary operand (lhs / source)
  NameId y = kNoName;  // secondary (rhs / target)
  NameId z = kNoName;  // application result / match result
  std::shared_ptr<const PatternA> pat;
  std::vector<NameId> names;  // MatchStoch: NAMES of both branches

  std::string encode(const NameTable& names) const;
};

struct AnalysisResult {
  ANFProgramPtr prog;
  std::vector<AbsSet> data;          // S_x per NameId
  std::vector<char> unalignedRaw;    // every flagged name, lambda params included
  std::set<NameId> unaligned;        // expression labels only (let binders)
  std::set<NameId> alignedSet;       // all names minus unalignedRaw

  bool isAligned(NameId n) const { return n < unalignedRaw.size() ? !unalignedRaw[n] : true; }
  /// Weight binders the aligned SMC suspends at, in program order.
  std::vector<NameId> alignedWeightBinders() const;
  std::vector<NameId> alignedAssumeBinders() const;
};

enum class WorklistOrder : uint8_t { Lifo, Fifo };

/// Alg.-style constraint generation over ANF. Total on well-formed input.
std::vector<Constraint> generateConstraints(const ANFProgram& prog);

/// Worklist propagation to the least solution.
AnalysisResult solve(std::vector<Constraint> constraints, const ANFProgramPtr& prog,
                     WorklistOrder order = WorklistOrder::Lifo);

AnalysisResult analyzeAlign(const ANFProgramPtr& prog,
                            WorklistOrder order = WorklistOrder::Lifo);

/// True when randomness can decide whether `pat` matches a scrutinee with
/// abstract values `scrutAbs`. `lookup` resolves S_n for names nested in
/// structured abstract values.
bool matchStochastic(const AbsSet& scrutAbs, const PatternA& pat,
                     const std::function<const AbsSet*(NameId)>& lookup);

/// One-pass check that a solution satisfies every constraint; returns an
/// explanation for the first violated constraint, empty string if none.
std::string validateSolution(const std::vector<Constraint>& constraints,
                             const AnalysisResult& result);

std::string abstractValueToString(const AbstractValue& a, const NameTable& names);
std::string constraintToString(const Constraint& c, const NameTable& names);

}  // namespace alignppl

#endif
