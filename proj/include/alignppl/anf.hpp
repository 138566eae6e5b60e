#ifndef ALIGNPPL_ANF_HPP
#define ALIGNPPL_ANF_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "alignppl/ast.hpp"

namespace alignppl {

using NameId = uint32_t;
constexpr NameId kNoName = UINT32_MAX;

class NameTable {
 public:
  NameId intern(const std::string& s);
  const std::string& str(NameId id) const { return strs_[id]; }
  bool find(const std::string& s, NameId& out) const;
  size_t size() const { return strs_.size(); }

 private:
  std::vector<std::string> strs_;
  std::unordered_map<std::string, NameId> ids_;
};

/// Alpha-renames so that no two binders share a name (suffix-counter
/// renaming). Throws LangError on unbound variable references.
TermPtr uniquify(const TermPtr& t);

/// Validates that every `let rec` binds a lambda. Recursion stays native;
/// this pass only rejects ill-formed recursive bindings.
TermPtr letrecDesugar(const TermPtr& t);

struct ANFTerm;

/// Pattern with interned binder names.
struct PatternA {
  Pattern::Kind kind = Pattern::Kind::Wildcard;
  NameId var = kNoName;  // Var binder
  bool bval = false;
  std::string tag;  // Variant
  std::vector<std::pair<std::string, std::shared_ptr<PatternA>>> fields;
  std::shared_ptr<PatternA> sub;   // Variant payload, SeqCons head
  std::shared_ptr<PatternA> sub2;  // SeqCons tail
};

struct ANFBound {
  enum class Kind : uint8_t {
    Var,
    Const,
    Lam,
    App,
    If,
    Match,
    Assume,
    Weight,
    Record,
    Variant,
    Seq,
  };
  Kind kind = Kind::Const;
  NameId x = kNoName;  // Var alias / App fn / If cond / Match scrutinee / Assume dist /
                       // Weight arg / Variant payload / Lam param
  NameId y = kNoName;  // App arg
  ConstLit lit;
  const ANFTerm* t1 = nullptr;  // Lam body, If/Match then
  const ANFTerm* t2 = nullptr;  // If/Match else
  NameId selfName = kNoName;    // Lam introduced by let rec: binder visible in body
  std::shared_ptr<PatternA> pat;
  std::string tag;  // Variant
  std::vector<std::pair<std::string, NameId>> fields;
  std::vector<NameId> elems;
  uint32_t site = 0;  // unique id for App and Assume nodes
  SourcePos pos;
};

/// Every subterm is labeled by a let-bound variable; a term is either that
/// label chain or the final tail variable.
struct ANFTerm {
  enum class Kind : uint8_t { TailVar, Let };
  Kind kind = Kind::TailVar;
  NameId var = kNoName;  // TailVar name or Let binder
  ANFBound bound;        // Let only
  const ANFTerm* rest = nullptr;
};

/// Tail label of a term (total on ANF).
NameId anfName(const ANFTerm* t);
/// Top-level let binders of a term, in order.
std::vector<NameId> anfNames(const ANFTerm* t);

struct NameInfo {
  bool letBound = false;
  bool param = false;
  ANFBound::Kind boundKind = ANFBound::Kind::Const;
};

struct ANFProgram {
  NameTable names;
  const ANFTerm* root = nullptr;
  std::vector<NameInfo> info;        // indexed by NameId
  std::vector<NameId> weightBinders; // in program order
  std::vector<NameId> assumeBinders;
  uint32_t numSites = 0;

  std::vector<std::unique_ptr<ANFTerm>> storage;

  const std::string& nameStr(NameId id) const { return names.str(id); }
  bool isWeightBinder(NameId id) const {
    return id < info.size() && info[id].letBound && info[id].boundKind == ANFBound::Kind::Weight;
  }
  bool isAssumeBinder(NameId id) const {
    return id < info.size() && info[id].letBound && info[id].boundKind == ANFBound::Kind::Assume;
  }
};

using ANFProgramPtr = std::shared_ptr<ANFProgram>;

/// Transforms a uniquified term into A-normal form. Branch bodies stay
/// nested; every intermediate expression gets a fresh let binder.
ANFProgramPtr toANF(const TermPtr& t);

/// parse + uniquify + letrecDesugar + toANF.
ANFProgramPtr compileProgram(const std::string& source);

std::string prettyPrintANF(const ANFProgram& p);

}  // namespace alignppl

#endif
