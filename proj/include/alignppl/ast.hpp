#ifndef ALIGNPPL_AST_HPP
#define ALIGNPPL_AST_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alignppl {

struct SourcePos {
  int line = 0;
  int col = 0;
};

/// Intrinsic operators and distribution constructors. Scalar literals
/// (unit, bool, int, real) are handled separately in ConstLit.
enum class OpTag : uint8_t {
  Not,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Neq,
  Lt,
  Leq,
  Gt,
  Geq,
  Min,
  Max,
  Abs,
  Exp,
  Log,
  Pdf,
  Cons,
  DistBernoulli,
  DistBeta,
  DistGamma,
  DistExponential,
  DistPoisson,
  DistNormal,
  DistUniform,
  DistDirichlet,
  DistCategorical,
};

int opArity(OpTag op);
const char* opName(OpTag op);
/// Returns true and sets `op` if `ident` names an intrinsic operator.
bool lookupOp(const std::string& ident, OpTag& op);
bool isDistConstructor(OpTag op);

/// A constant literal in the surface syntax: a scalar or a named operator.
struct ConstLit {
  enum class K : uint8_t { Unit, Bool, Int, Real, Op } k = K::Unit;
  bool b = false;
  int64_t i = 0;
  double r = 0.0;
  OpTag op = OpTag::Not;

  static ConstLit unit() { return ConstLit{}; }
  static ConstLit boolean(bool v) {
    ConstLit c;
    c.k = K::Bool;
    c.b = v;
    return c;
  }
  static ConstLit integer(int64_t v) {
    ConstLit c;
    c.k = K::Int;
    c.i = v;
    return c;
  }
  static ConstLit real(double v) {
    ConstLit c;
    c.k = K::Real;
    c.r = v;
    return c;
  }
  static ConstLit oper(OpTag o) {
    ConstLit c;
    c.k = K::Op;
    c.op = o;
    return c;
  }
};

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind : uint8_t { Var, Bool, Record, Variant, SeqCons, SeqEmpty, Wildcard };
  Kind kind = Kind::Wildcard;
  SourcePos pos;
  std::string name;  // Var binder or Variant tag
  bool bval = false;
  std::vector<std::pair<std::string, PatternPtr>> fields;  // Record
  PatternPtr sub;   // Variant payload, SeqCons head
  PatternPtr sub2;  // SeqCons tail
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind : uint8_t {
    Var,
    Const,
    Lam,
    App,
    Let,
    LetRec,
    If,
    Assume,
    Weight,
    Match,
    Record,
    Variant,
    Seq,
  };
  Kind kind;
  SourcePos pos;
  std::string name;  // Var name, Let/LetRec binder, Lam param, Variant tag
  ConstLit lit;
  TermPtr a;  // Lam body, App fn, Let bound, If cond, Assume/Weight arg, Match scrutinee, Variant payload
  TermPtr b;  // App arg, Let body, If then, Match then
  TermPtr c;  // If else, Match else
  PatternPtr pat;
  std::vector<std::pair<std::string, TermPtr>> fields;
  std::vector<TermPtr> elems;
};

TermPtr mkVar(std::string n, SourcePos p = {});
TermPtr mkConst(ConstLit c, SourcePos p = {});
TermPtr mkLam(std::string param, TermPtr body, SourcePos p = {});
TermPtr mkApp(TermPtr f, TermPtr arg, SourcePos p = {});
TermPtr mkLet(std::string n, TermPtr bound, TermPtr body, SourcePos p = {});
TermPtr mkLetRec(std::string n, TermPtr lam, TermPtr body, SourcePos p = {});
TermPtr mkIf(TermPtr c0, TermPtr t, TermPtr e, SourcePos p = {});
TermPtr mkAssume(TermPtr d, SourcePos p = {});
TermPtr mkWeight(TermPtr w, SourcePos p = {});
TermPtr mkMatch(TermPtr scrut, PatternPtr pat, TermPtr t, TermPtr e, SourcePos p = {});

/// Canonical pretty-print; output is byte-stable and reparses to an
/// alpha-equivalent term.
std::string prettyPrint(const TermPtr& t);
std::string prettyPrint(const PatternPtr& p);

/// Structural equality up to consistent renaming of binders.
bool alphaEqual(const TermPtr& a, const TermPtr& b);

struct LangError : std::runtime_error {
  SourcePos pos;
  LangError(std::string msg, SourcePos p) : std::runtime_error(std::move(msg)), pos(p) {}
};

}  // namespace alignppl

#endif
