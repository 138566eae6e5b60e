// Grammar-directed generator of small well-typed closed programs.
#ifndef ALIGNPPL_TESTS_GEN_HPP
#define ALIGNPPL_TESTS_GEN_HPP

#include <string>
#include <vector>

#include "alignppl/rng.hpp"

namespace alignppl::testing {

enum class Ty : uint8_t { Int, Real, Bool, Unit };

class ProgramGen {
 public:
  explicit ProgramGen(Rng rng) : rng_(rng) {}

  std::string program() {
    vars_.clear();
    counter_ = 0;
    Ty ty = static_cast<Ty>(rng_.nextBelow(3));  // Int, Real, or Bool result
    return expr(ty, 3);
  }

 private:
  struct Var {
    std::string name;
    Ty ty;
  };

  std::string fresh() { return "g" + std::to_string(counter_++); }

  std::string lit(Ty ty) {
    switch (ty) {
      case Ty::Int: {
        int64_t v = static_cast<int64_t>(rng_.nextBelow(20)) - 10;
        return v < 0 ? "(0 - " + std::to_string(-v) + ")" : std::to_string(v);
      }
      case Ty::Real: {
        double v = static_cast<double>(rng_.nextBelow(400)) / 16.0 - 12.0;
        std::string s = std::to_string(v);
        return v < 0 ? "(0.0 - " + s.substr(1) + ")" : s;
      }
      case Ty::Bool: return rng_.nextBelow(2) ? "true" : "false";
      case Ty::Unit: return "()";
    }
    return "()";
  }

  const Var* pickVar(Ty ty) {
    std::vector<const Var*> matches;
    for (const Var& v : vars_) {
      if (v.ty == ty) matches.push_back(&v);
    }
    if (matches.empty()) return nullptr;
    return matches[rng_.nextBelow(matches.size())];
  }

  std::string expr(Ty ty, int depth) {
    if (depth <= 0) return atom(ty);
    switch (rng_.nextBelow(8)) {
      case 0:
        return atom(ty);
      case 1: {  // let
        Ty bt = static_cast<Ty>(rng_.nextBelow(3));
        std::string n = fresh();
        std::string bound = expr(bt, depth - 1);
        vars_.push_back({n, bt});
        std::string body = expr(ty, depth - 1);
        vars_.pop_back();
        return "let " + n + " = " + bound + " in " + body;
      }
      case 2:  // if
        return "if " + expr(Ty::Bool, depth - 1) + " then " + expr(ty, depth - 1) + " else " +
               expr(ty, depth - 1);
      case 3: {  // lambda + application
        Ty at = static_cast<Ty>(rng_.nextBelow(3));
        std::string p = fresh();
        vars_.push_back({p, at});
        std::string body = expr(ty, depth - 1);
        vars_.pop_back();
        return "(lam " + p + ". " + body + ") (" + expr(at, depth - 1) + ")";
      }
      case 4: {  // weight then continue
        return "let " + fresh() + " = weight " + std::to_string(0.25 + rng_.nextDouble()) +
               " in " + expr(ty, depth - 1);
      }
      case 5: {  // random draw
        if (ty == Ty::Bool) {
          double p = 0.1 + 0.8 * rng_.nextDouble();
          return "assume (Bernoulli " + std::to_string(p) + ")";
        }
        return arith(ty, depth);
      }
      case 6: {  // record round-trip via match
        std::string n = fresh();
        std::string scrut = "{a = " + expr(ty, depth - 1) + ", b = " + expr(Ty::Bool, depth - 1) + "}";
        vars_.push_back({n, ty});
        std::string body = expr(ty, depth - 1);
        vars_.pop_back();
        return "match " + scrut + " with {a = " + n + "} then " + body + " else " +
               atom(ty);
      }
      default:
        return arith(ty, depth);
    }
  }

  std::string arith(Ty ty, int depth) {
    if (ty == Ty::Bool) {
      const char* cmp = nullptr;
      switch (rng_.nextBelow(4)) {
        case 0: cmp = "<"; break;
        case 1: cmp = "<="; break;
        case 2: cmp = "=="; break;
        default: cmp = ">"; break;
      }
      Ty at = rng_.nextBelow(2) ? Ty::Int : Ty::Real;
      return "(" + expr(at, depth - 1) + ") " + cmp + " (" + expr(at, depth - 1) + ")";
    }
    const char* op = rng_.nextBelow(2) ? "+" : "*";
    return "(" + expr(ty, depth - 1) + ") " + op + " (" + expr(ty, depth - 1) + ")";
  }

  std::string atom(Ty ty) {
    if (const Var* v = pickVar(ty); v && rng_.nextBelow(2)) return v->name;
    return lit(ty);
  }

  Rng rng_;
  std::vector<Var> vars_;
  int counter_ = 0;
};

}  // namespace alignppl::testing

#endif
