#include "alignppl/ast.hpp"

#include <map>
#include <sstream>

namespace alignppl {

namespace {

struct OpInfo {
  const char* name;
  int arity;
};

const std::map<OpTag, OpInfo>& opTable() {
  static const std::map<OpTag, OpInfo> table = {
      {OpTag::Not, {"not", 1}},
      {OpTag::Neg, {"neg", 1}},
      {OpTag::Add, {"+", 2}},
      {OpTag::Sub, {"-", 2}},
      {OpTag::Mul, {"*", 2}},
      {OpTag::Div, {"/", 2}},
      {OpTag::Eq, {"==", 2}},
      {OpTag::Neq, {"!=", 2}},
      {OpTag::Lt, {"<", 2}},
      {OpTag::Leq, {"<=", 2}},
      {OpTag::Gt, {">", 2}},
      {OpTag::Geq, {">=", 2}},
      {OpTag::Min, {"min", 2}},
      {OpTag::Max, {"max", 2}},
      {OpTag::Abs, {"abs", 1}},
      {OpTag::Exp, {"exp", 1}},
      {OpTag::Log, {"log", 1}},
      {OpTag::Pdf, {"pdf", 2}},
      {OpTag::Cons, {"cons", 2}},
      {OpTag::DistBernoulli, {"Bernoulli", 1}},
      {OpTag::DistBeta, {"Beta", 2}},
      {OpTag::DistGamma, {"Gamma", 2}},
      {OpTag::DistExponential, {"Exponential", 1}},
      {OpTag::DistPoisson, {"Poisson", 1}},
      {OpTag::DistNormal, {"Normal", 2}},
      {OpTag::DistUniform, {"Uniform", 2}},
      {OpTag::DistDirichlet, {"Dirichlet", 1}},
      {OpTag::DistCategorical, {"Categorical", 1}},
  };
  return table;
}

}  // namespace

int opArity(OpTag op) { return opTable().at(op).arity; }
const char* opName(OpTag op) { return opTable().at(op).name; }

bool lookupOp(const std::string& ident, OpTag& op) {
  for (const auto& [tag, info] : opTable()) {
    if (ident == info.name) {
      op = tag;
      return true;
    }
  }
  return false;
}

bool isDistConstructor(OpTag op) { return op >= OpTag::DistBernoulli; }

TermPtr mkVar(std::string n, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->pos = p;
  t->name = std::move(n);
  return t;
}

TermPtr mkConst(ConstLit c, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Const;
  t->pos = p;
  t->lit = c;
  return t;
}

TermPtr mkLam(std::string param, TermPtr body, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Lam;
  t->pos = p;
  t->name = std::move(param);
  t->a = std::move(body);
  return t;
}

TermPtr mkApp(TermPtr f, TermPtr arg, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->pos = p;
  t->a = std::move(f);
  t->b = std::move(arg);
  return t;
}

TermPtr mkLet(std::string n, TermPtr bound, TermPtr body, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Let;
  t->pos = p;
  t->name = std::move(n);
  t->a = std::move(bound);
  t->b = std::move(body);
  return t;
}

TermPtr mkLetRec(std::string n, TermPtr lam, TermPtr body, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::LetRec;
  t->pos = p;
  t->name = std::move(n);
  t->a = std::move(lam);
  t->b = std::move(body);
  return t;
}

TermPtr mkIf(TermPtr c0, TermPtr t1, TermPtr e, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::If;
  t->pos = p;
  t->a = std::move(c0);
  t->b = std::move(t1);
  t->c = std::move(e);
  return t;
}

TermPtr mkAssume(TermPtr d, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Assume;
  t->pos = p;
  t->a = std::move(d);
  return t;
}

TermPtr mkWeight(TermPtr w, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Weight;
  t->pos = p;
  t->a = std::move(w);
  return t;
}

TermPtr mkMatch(TermPtr scrut, PatternPtr pat, TermPtr t1, TermPtr e, SourcePos p) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Match;
  t->pos = p;
  t->a = std::move(scrut);
  t->b = std::move(t1);
  t->c = std::move(e);
  t->pat = std::move(pat);
  return t;
}

namespace {

void printReal(std::ostringstream& os, double r) {
  // Shortest representation that round-trips; always keep a decimal marker
  // so reals stay distinct from ints.
  std::ostringstream tmp;
  tmp.precision(17);
  tmp << r;
  std::string s = tmp.str();
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  os << s;
}

void printConst(std::ostringstream& os, const ConstLit& c) {
  switch (c.k) {
    case ConstLit::K::Unit: os << "()"; break;
    case ConstLit::K::Bool: os << (c.b ? "true" : "false"); break;
    case ConstLit::K::Int: os << c.i; break;
    case ConstLit::K::Real: printReal(os, c.r); break;
    case ConstLit::K::Op: os << opName(c.op); break;
  }
}

void printPat(std::ostringstream& os, const PatternPtr& p) {
  switch (p->kind) {
    case Pattern::Kind::Var: os << p->name; break;
    case Pattern::Kind::Bool: os << (p->bval ? "true" : "false"); break;
    case Pattern::Kind::Wildcard: os << "_"; break;
    case Pattern::Kind::SeqEmpty: os << "[]"; break;
    case Pattern::Kind::SeqCons:
      os << "(";
      printPat(os, p->sub);
      os << " :: ";
      printPat(os, p->sub2);
      os << ")";
      break;
    case Pattern::Kind::Variant:
      os << p->name << " ";
      printPat(os, p->sub);
      break;
    case Pattern::Kind::Record: {
      os << "{";
      bool first = true;
      for (const auto& [k, sp] : p->fields) {
        if (!first) os << ", ";
        first = false;
        os << k << " = ";
        printPat(os, sp);
      }
      os << "}";
      break;
    }
  }
}

void printTerm(std::ostringstream& os, const TermPtr& t);

bool isSymbolicOp(OpTag op) {
  char c = opName(op)[0];
  return !(std::isalpha(static_cast<unsigned char>(c)));
}

bool isConstOp(const TermPtr& t) {
  return t->kind == Term::Kind::Const && t->lit.k == ConstLit::K::Op;
}

void printAtomic(std::ostringstream& os, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
      os << t->name;
      return;
    case Term::Kind::Const:
      if (t->lit.k == ConstLit::K::Op && isSymbolicOp(t->lit.op)) {
        os << "(" << opName(t->lit.op) << ")";
        return;
      }
      printConst(os, t->lit);
      return;
    case Term::Kind::Record: {
      os << "{";
      bool first = true;
      for (const auto& [k, ft] : t->fields) {
        if (!first) os << ", ";
        first = false;
        os << k << " = ";
        printTerm(os, ft);
      }
      os << "}";
      return;
    }
    case Term::Kind::Seq: {
      os << "[";
      bool first = true;
      for (const auto& e : t->elems) {
        if (!first) os << ", ";
        first = false;
        printTerm(os, e);
      }
      os << "]";
      return;
    }
    default:
      os << "(";
      printTerm(os, t);
      os << ")";
      return;
  }
}

void printTerm(std::ostringstream& os, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const:
    case Term::Kind::Record:
    case Term::Kind::Seq:
      printAtomic(os, t);
      return;
    case Term::Kind::Lam:
      os << "lam " << t->name << ". ";
      printTerm(os, t->a);
      return;
    case Term::Kind::App:
      // fully applied symbolic binary operators print infix
      if (t->a->kind == Term::Kind::App && isConstOp(t->a->a) && isSymbolicOp(t->a->a->lit.op) &&
          opArity(t->a->a->lit.op) == 2) {
        os << "(";
        printTerm(os, t->a->b);
        os << " " << opName(t->a->a->lit.op) << " ";
        printTerm(os, t->b);
        os << ")";
        return;
      }
      if (t->a->kind == Term::Kind::App || t->a->kind == Term::Kind::Var ||
          t->a->kind == Term::Kind::Const) {
        printTerm(os, t->a);
      } else {
        printAtomic(os, t->a);
      }
      os << " ";
      printAtomic(os, t->b);
      return;
    case Term::Kind::Let:
      os << "let " << t->name << " = ";
      printTerm(os, t->a);
      os << " in\n";
      printTerm(os, t->b);
      return;
    case Term::Kind::LetRec:
      os << "let rec " << t->name << " = ";
      printTerm(os, t->a);
      os << " in\n";
      printTerm(os, t->b);
      return;
    case Term::Kind::If:
      os << "if ";
      printTerm(os, t->a);
      os << " then ";
      printTerm(os, t->b);
      os << " else ";
      printTerm(os, t->c);
      return;
    case Term::Kind::Assume:
      os << "assume ";
      printAtomic(os, t->a);
      return;
    case Term::Kind::Weight:
      os << "weight ";
      printAtomic(os, t->a);
      return;
    case Term::Kind::Match:
      os << "match ";
      printTerm(os, t->a);
      os << " with ";
      printPat(os, t->pat);
      os << " then ";
      printTerm(os, t->b);
      os << " else ";
      printTerm(os, t->c);
      return;
    case Term::Kind::Variant:
      os << t->name << " ";
      printAtomic(os, t->a);
      return;
  }
}

bool constEqual(const ConstLit& x, const ConstLit& y) {
  if (x.k != y.k) return false;
  switch (x.k) {
    case ConstLit::K::Unit: return true;
    case ConstLit::K::Bool: return x.b == y.b;
    case ConstLit::K::Int: return x.i == y.i;
    case ConstLit::K::Real: return x.r == y.r;
    case ConstLit::K::Op: return x.op == y.op;
  }
  return false;
}

using RenameMap = std::map<std::string, std::string>;

bool patAlpha(const PatternPtr& x, const PatternPtr& y, RenameMap& ren) {
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Pattern::Kind::Var:
      ren[x->name] = y->name;
      return true;
    case Pattern::Kind::Bool: return x->bval == y->bval;
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::SeqEmpty: return true;
    case Pattern::Kind::SeqCons:
      return patAlpha(x->sub, y->sub, ren) && patAlpha(x->sub2, y->sub2, ren);
    case Pattern::Kind::Variant:
      return x->name == y->name && patAlpha(x->sub, y->sub, ren);
    case Pattern::Kind::Record: {
      if (x->fields.size() != y->fields.size()) return false;
      for (size_t i = 0; i < x->fields.size(); ++i) {
        if (x->fields[i].first != y->fields[i].first) return false;
        if (!patAlpha(x->fields[i].second, y->fields[i].second, ren)) return false;
      }
      return true;
    }
  }
  return false;
}

bool alphaRec(const TermPtr& x, const TermPtr& y, RenameMap ren) {
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Term::Kind::Var: {
      auto it = ren.find(x->name);
      if (it != ren.end()) return it->second == y->name;
      return x->name == y->name;  // free variable
    }
    case Term::Kind::Const: return constEqual(x->lit, y->lit);
    case Term::Kind::Lam:
      ren[x->name] = y->name;
      return alphaRec(x->a, y->a, ren);
    case Term::Kind::App:
      return alphaRec(x->a, y->a, ren) && alphaRec(x->b, y->b, ren);
    case Term::Kind::Let:
    case Term::Kind::LetRec: {
      RenameMap bodyRen = ren;
      bodyRen[x->name] = y->name;
      // letrec: the bound lambda sees the binder
      const RenameMap& boundRen = (x->kind == Term::Kind::LetRec) ? bodyRen : ren;
      return alphaRec(x->a, y->a, boundRen) && alphaRec(x->b, y->b, bodyRen);
    }
    case Term::Kind::If:
      return alphaRec(x->a, y->a, ren) && alphaRec(x->b, y->b, ren) && alphaRec(x->c, y->c, ren);
    case Term::Kind::Assume:
    case Term::Kind::Weight:
      return alphaRec(x->a, y->a, ren);
    case Term::Kind::Match: {
      if (!alphaRec(x->a, y->a, ren)) return false;
      RenameMap thenRen = ren;
      if (!patAlpha(x->pat, y->pat, thenRen)) return false;
      return alphaRec(x->b, y->b, thenRen) && alphaRec(x->c, y->c, ren);
    }
    case Term::Kind::Record: {
      if (x->fields.size() != y->fields.size()) return false;
      for (size_t i = 0; i < x->fields.size(); ++i) {
        if (x->fields[i].first != y->fields[i].first) return false;
        if (!alphaRec(x->fields[i].second, y->fields[i].second, ren)) return false;
      }
      return true;
    }
    case Term::Kind::Variant:
      return x->name == y->name && alphaRec(x->a, y->a, ren);
    case Term::Kind::Seq: {
      if (x->elems.size() != y->elems.size()) return false;
      for (size_t i = 0; i < x->elems.size(); ++i) {
        if (!alphaRec(x->elems[i], y->elems[i], ren)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::string prettyPrint(const TermPtr& t) {
  std::ostringstream os;
  printTerm(os, t);
  os << "\n";
  return os.str();
}

std::string prettyPrint(const PatternPtr& p) {
  std::ostringstream os;
  printPat(os, p);
  return os.str();
}

bool alphaEqual(const TermPtr& a, const TermPtr& b) { return alphaRec(a, b, {}); }

}  // namespace alignppl
