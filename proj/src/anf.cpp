#include "alignppl/anf.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "alignppl/parser.hpp"

namespace alignppl {

NameId NameTable::intern(const std::string& s) {
  auto it = ids_.find(s);
  if (it != ids_.end()) return it->second;
  NameId id = static_cast<NameId>(strs_.size());
  strs_.push_back(s);
  ids_.emplace(s, id);
  return id;
}

bool NameTable::find(const std::string& s, NameId& out) const {
  auto it = ids_.find(s);
  if (it == ids_.end()) return false;
  out = it->second;
  return true;
}

namespace {

// ---------------------------------------------------------------------------
// uniquify

struct Uniquifier {
  std::set<std::string> used;
  std::map<std::string, int> counters;

  std::string freshen(const std::string& base) {
    if (!used.count(base)) {
      used.insert(base);
      return base;
    }
    int& n = counters[base];
    while (true) {
      ++n;
      std::string cand = base + "_" + std::to_string(n);
      if (!used.count(cand)) {
        used.insert(cand);
        return cand;
      }
    }
  }

  using Scope = std::map<std::string, std::string>;

  PatternPtr renamePattern(const PatternPtr& p, Scope& sc) {
    auto q = std::make_shared<Pattern>(*p);
    switch (p->kind) {
      case Pattern::Kind::Var: {
        std::string nn = freshen(p->name);
        sc[p->name] = nn;
        q->name = nn;
        return q;
      }
      case Pattern::Kind::Bool:
      case Pattern::Kind::Wildcard:
      case Pattern::Kind::SeqEmpty:
        return q;
      case Pattern::Kind::Variant:
        q->sub = renamePattern(p->sub, sc);
        return q;
      case Pattern::Kind::SeqCons:
        q->sub = renamePattern(p->sub, sc);
        q->sub2 = renamePattern(p->sub2, sc);
        return q;
      case Pattern::Kind::Record: {
        q->fields.clear();
        for (const auto& [k, sp] : p->fields) q->fields.emplace_back(k, renamePattern(sp, sc));
        return q;
      }
    }
    return q;
  }

  TermPtr rename(const TermPtr& t, const Scope& sc) {
    switch (t->kind) {
      case Term::Kind::Var: {
        auto it = sc.find(t->name);
        if (it == sc.end()) throw LangError("unbound variable '" + t->name + "'", t->pos);
        return mkVar(it->second, t->pos);
      }
      case Term::Kind::Const:
        return t;
      case Term::Kind::Lam: {
        Scope sc2 = sc;
        std::string p2 = freshen(t->name);
        sc2[t->name] = p2;
        return mkLam(p2, rename(t->a, sc2), t->pos);
      }
      case Term::Kind::App:
        return mkApp(rename(t->a, sc), rename(t->b, sc), t->pos);
      case Term::Kind::Let: {
        TermPtr bound = rename(t->a, sc);
        Scope sc2 = sc;
        std::string n2 = freshen(t->name);
        sc2[t->name] = n2;
        return mkLet(n2, bound, rename(t->b, sc2), t->pos);
      }
      case Term::Kind::LetRec: {
        Scope sc2 = sc;
        std::string n2 = freshen(t->name);
        sc2[t->name] = n2;
        return mkLetRec(n2, rename(t->a, sc2), rename(t->b, sc2), t->pos);
      }
      case Term::Kind::If:
        return mkIf(rename(t->a, sc), rename(t->b, sc), rename(t->c, sc), t->pos);
      case Term::Kind::Assume:
        return mkAssume(rename(t->a, sc), t->pos);
      case Term::Kind::Weight:
        return mkWeight(rename(t->a, sc), t->pos);
      case Term::Kind::Match: {
        TermPtr scrut = rename(t->a, sc);
        Scope thenSc = sc;
        PatternPtr pat = renamePattern(t->pat, thenSc);
        return mkMatch(scrut, pat, rename(t->b, thenSc), rename(t->c, sc), t->pos);
      }
      case Term::Kind::Record: {
        auto q = std::make_shared<Term>(*t);
        q->fields.clear();
        for (const auto& [k, ft] : t->fields) q->fields.emplace_back(k, rename(ft, sc));
        return q;
      }
      case Term::Kind::Variant: {
        auto q = std::make_shared<Term>(*t);
        q->a = rename(t->a, sc);
        return q;
      }
      case Term::Kind::Seq: {
        auto q = std::make_shared<Term>(*t);
        q->elems.clear();
        for (const auto& e : t->elems) q->elems.push_back(rename(e, sc));
        return q;
      }
    }
    return t;
  }
};

void checkLetRec(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Const:
      return;
    case Term::Kind::LetRec:
      if (t->a->kind != Term::Kind::Lam) {
        throw LangError("'let rec " + t->name + "' must bind a lambda", t->pos);
      }
      checkLetRec(t->a);
      checkLetRec(t->b);
      return;
    case Term::Kind::Lam:
    case Term::Kind::Assume:
    case Term::Kind::Weight:
    case Term::Kind::Variant:
      checkLetRec(t->a);
      return;
    case Term::Kind::App:
    case Term::Kind::Let:
      checkLetRec(t->a);
      checkLetRec(t->b);
      return;
    case Term::Kind::If:
    case Term::Kind::Match:
      checkLetRec(t->a);
      checkLetRec(t->b);
      checkLetRec(t->c);
      return;
    case Term::Kind::Record:
      for (const auto& [k, ft] : t->fields) checkLetRec(ft);
      return;
    case Term::Kind::Seq:
      for (const auto& e : t->elems) checkLetRec(e);
      return;
  }
}

// ---------------------------------------------------------------------------
// ANF transform

struct AnfBuilder {
  ANFProgram* prog;
  std::set<std::string> used;  // all binder/ref names, to keep fresh names distinct
  int freshCounter = 0;
  uint32_t siteCounter = 0;

  struct Binding {
    NameId name;
    ANFBound bound;
  };

  ANFTerm* alloc() {
    prog->storage.push_back(std::make_unique<ANFTerm>());
    return prog->storage.back().get();
  }

  NameId intern(const std::string& s) { return prog->names.intern(s); }

  std::string freshName(const char* hint) {
    while (true) {
      std::string cand = std::string("_") + hint + std::to_string(++freshCounter);
      if (!used.count(cand)) {
        used.insert(cand);
        return cand;
      }
    }
  }

  void collectUsed(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var: used.insert(t->name); return;
      case Term::Kind::Const: return;
      case Term::Kind::Lam:
        used.insert(t->name);
        collectUsed(t->a);
        return;
      case Term::Kind::Let:
      case Term::Kind::LetRec:
        used.insert(t->name);
        collectUsed(t->a);
        collectUsed(t->b);
        return;
      case Term::Kind::App:
        collectUsed(t->a);
        collectUsed(t->b);
        return;
      case Term::Kind::If:
      case Term::Kind::Match:
        collectUsed(t->a);
        collectUsed(t->b);
        collectUsed(t->c);
        if (t->pat) collectPat(t->pat);
        return;
      case Term::Kind::Assume:
      case Term::Kind::Weight:
      case Term::Kind::Variant:
        collectUsed(t->a);
        return;
      case Term::Kind::Record:
        for (const auto& [k, ft] : t->fields) collectUsed(ft);
        return;
      case Term::Kind::Seq:
        for (const auto& e : t->elems) collectUsed(e);
        return;
    }
  }

  void collectPat(const PatternPtr& p) {
    switch (p->kind) {
      case Pattern::Kind::Var: used.insert(p->name); return;
      case Pattern::Kind::Variant: collectPat(p->sub); return;
      case Pattern::Kind::SeqCons:
        collectPat(p->sub);
        collectPat(p->sub2);
        return;
      case Pattern::Kind::Record:
        for (const auto& [k, sp] : p->fields) collectPat(sp);
        return;
      default: return;
    }
  }

  std::shared_ptr<PatternA> convertPat(const PatternPtr& p) {
    auto q = std::make_shared<PatternA>();
    q->kind = p->kind;
    switch (p->kind) {
      case Pattern::Kind::Var: q->var = intern(p->name); break;
      case Pattern::Kind::Bool: q->bval = p->bval; break;
      case Pattern::Kind::Wildcard:
      case Pattern::Kind::SeqEmpty: break;
      case Pattern::Kind::Variant:
        q->tag = p->name;
        q->sub = convertPat(p->sub);
        break;
      case Pattern::Kind::SeqCons:
        q->sub = convertPat(p->sub);
        q->sub2 = convertPat(p->sub2);
        break;
      case Pattern::Kind::Record:
        for (const auto& [k, sp] : p->fields) q->fields.emplace_back(k, convertPat(sp));
        break;
    }
    return q;
  }

  // Appends bindings that compute t, returning the name holding its value.
  NameId atomize(const TermPtr& t, std::vector<Binding>& acc) {
    switch (t->kind) {
      case Term::Kind::Var:
        return intern(t->name);
      case Term::Kind::Let:
        bindTo(intern(t->name), t->a, acc);
        return atomize(t->b, acc);
      case Term::Kind::LetRec: {
        ANFBound lam;
        lam.pos = t->a->pos;
        lam.kind = ANFBound::Kind::Lam;
        lam.x = intern(t->a->name);
        lam.t1 = normalize(t->a->a);
        lam.selfName = intern(t->name);
        acc.push_back({intern(t->name), lam});
        return atomize(t->b, acc);
      }
      default: {
        NameId n = intern(freshName(hintFor(t)));
        bindTo(n, t, acc);
        return n;
      }
    }
  }

  static const char* hintFor(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Const: return "c";
      case Term::Kind::Lam: return "f";
      case Term::Kind::App: return "a";
      case Term::Kind::If: return "i";
      case Term::Kind::Match: return "m";
      case Term::Kind::Assume: return "s";
      case Term::Kind::Weight: return "w";
      case Term::Kind::Record: return "r";
      case Term::Kind::Variant: return "v";
      case Term::Kind::Seq: return "q";
      default: return "x";
    }
  }

  // Appends bindings so that name n ends up bound to the value of t.
  void bindTo(NameId n, const TermPtr& t, std::vector<Binding>& acc) {
    ANFBound b;
    b.pos = t->pos;
    switch (t->kind) {
      case Term::Kind::Var:
        b.kind = ANFBound::Kind::Var;
        b.x = intern(t->name);
        break;
      case Term::Kind::Const:
        b.kind = ANFBound::Kind::Const;
        b.lit = t->lit;
        break;
      case Term::Kind::Lam:
        b.kind = ANFBound::Kind::Lam;
        b.x = intern(t->name);
        b.t1 = normalize(t->a);
        break;
      case Term::Kind::App:
        b.kind = ANFBound::Kind::App;
        b.x = atomize(t->a, acc);
        b.y = atomize(t->b, acc);
        b.site = ++siteCounter;
        break;
      case Term::Kind::Let:
        bindTo(intern(t->name), t->a, acc);
        bindTo(n, t->b, acc);
        return;
      case Term::Kind::LetRec: {
        ANFBound lam;
        lam.pos = t->a->pos;
        lam.kind = ANFBound::Kind::Lam;
        lam.x = intern(t->a->name);
        lam.t1 = normalize(t->a->a);
        lam.selfName = intern(t->name);
        acc.push_back({intern(t->name), lam});
        bindTo(n, t->b, acc);
        return;
      }
      case Term::Kind::If:
        b.kind = ANFBound::Kind::If;
        b.x = atomize(t->a, acc);
        b.t1 = normalize(t->b);
        b.t2 = normalize(t->c);
        break;
      case Term::Kind::Match:
        b.kind = ANFBound::Kind::Match;
        b.x = atomize(t->a, acc);
        b.pat = convertPat(t->pat);
        b.t1 = normalize(t->b);
        b.t2 = normalize(t->c);
        break;
      case Term::Kind::Assume:
        b.kind = ANFBound::Kind::Assume;
        b.x = atomize(t->a, acc);
        b.site = ++siteCounter;
        break;
      case Term::Kind::Weight:
        b.kind = ANFBound::Kind::Weight;
        b.x = atomize(t->a, acc);
        break;
      case Term::Kind::Record:
        b.kind = ANFBound::Kind::Record;
        for (const auto& [k, ft] : t->fields) b.fields.emplace_back(k, atomize(ft, acc));
        break;
      case Term::Kind::Variant:
        b.kind = ANFBound::Kind::Variant;
        b.tag = t->name;
        b.x = atomize(t->a, acc);
        break;
      case Term::Kind::Seq:
        b.kind = ANFBound::Kind::Seq;
        for (const auto& e : t->elems) b.elems.push_back(atomize(e, acc));
        break;
    }
    acc.push_back({n, std::move(b)});
  }

  const ANFTerm* normalize(const TermPtr& t) {
    std::vector<Binding> acc;
    NameId tail = atomize(t, acc);
    ANFTerm* result = alloc();
    result->kind = ANFTerm::Kind::TailVar;
    result->var = tail;
    // fold bindings back-to-front
    for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
      ANFTerm* let = alloc();
      let->kind = ANFTerm::Kind::Let;
      let->var = it->name;
      let->bound = std::move(it->bound);
      let->rest = result;
      result = let;
    }
    return result;
  }
};

void fillInfo(ANFProgram& prog, const ANFTerm* t);

void fillInfoPat(ANFProgram& prog, const PatternA& p) {
  auto mark = [&](NameId n) {
    if (n >= prog.info.size()) prog.info.resize(n + 1);
    prog.info[n].param = true;  // pattern binders behave like params: not expression labels
  };
  switch (p.kind) {
    case Pattern::Kind::Var: mark(p.var); break;
    case Pattern::Kind::Variant: fillInfoPat(prog, *p.sub); break;
    case Pattern::Kind::SeqCons:
      fillInfoPat(prog, *p.sub);
      fillInfoPat(prog, *p.sub2);
      break;
    case Pattern::Kind::Record:
      for (const auto& [k, sp] : p.fields) fillInfoPat(prog, *sp);
      break;
    default: break;
  }
}

void fillInfo(ANFProgram& prog, const ANFTerm* t) {
  while (t->kind == ANFTerm::Kind::Let) {
    NameId n = t->var;
    if (n >= prog.info.size()) prog.info.resize(n + 1);
    prog.info[n].letBound = true;
    prog.info[n].boundKind = t->bound.kind;
    switch (t->bound.kind) {
      case ANFBound::Kind::Lam: {
        NameId p = t->bound.x;
        if (p >= prog.info.size()) prog.info.resize(p + 1);
        prog.info[p].param = true;
        fillInfo(prog, t->bound.t1);
        break;
      }
      case ANFBound::Kind::If:
        fillInfo(prog, t->bound.t1);
        fillInfo(prog, t->bound.t2);
        break;
      case ANFBound::Kind::Match:
        fillInfoPat(prog, *t->bound.pat);
        fillInfo(prog, t->bound.t1);
        fillInfo(prog, t->bound.t2);
        break;
      case ANFBound::Kind::Weight:
        prog.weightBinders.push_back(n);
        break;
      case ANFBound::Kind::Assume:
        prog.assumeBinders.push_back(n);
        break;
      default: break;
    }
    t = t->rest;
  }
}

void printANFTerm(std::ostringstream& os, const ANFProgram& p, const ANFTerm* t, int indent);

void printBound(std::ostringstream& os, const ANFProgram& p, const ANFBound& b, int indent) {
  auto nm = [&](NameId n) -> const std::string& { return p.nameStr(n); };
  std::string pad(indent + 2, ' ');
  switch (b.kind) {
    case ANFBound::Kind::Var: os << nm(b.x); break;
    case ANFBound::Kind::Const: {
      TermPtr c = mkConst(b.lit);
      std::string s = prettyPrint(c);
      s.pop_back();
      os << s;
      break;
    }
    case ANFBound::Kind::Lam:
      os << "lam " << nm(b.x) << ".\n" << pad;
      printANFTerm(os, p, b.t1, indent + 2);
      break;
    case ANFBound::Kind::App: os << nm(b.x) << " " << nm(b.y); break;
    case ANFBound::Kind::If:
      os << "if " << nm(b.x) << " then\n" << pad;
      printANFTerm(os, p, b.t1, indent + 2);
      os << "\n" << pad << "else\n" << pad;
      printANFTerm(os, p, b.t2, indent + 2);
      break;
    case ANFBound::Kind::Match:
      os << "match " << nm(b.x) << " with <pat> then\n" << pad;
      printANFTerm(os, p, b.t1, indent + 2);
      os << "\n" << pad << "else\n" << pad;
      printANFTerm(os, p, b.t2, indent + 2);
      break;
    case ANFBound::Kind::Assume: os << "assume " << nm(b.x); break;
    case ANFBound::Kind::Weight: os << "weight " << nm(b.x); break;
    case ANFBound::Kind::Record: {
      os << "{";
      bool first = true;
      for (const auto& [k, v] : b.fields) {
        if (!first) os << ", ";
        first = false;
        os << k << " = " << nm(v);
      }
      os << "}";
      break;
    }
    case ANFBound::Kind::Variant: os << b.tag << " " << nm(b.x); break;
    case ANFBound::Kind::Seq: {
      os << "[";
      bool first = true;
      for (NameId e : b.elems) {
        if (!first) os << ", ";
        first = false;
        os << nm(e);
      }
      os << "]";
      break;
    }
  }
}

void printANFTerm(std::ostringstream& os, const ANFProgram& p, const ANFTerm* t, int indent) {
  std::string pad(indent, ' ');
  bool first = true;
  while (t->kind == ANFTerm::Kind::Let) {
    if (!first) os << "\n" << pad;
    first = false;
    os << "let " << p.nameStr(t->var) << " = ";
    printBound(os, p, t->bound, indent);
    os << " in";
    t = t->rest;
  }
  if (!first) os << "\n" << pad;
  os << p.nameStr(t->var);
}

}  // namespace

TermPtr uniquify(const TermPtr& t) {
  Uniquifier u;
  return u.rename(t, {});
}

TermPtr letrecDesugar(const TermPtr& t) {
  checkLetRec(t);
  return t;
}

NameId anfName(const ANFTerm* t) {
  while (t->kind == ANFTerm::Kind::Let) t = t->rest;
  return t->var;
}

std::vector<NameId> anfNames(const ANFTerm* t) {
  std::vector<NameId> out;
  while (t->kind == ANFTerm::Kind::Let) {
    out.push_back(t->var);
    t = t->rest;
  }
  return out;
}

ANFProgramPtr toANF(const TermPtr& t) {
  auto prog = std::make_shared<ANFProgram>();
  AnfBuilder b;
  b.prog = prog.get();
  b.collectUsed(t);
  prog->root = b.normalize(t);
  prog->info.resize(prog->names.size());
  fillInfo(*prog, prog->root);
  prog->numSites = b.siteCounter;
  return prog;
}

ANFProgramPtr compileProgram(const std::string& source) {
  return toANF(letrecDesugar(uniquify(parse(source))));
}

std::string prettyPrintANF(const ANFProgram& p) {
  std::ostringstream os;
  printANFTerm(os, p, p.root, 0);
  os << "\n";
  return os.str();
}

}  // namespace alignppl
