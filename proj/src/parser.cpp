#include "alignppl/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <set>

namespace alignppl {

namespace {

enum class Tok : uint8_t {
  Ident,
  UpperIdent,
  Int,
  Real,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Dot,
  ColonColon,
  Assign,  // =
  OpSym,   // == != < <= > >= + - * /
  Underscore,
  KwLet,
  KwRec,
  KwIn,
  KwLam,
  KwIf,
  KwThen,
  KwElse,
  KwAssume,
  KwWeight,
  KwMatch,
  KwWith,
  KwTrue,
  KwFalse,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  int64_t ival = 0;
  double rval = 0.0;
  SourcePos pos;
};

const std::set<std::string>& reservedWords() {
  static const std::set<std::string> words = {
      "let",  "rec",    "in",     "lam",   "if",   "then", "else",
      "assume", "weight", "match", "with", "true", "false"};
  return words;
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skipWs();
    SourcePos p{line_, col_};
    if (i_ >= src_.size()) return {Tok::Eof, "", 0, 0, p};
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
              src_[i_] == '\'')) {
        id += src_[i_];
        bump();
      }
      if (id == "let") return {Tok::KwLet, id, 0, 0, p};
      if (id == "rec") return {Tok::KwRec, id, 0, 0, p};
      if (id == "in") return {Tok::KwIn, id, 0, 0, p};
      if (id == "lam") return {Tok::KwLam, id, 0, 0, p};
      if (id == "if") return {Tok::KwIf, id, 0, 0, p};
      if (id == "then") return {Tok::KwThen, id, 0, 0, p};
      if (id == "else") return {Tok::KwElse, id, 0, 0, p};
      if (id == "assume") return {Tok::KwAssume, id, 0, 0, p};
      if (id == "weight") return {Tok::KwWeight, id, 0, 0, p};
      if (id == "match") return {Tok::KwMatch, id, 0, 0, p};
      if (id == "with") return {Tok::KwWith, id, 0, 0, p};
      if (id == "true") return {Tok::KwTrue, id, 0, 0, p};
      if (id == "false") return {Tok::KwFalse, id, 0, 0, p};
      bool upper = std::isupper(static_cast<unsigned char>(id[0]));
      return {upper ? Tok::UpperIdent : Tok::Ident, id, 0, 0, p};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) bump();
      bool isReal = false;
      if (i_ < src_.size() && src_[i_] == '.' && i_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
        isReal = true;
        bump();
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) bump();
      }
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        size_t save = i_;
        bump();
        if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) bump();
        if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          isReal = true;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) bump();
        } else {
          i_ = save;  // not an exponent
        }
      }
      std::string num = src_.substr(start, i_ - start);
      if (isReal) {
        Token t{Tok::Real, num, 0, std::strtod(num.c_str(), nullptr), p};
        return t;
      }
      Token t{Tok::Int, num, std::strtoll(num.c_str(), nullptr, 10), 0, p};
      return t;
    }
    switch (c) {
      case '(': bump(); return {Tok::LParen, "(", 0, 0, p};
      case ')': bump(); return {Tok::RParen, ")", 0, 0, p};
      case '{': bump(); return {Tok::LBrace, "{", 0, 0, p};
      case '}': bump(); return {Tok::RBrace, "}", 0, 0, p};
      case '[': bump(); return {Tok::LBracket, "[", 0, 0, p};
      case ']': bump(); return {Tok::RBracket, "]", 0, 0, p};
      case ',': bump(); return {Tok::Comma, ",", 0, 0, p};
      case ';': bump(); return {Tok::Semi, ";", 0, 0, p};
      case '.': bump(); return {Tok::Dot, ".", 0, 0, p};
      case '_': {
        bump();
        if (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                 src_[i_] == '_' || src_[i_] == '\'')) {
          std::string id = "_";
          while (i_ < src_.size() &&
                 (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
                  src_[i_] == '\'')) {
            id += src_[i_];
            bump();
          }
          return {Tok::Ident, id, 0, 0, p};
        }
        return {Tok::Underscore, "_", 0, 0, p};
      }
      case ':':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == ':') {
          bump();
          bump();
          return {Tok::ColonColon, "::", 0, 0, p};
        }
        break;
      case '=':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          bump();
          bump();
          return {Tok::OpSym, "==", 0, 0, p};
        }
        bump();
        return {Tok::Assign, "=", 0, 0, p};
      case '!':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          bump();
          bump();
          return {Tok::OpSym, "!=", 0, 0, p};
        }
        break;
      case '<':
        bump();
        if (i_ < src_.size() && src_[i_] == '=') {
          bump();
          return {Tok::OpSym, "<=", 0, 0, p};
        }
        return {Tok::OpSym, "<", 0, 0, p};
      case '>':
        bump();
        if (i_ < src_.size() && src_[i_] == '=') {
          bump();
          return {Tok::OpSym, ">=", 0, 0, p};
        }
        return {Tok::OpSym, ">", 0, 0, p};
      case '+': bump(); return {Tok::OpSym, "+", 0, 0, p};
      case '-': bump(); return {Tok::OpSym, "-", 0, 0, p};
      case '*': bump(); return {Tok::OpSym, "*", 0, 0, p};
      case '/': bump(); return {Tok::OpSym, "/", 0, 0, p};
      default: break;
    }
    throw LangError(std::string("unexpected character '") + c + "'", p);
  }

 private:
  void bump() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skipWs() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
        while (i_ < src_.size() && src_[i_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  const std::string& src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) { advance(); }

  TermPtr parseProgram() {
    TermPtr t = parseTerm();
    expect(Tok::Eof, "end of input");
    return t;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& what) {
    throw LangError("expected " + what + ", found '" + (cur_.kind == Tok::Eof ? "<eof>" : cur_.text) + "'",
                    cur_.pos);
  }

  void expect(Tok k, const std::string& what) {
    if (cur_.kind != k) fail(what);
    advance();
  }

  std::string expectIdent() {
    if (cur_.kind != Tok::Ident && cur_.kind != Tok::UpperIdent) {
      if (reservedWords().count(cur_.text)) {
        throw LangError("reserved word '" + cur_.text + "' used as identifier", cur_.pos);
      }
      fail("identifier");
    }
    std::string n = cur_.text;
    advance();
    return n;
  }

  TermPtr parseTerm() {
    SourcePos p = cur_.pos;
    switch (cur_.kind) {
      case Tok::KwLet: {
        advance();
        bool rec = false;
        if (cur_.kind == Tok::KwRec) {
          rec = true;
          advance();
        }
        std::string n = expectIdent();
        expect(Tok::Assign, "'='");
        if (cur_.kind == Tok::KwIn) fail("expression after '='");
        TermPtr bound = parseTerm();
        expect(Tok::KwIn, "'in'");
        TermPtr body = parseTerm();
        return rec ? mkLetRec(n, bound, body, p) : mkLet(n, bound, body, p);
      }
      case Tok::KwLam: {
        advance();
        std::string n = expectIdent();
        expect(Tok::Dot, "'.'");
        TermPtr body = parseTerm();
        return mkLam(n, body, p);
      }
      case Tok::KwIf: {
        advance();
        TermPtr c = parseTerm();
        expect(Tok::KwThen, "'then'");
        TermPtr t = parseTerm();
        expect(Tok::KwElse, "'else'");
        TermPtr e = parseTerm();
        return mkIf(c, t, e, p);
      }
      case Tok::KwMatch: {
        advance();
        TermPtr scrut = parseTerm();
        expect(Tok::KwWith, "'with'");
        PatternPtr pat = parsePattern();
        expect(Tok::KwThen, "'then'");
        TermPtr t = parseTerm();
        expect(Tok::KwElse, "'else'");
        TermPtr e = parseTerm();
        return mkMatch(scrut, pat, t, e, p);
      }
      default:
        return parseSeq();
    }
  }

  // t1; t2 is sugar for let _ = t1 in t2
  TermPtr parseSeq() {
    SourcePos p = cur_.pos;
    TermPtr t = parseCompare();
    if (cur_.kind == Tok::Semi) {
      advance();
      TermPtr rest = parseTerm();
      return mkLet("_", t, rest, p);
    }
    return t;
  }

  static OpTag symToOp(const std::string& s) {
    if (s == "==") return OpTag::Eq;
    if (s == "!=") return OpTag::Neq;
    if (s == "<") return OpTag::Lt;
    if (s == "<=") return OpTag::Leq;
    if (s == ">") return OpTag::Gt;
    if (s == ">=") return OpTag::Geq;
    if (s == "+") return OpTag::Add;
    if (s == "-") return OpTag::Sub;
    if (s == "*") return OpTag::Mul;
    return OpTag::Div;
  }

  TermPtr binApp(OpTag op, TermPtr l, TermPtr r, SourcePos p) {
    return mkApp(mkApp(mkConst(ConstLit::oper(op), p), std::move(l), p), std::move(r), p);
  }

  TermPtr parseCompare() {
    TermPtr l = parseAddSub();
    if (cur_.kind == Tok::OpSym &&
        (cur_.text == "==" || cur_.text == "!=" || cur_.text == "<" || cur_.text == "<=" ||
         cur_.text == ">" || cur_.text == ">=")) {
      SourcePos p = cur_.pos;
      OpTag op = symToOp(cur_.text);
      advance();
      TermPtr r = parseAddSub();
      return binApp(op, l, r, p);
    }
    return l;
  }

  TermPtr parseAddSub() {
    TermPtr l = parseMulDiv();
    while (cur_.kind == Tok::OpSym && (cur_.text == "+" || cur_.text == "-")) {
      SourcePos p = cur_.pos;
      OpTag op = symToOp(cur_.text);
      advance();
      TermPtr r = parseMulDiv();
      l = binApp(op, l, r, p);
    }
    return l;
  }

  TermPtr parseMulDiv() {
    TermPtr l = parsePrefix();
    while (cur_.kind == Tok::OpSym && (cur_.text == "*" || cur_.text == "/")) {
      SourcePos p = cur_.pos;
      OpTag op = symToOp(cur_.text);
      advance();
      TermPtr r = parsePrefix();
      l = binApp(op, l, r, p);
    }
    return l;
  }

  // assume/weight take a single atom; application chains are left-assoc.
  TermPtr parsePrefix() {
    SourcePos p = cur_.pos;
    if (cur_.kind == Tok::KwAssume) {
      advance();
      return mkAssume(parseAtom(), p);
    }
    if (cur_.kind == Tok::KwWeight) {
      advance();
      return mkWeight(parseAtom(), p);
    }
    return parseApp();
  }

  bool atomStarts() const {
    switch (cur_.kind) {
      case Tok::Ident:
      case Tok::UpperIdent:
      case Tok::Int:
      case Tok::Real:
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::LParen:
      case Tok::LBrace:
      case Tok::LBracket:
        return true;
      default:
        return false;
    }
  }

  TermPtr parseApp() {
    SourcePos p = cur_.pos;
    // UpperIdent not naming an intrinsic is a variant constructor with one payload atom
    if (cur_.kind == Tok::UpperIdent) {
      OpTag op;
      if (!lookupOp(cur_.text, op)) {
        std::string tag = cur_.text;
        advance();
        if (!atomStarts()) fail("variant payload");
        auto t = std::make_shared<Term>();
        t->kind = Term::Kind::Variant;
        t->pos = p;
        t->name = tag;
        t->a = parseAtom();
        return t;
      }
    }
    TermPtr f = parseAtom();
    while (atomStarts()) {
      TermPtr arg = parseAtom();
      f = mkApp(f, arg, p);
    }
    return f;
  }

  TermPtr parseAtom() {
    SourcePos p = cur_.pos;
    switch (cur_.kind) {
      case Tok::Ident: {
        std::string n = cur_.text;
        advance();
        OpTag op;
        if (lookupOp(n, op)) return mkConst(ConstLit::oper(op), p);
        return mkVar(n, p);
      }
      case Tok::UpperIdent: {
        std::string n = cur_.text;
        OpTag op;
        if (lookupOp(n, op)) {
          advance();
          return mkConst(ConstLit::oper(op), p);
        }
        // variant constructor in atom position
        advance();
        if (!atomStarts()) fail("variant payload");
        auto t = std::make_shared<Term>();
        t->kind = Term::Kind::Variant;
        t->pos = p;
        t->name = n;
        t->a = parseAtom();
        return t;
      }
      case Tok::Int: {
        int64_t v = cur_.ival;
        advance();
        return mkConst(ConstLit::integer(v), p);
      }
      case Tok::Real: {
        double v = cur_.rval;
        advance();
        return mkConst(ConstLit::real(v), p);
      }
      case Tok::KwTrue:
        advance();
        return mkConst(ConstLit::boolean(true), p);
      case Tok::KwFalse:
        advance();
        return mkConst(ConstLit::boolean(false), p);
      case Tok::LParen: {
        advance();
        if (cur_.kind == Tok::RParen) {
          advance();
          return mkConst(ConstLit::unit(), p);
        }
        TermPtr t = parseTerm();
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::LBrace: {
        advance();
        auto t = std::make_shared<Term>();
        t->kind = Term::Kind::Record;
        t->pos = p;
        if (cur_.kind != Tok::RBrace) {
          while (true) {
            std::string k = expectIdent();
            expect(Tok::Assign, "'='");
            t->fields.emplace_back(k, parseTerm());
            if (cur_.kind == Tok::Comma) {
              advance();
              continue;
            }
            break;
          }
        }
        expect(Tok::RBrace, "'}'");
        return t;
      }
      case Tok::LBracket: {
        advance();
        auto t = std::make_shared<Term>();
        t->kind = Term::Kind::Seq;
        t->pos = p;
        if (cur_.kind != Tok::RBracket) {
          while (true) {
            t->elems.push_back(parseTerm());
            if (cur_.kind == Tok::Comma) {
              advance();
              continue;
            }
            break;
          }
        }
        expect(Tok::RBracket, "']'");
        return t;
      }
      default:
        fail("expression");
    }
  }

  PatternPtr parsePattern() {
    PatternPtr head = parsePatternAtom();
    if (cur_.kind == Tok::ColonColon) {
      SourcePos p = cur_.pos;
      advance();
      PatternPtr tail = parsePattern();
      auto pat = std::make_shared<Pattern>();
      pat->kind = Pattern::Kind::SeqCons;
      pat->pos = p;
      pat->sub = head;
      pat->sub2 = tail;
      return pat;
    }
    return head;
  }

  PatternPtr parsePatternAtom() {
    SourcePos p = cur_.pos;
    auto pat = std::make_shared<Pattern>();
    pat->pos = p;
    switch (cur_.kind) {
      case Tok::Underscore:
        advance();
        pat->kind = Pattern::Kind::Wildcard;
        return pat;
      case Tok::KwTrue:
      case Tok::KwFalse:
        pat->kind = Pattern::Kind::Bool;
        pat->bval = (cur_.kind == Tok::KwTrue);
        advance();
        return pat;
      case Tok::Ident:
        pat->kind = Pattern::Kind::Var;
        pat->name = cur_.text;
        advance();
        return pat;
      case Tok::UpperIdent: {
        pat->kind = Pattern::Kind::Variant;
        pat->name = cur_.text;
        advance();
        pat->sub = parsePatternAtom();
        return pat;
      }
      case Tok::LBracket:
        advance();
        expect(Tok::RBracket, "']' (only the empty sequence pattern is supported)");
        pat->kind = Pattern::Kind::SeqEmpty;
        return pat;
      case Tok::LBrace: {
        advance();
        pat->kind = Pattern::Kind::Record;
        if (cur_.kind != Tok::RBrace) {
          while (true) {
            std::string k = expectIdent();
            expect(Tok::Assign, "'='");
            pat->fields.emplace_back(k, parsePattern());
            if (cur_.kind == Tok::Comma) {
              advance();
              continue;
            }
            break;
          }
        }
        expect(Tok::RBrace, "'}'");
        return pat;
      }
      case Tok::LParen: {
        advance();
        PatternPtr inner = parsePattern();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("pattern");
    }
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace

TermPtr parse(const std::string& source) { return Parser(source).parseProgram(); }

}  // namespace alignppl
