#ifndef ALIGNPPL_PARSER_HPP
#define ALIGNPPL_PARSER_HPP

#include <string>

#include "alignppl/ast.hpp"

namespace alignppl {

/// Parses a source program (grammar in docs/lang.md). Throws LangError with
/// line/column on malformed input.
TermPtr parse(const std::string& source);

}  // namespace alignppl

#endif
