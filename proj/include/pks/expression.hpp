#pragma once

#include <string>

#include "pks/measures.hpp"

namespace pks {

/// Parses a function of the intensity `s`.
///
///   expr    := or
///   or      := and ('||' and)*
///   and     := cmp ('&&' cmp)*
///   cmp     := sum (('<'|'<='|'>'|'>='|'=='|'!=') sum)?
///   sum     := product (('+'|'-') product)*
///   product := unary (('*'|'/') unary)*
///   unary   := ('-'|'!') unary | power
///   power   := atom ('^' unary)?
///   atom    := number | 's' | 'pi' | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Comparisons and logic yield 0 or 1. Functions: exp log sqrt abs min max
/// floor ceil ind (ind(x) = 1 if x != 0). Example: "ind(s>0) + 0.25*ind(s==0)".
/// Throws ParameterError with the column of the first problem.
ScalarFn parse_function(const std::string& text);

/// Parses a constant expression (no `s`).
double parse_number(const std::string& text);

}  // namespace pks
