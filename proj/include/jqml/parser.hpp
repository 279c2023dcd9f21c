#pragma once

#include "jqml/ast.hpp"

#include <string>
#include <string_view>

namespace jqml {

/// Throws LEX_ERROR or PARSE_ERROR (with the expected tokens in the message).
Module parse_module(std::string_view text);

/// Parses a single expression (no prolog).
Expr parse_expression(std::string_view text);

/// Source text that parses back to a structurally equal tree.
std::string print_module(const Module& module);
std::string print_expr(const Expr& expr);
std::string print_sequence_type(const SequenceType& type);

}  // namespace jqml
