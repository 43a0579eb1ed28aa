#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phi/syntax.hpp"

namespace phi {

// Parses indentation-structured object source. Named objects that appear as
// application arguments become attributes of the nearest enclosing formation
// (or of the program root) and the argument is replaced by a reference.
// Throws ParseError.
Program parse_program(std::string_view text, const std::string& file);

// Returns `term` with a synthetic `source` attribute on every formation.
// A formation that already binds `source` is left alone and a warning is
// appended to `warnings`.
TermPtr attach_source(const TermPtr& term, std::vector<std::string>& warnings);
Program attach_source(const Program& program, std::vector<std::string>& warnings);

// Canonical vertical rendering; parse_program(print_program(p)) is
// structurally equal to p.
std::string print_program(const Program& program);
std::string print_term(const TermPtr& term);

}  // namespace phi
