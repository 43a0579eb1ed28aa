#pragma once

#include <string>

#include "phi/objects.hpp"

namespace phi {

// Data operations available on every datum: add, sub, mul, div, mod, eq,
// less, greater, not, and, or, as-string, as-int, as-float, starts, length,
// if, while.
const AtomSpec* data_method(const std::string& name);

// Atom reachable by short name (`seq`, `goto`, ...) or by its full
// `org.eolang...` path; nullptr when unknown.
const AtomSpec* atom_by_name(const std::string& name);

// True for package prefixes such as `org.eolang.gray`.
bool is_package(const std::string& path);

// Creates the object a built-in name denotes: stateful cells are fresh per
// evaluation, the rest are unapplied native calls.
ObjPtr instantiate_builtin(Runtime& rt, const std::string& path);

const AtomSpec& memory_write_spec();
const AtomSpec& cage_write_spec();
const AtomSpec& anchor_spec();
const AtomSpec& array_get_spec();
const AtomSpec& array_each_spec();
const AtomSpec& array_length_spec();
const AtomSpec& subtype_of_spec();
const AtomSpec& jump_forward_spec();
const AtomSpec& jump_backward_spec();
const AtomSpec& throw_spec();

// printf-style formatting with %d %s %f %x %%.
std::string format_text(Runtime& rt, const std::string& format, const std::vector<DataValue>& args);

}  // namespace phi
