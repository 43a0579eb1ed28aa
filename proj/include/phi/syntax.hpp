#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phi/data.hpp"

namespace phi {

// Zero-based, inclusive line range inside a source file.
struct SourceSpan {
  std::string file;
  int first_line = 0;
  int last_line = 0;

  std::string str() const;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Binding {
  std::string name;  // empty for unnamed top-level objects
  bool constant = false;
  TermPtr term;
};

// `[a b args...] > name` with attribute bindings.
struct Formation {
  std::vector<std::string> params;
  bool variadic = false;  // last param collects the remaining arguments
  std::vector<Binding> bindings;
  std::string atom_type;  // `/int` suffix: declared native atom

  const Binding* find(const std::string& name) const;
};

struct Application {
  TermPtr head;
  std::vector<TermPtr> args;
};

// `receiver.attr`; a null receiver is a lexically scoped name.
// The copy suffix `b'` is attr "'" and the anchor `.<` is attr "<".
struct Dispatch {
  TermPtr receiver;
  std::string attr;
};

struct Literal {
  DataValue value;
};

struct MetaImport {
  std::string path;
};

struct Term {
  using Node = std::variant<Formation, Application, Dispatch, Literal, MetaImport>;

  Node node;
  SourceSpan span;

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }
};

struct Program {
  std::string file;
  int line_count = 0;
  // Top-level objects in source order; meta imports have an empty name.
  std::vector<Binding> items;
};

TermPtr make_term(Term::Node node, SourceSpan span);

// Structural equality ignoring spans.
bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const Program& a, const Program& b);

}  // namespace phi
