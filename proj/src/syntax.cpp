#include "phi/syntax.hpp"

namespace phi {

std::string SourceSpan::str() const {
  return file + ":" + std::to_string(first_line) + "-" + std::to_string(last_line);
}

const Binding* Formation::find(const std::string& name) const {
  for (const auto& b : bindings) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

TermPtr make_term(Term::Node node, SourceSpan span) {
  return std::make_shared<const Term>(Term{std::move(node), std::move(span)});
}

namespace {

bool equal_ptr(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool equal_bindings(const std::vector<Binding>& a, const std::vector<Binding>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].constant != b[i].constant) return false;
    if (!equal_ptr(a[i].term, b[i].term)) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* fa = a.as<Formation>()) {
    auto* fb = b.as<Formation>();
    return fa->params == fb->params && fa->variadic == fb->variadic &&
           fa->atom_type == fb->atom_type && equal_bindings(fa->bindings, fb->bindings);
  }
  if (auto* aa = a.as<Application>()) {
    auto* ab = b.as<Application>();
    if (!equal_ptr(aa->head, ab->head) || aa->args.size() != ab->args.size()) return false;
    for (std::size_t i = 0; i < aa->args.size(); ++i) {
      if (!equal_ptr(aa->args[i], ab->args[i])) return false;
    }
    return true;
  }
  if (auto* da = a.as<Dispatch>()) {
    auto* db = b.as<Dispatch>();
    return da->attr == db->attr && equal_ptr(da->receiver, db->receiver);
  }
  if (auto* la = a.as<Literal>()) return la->value == b.as<Literal>()->value;
  return a.as<MetaImport>()->path == b.as<MetaImport>()->path;
}

bool structurally_equal(const Program& a, const Program& b) {
  return equal_bindings(a.items, b.items);
}

}  // namespace phi
