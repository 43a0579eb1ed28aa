#include <algorithm>

#include "phi/atoms.hpp"
#include "phi/runtime.hpp"

namespace phi {

ObjPtr Thunk::force(Runtime& rt) {
  if (!value_) {
    value_ = rt.evaluate(term_, scope_);
    scope_.reset();
  }
  return value_;
}

void Thunk::clear() {
  scope_.reset();
  value_.reset();
}

ObjPtr Object::own(Runtime&, const std::string&) { return nullptr; }

ObjPtr Object::delegate(Runtime&) { return nullptr; }

ObjPtr Object::apply(Runtime& rt, std::vector<ThunkPtr> args) {
  if (args.empty()) return shared_from_this();
  rt.fail(ErrorKind::kTooManyArguments, describe() + " takes no arguments");
}

std::string_view ControlSignal::kind_name() const {
  switch (kind) {
    case Kind::kForward: return "forward jump";
    case Kind::kBackward: return "backward jump";
    case Kind::kThrown: return "thrown exception";
  }
  return "signal";
}

// --- data -------------------------------------------------------------------

std::string DataObject::describe() const { return "data " + value_.literal(); }

ObjPtr DataObject::own(Runtime& rt, const std::string& name) {
  if (name == "&") return rt.make<HomeObject>(std::string(value_.type_name()));
  if (const AtomSpec* spec = data_method(name)) return rt.make<NativeCall>(*spec, shared_from_this());
  return nullptr;
}

// --- formations ---------------------------------------------------------------

FormationObject::FormationObject(TermPtr term, ObjPtr parent, ObjPtr home, std::string label)
    : term_(std::move(term)), parent_(std::move(parent)), home_(std::move(home)), label_(std::move(label)) {}

bool FormationObject::defines(const std::string& name) const {
  const Formation& f = formation();
  return f.find(name) != nullptr || std::find(f.params.begin(), f.params.end(), name) != f.params.end();
}

std::size_t FormationObject::unbound_params() const {
  const Formation& f = formation();
  std::size_t fixed = f.variadic ? f.params.size() - 1 : f.params.size();
  return args_.size() >= fixed ? 0 : fixed - args_.size();
}

std::string FormationObject::source_text() const {
  const Binding* b = formation().find("source");
  if (!b) return {};
  const Literal* lit = b->term->as<Literal>();
  if (!lit || !lit->value.is_string()) return {};
  return lit->value.as_string();
}

std::string FormationObject::describe() const {
  std::string out = "formation " + (label_.empty() ? std::string("[]") : label_);
  if (!formation().params.empty()) {
    out += " (" + std::to_string(std::min(args_.size(), formation().params.size())) + "/" +
           std::to_string(formation().params.size()) + " bound)";
  }
  return out;
}

ObjPtr FormationObject::param(Runtime& rt, std::size_t index) {
  const Formation& f = formation();
  std::size_t fixed = f.variadic ? f.params.size() - 1 : f.params.size();
  if (index < fixed) {
    if (index >= args_.size()) {
      rt.fail(ErrorKind::kUnboundParam, "parameter '" + f.params[index] + "' of " + describe() + " is not bound");
    }
    return args_[index]->force(rt);
  }
  const std::string& name = f.params[index];
  auto it = attrs_.find(name);
  if (it != attrs_.end()) return it->second;
  std::vector<ThunkPtr> rest;
  for (std::size_t i = fixed; i < args_.size(); ++i) rest.push_back(args_[i]);
  ObjPtr arr = rt.make<ArrayObject>(std::move(rest));
  attrs_[name] = arr;
  return arr;
}

ObjPtr FormationObject::own(Runtime& rt, const std::string& name) {
  if (name == "^") {
    if (!parent_) rt.fail(ErrorKind::kParentOfRoot, "'^' taken on the root object");
    return parent_;
  }
  if (name == "&") {
    if (!home_) rt.fail(ErrorKind::kParentOfRoot, "'&' taken on the root object");
    return home_;
  }
  if (name == "$") return shared_from_this();
  const Formation& f = formation();
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (f.params[i] == name) return param(rt, i);
  }
  for (std::size_t i = 0; i < f.bindings.size(); ++i) {
    const Binding& b = f.bindings[i];
    if (b.name != name) continue;
    if (b.constant) {
      auto memo = memo_.find(name);
      if (memo != memo_.end()) return memo->second;
      ObjPtr value = rt.reduce(rt.materialize(*this, i));
      memo_[name] = value;
      return value;
    }
    auto it = attrs_.find(name);
    if (it != attrs_.end()) return it->second;
    ObjPtr value = rt.materialize(*this, i);
    attrs_[name] = value;
    return value;
  }
  if (root_ && is_package(name)) return instantiate_builtin(rt, name);
  return nullptr;
}

ObjPtr FormationObject::delegate(Runtime& rt) {
  if (!has_decoratee()) return nullptr;
  return own(rt, "@");
}

ObjPtr FormationObject::apply(Runtime& rt, std::vector<ThunkPtr> args) {
  const Formation& f = formation();
  if (!f.variadic && args_.size() + args.size() > f.params.size()) {
    rt.fail(ErrorKind::kTooManyArguments, describe() + " expects " + std::to_string(f.params.size()) +
                                              " argument(s), got " + std::to_string(args_.size() + args.size()));
  }
  auto copy = rt.make<FormationObject>(term_, parent_, home_, label_);
  copy->args_ = args_;
  copy->args_.insert(copy->args_.end(), args.begin(), args.end());
  return copy;
}

ObjPtr FormationObject::step(Runtime& rt) {
  if (std::size_t missing = unbound_params()) {
    rt.fail(ErrorKind::kUnboundParam,
            describe() + " dataized with " + std::to_string(missing) + " unbound parameter(s)");
  }
  if (has_decoratee()) return own(rt, "@");
  if (!formation().atom_type.empty()) {
    rt.fail(ErrorKind::kNoNativeImplementation, describe() + " is a declared atom without a native implementation");
  }
  return nullptr;
}

void FormationObject::clear() {
  parent_.reset();
  home_.reset();
  args_.clear();
  attrs_.clear();
  memo_.clear();
}

std::shared_ptr<FormationObject> FormationObject::shallow_copy(Runtime& rt) const {
  auto copy = rt.make<FormationObject>(term_, parent_, home_, label_);
  copy->root_ = root_;
  copy->args_ = args_;
  copy->attrs_ = attrs_;
  copy->memo_ = memo_;
  return copy;
}

// --- native calls --------------------------------------------------------------

NativeCall::NativeCall(const AtomSpec& spec, ObjPtr receiver, std::vector<ThunkPtr> args)
    : spec_(&spec), receiver_(std::move(receiver)), args_(std::move(args)) {}

ObjPtr NativeCall::arg(Runtime& rt, std::size_t i) const { return args_.at(i)->force(rt); }

std::string NativeCall::describe() const {
  std::string out = "atom " + spec_->name;
  if (receiver_) out += " of #" + std::to_string(receiver_->id());
  return out;
}

ObjPtr NativeCall::delegate(Runtime& rt) { return step(rt); }

ObjPtr NativeCall::apply(Runtime& rt, std::vector<ThunkPtr> args) {
  if (spec_->max_args >= 0 && args_.size() + args.size() > static_cast<std::size_t>(spec_->max_args)) {
    rt.fail(ErrorKind::kTooManyArguments, "'" + spec_->name + "' takes at most " + std::to_string(spec_->max_args) +
                                              " argument(s), got " + std::to_string(args_.size() + args.size()));
  }
  auto copy = rt.make<NativeCall>(*spec_, receiver_, args_);
  copy->args_.insert(copy->args_.end(), args.begin(), args.end());
  copy->aux = aux;
  return copy;
}

ObjPtr NativeCall::step(Runtime& rt) {
  if (args_.size() < static_cast<std::size_t>(spec_->min_args)) {
    rt.fail(ErrorKind::kWrongArity, "'" + spec_->name + "' needs " + std::to_string(spec_->min_args) +
                                        " argument(s), got " + std::to_string(args_.size()));
  }
  if (spec_->constructor) {
    if (!product_) product_ = spec_->run(rt, *this);
    return product_;
  }
  return spec_->run(rt, *this);
}

bool NativeCall::lazy_methods() const { return !spec_->constructor; }

void NativeCall::clear() {
  receiver_.reset();
  args_.clear();
  product_.reset();
}

// --- cells ----------------------------------------------------------------------

std::string MemoryObject::describe() const {
  return slot_ ? "memory " + slot_->literal() : std::string("memory (empty)");
}

ObjPtr MemoryObject::own(Runtime& rt, const std::string& name) {
  if (name == "write") return rt.make<NativeCall>(memory_write_spec(), shared_from_this());
  return nullptr;
}

const DataValue& MemoryObject::get() const {
  if (!slot_) throw RuntimeError(ErrorKind::kUninitializedMemory, "memory read before its first write");
  return *slot_;
}

ObjPtr MemoryObject::step(Runtime& rt) { return rt.data(get()); }

std::string CageObject::describe() const {
  return slot_ ? "cage holding #" + std::to_string(slot_->id()) : std::string("cage (empty)");
}

ObjPtr CageObject::own(Runtime& rt, const std::string& name) {
  if (name == "write") return rt.make<NativeCall>(cage_write_spec(), shared_from_this());
  return nullptr;
}

ObjPtr CageObject::apply(Runtime& rt, std::vector<ThunkPtr> args) { return content()->apply(rt, std::move(args)); }

ObjPtr CageObject::content() const {
  if (!slot_) throw RuntimeError(ErrorKind::kEmptyCage, "cage used before its first write");
  return slot_;
}

std::string SnapshotObject::describe() const {
  return captured_ ? "snapshot of #" + std::to_string(captured_->id()) : std::string("snapshot (not anchored)");
}

ObjPtr SnapshotObject::own(Runtime& rt, const std::string& name) {
  if (name == "<") return rt.make<NativeCall>(anchor_spec(), shared_from_this());
  return nullptr;
}

ObjPtr SnapshotObject::apply(Runtime& rt, std::vector<ThunkPtr> args) {
  return captured(rt)->apply(rt, std::move(args));
}

void SnapshotObject::anchor(Runtime& rt) { captured_ = rt.snapshot(source_); }

ObjPtr SnapshotObject::captured(Runtime& rt) {
  if (!captured_) anchor(rt);
  return captured_;
}

void SnapshotObject::clear() {
  source_.reset();
  captured_.reset();
}

// --- misc -------------------------------------------------------------------------

std::string ArrayObject::describe() const { return "array of " + std::to_string(items_.size()); }

ObjPtr ArrayObject::own(Runtime& rt, const std::string& name) {
  if (name == "get") return rt.make<NativeCall>(array_get_spec(), shared_from_this());
  if (name == "each") return rt.make<NativeCall>(array_each_spec(), shared_from_this());
  if (name == "length") return rt.make<NativeCall>(array_length_spec(), shared_from_this());
  return nullptr;
}

ObjPtr PackageObject::own(Runtime& rt, const std::string& name) {
  return instantiate_builtin(rt, path_ + "." + name);
}

ObjPtr HomeObject::own(Runtime& rt, const std::string& name) {
  if (name == "subtype-of") return rt.make<NativeCall>(subtype_of_spec(), shared_from_this());
  return nullptr;
}

std::string TokenObject::describe() const {
  return std::string(token_->kind == ScopeToken::Kind::kGoto ? "goto token #" : "throw token #") +
         std::to_string(token_->serial);
}

ObjPtr TokenObject::own(Runtime& rt, const std::string& name) {
  if (token_->kind != ScopeToken::Kind::kGoto) return nullptr;
  if (name == "forward") return rt.make<NativeCall>(jump_forward_spec(), shared_from_this());
  if (name == "backward") return rt.make<NativeCall>(jump_backward_spec(), shared_from_this());
  return nullptr;
}

ObjPtr TokenObject::apply(Runtime& rt, std::vector<ThunkPtr> args) {
  if (token_->kind != ScopeToken::Kind::kTry) {
    rt.fail(ErrorKind::kBadArgument, "a goto token is not applicable; use .forward or .backward");
  }
  return rt.make<NativeCall>(throw_spec(), shared_from_this())->apply(rt, std::move(args));
}

ObjPtr TokenObject::step(Runtime& rt) {
  if (token_->kind != ScopeToken::Kind::kTry) {
    rt.fail(ErrorKind::kBadArgument, "a goto token cannot be dataized; use .forward or .backward");
  }
  return rt.make<NativeCall>(throw_spec(), shared_from_this());
}

}  // namespace phi
