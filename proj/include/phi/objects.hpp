#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phi/data.hpp"
#include "phi/syntax.hpp"

namespace phi {

class Runtime;
class Object;
using ObjPtr = std::shared_ptr<Object>;

// A lazily evaluated argument: a term plus the scope it was written in, or an
// already computed object. Forcing evaluates the term once; it does not
// dataize it.
class Thunk {
 public:
  Thunk(TermPtr term, ObjPtr scope) : term_(std::move(term)), scope_(std::move(scope)) {}
  explicit Thunk(ObjPtr value) : value_(std::move(value)) {}

  ObjPtr force(Runtime& rt);
  void clear();

 private:
  TermPtr term_;
  ObjPtr scope_;
  ObjPtr value_;
};
using ThunkPtr = std::shared_ptr<Thunk>;

class Object : public std::enable_shared_from_this<Object> {
 public:
  virtual ~Object() = default;

  std::uint64_t id() const { return id_; }
  virtual std::string describe() const = 0;

  // Attribute defined at this level, or nullptr.
  virtual ObjPtr own(Runtime& rt, const std::string& name);
  // Where attribute search continues when own() misses; nullptr ends it.
  virtual ObjPtr delegate(Runtime& rt);
  // Copy with more arguments bound.
  virtual ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args);
  // One dataization step: the next object, or nullptr if this one is final.
  virtual ObjPtr step(Runtime& rt) = 0;
  // Data operations (add, if, ...) bind to this object without reducing it.
  virtual bool lazy_methods() const { return false; }
  // Drops references so cycles can be collected when the runtime goes away.
  virtual void clear() {}

 private:
  friend class Runtime;
  std::uint64_t id_ = 0;
};

// Terminal datum.
class DataObject final : public Object {
 public:
  explicit DataObject(DataValue v) : value_(std::move(v)) {}
  const DataValue& value() const { return value_; }
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime&) override { return nullptr; }

 private:
  DataValue value_;
};

// A formation closure: the object written as `[params] > name`, or a copy of
// it with some arguments bound.
class FormationObject final : public Object {
 public:
  FormationObject(TermPtr term, ObjPtr parent, ObjPtr home, std::string label);

  const Formation& formation() const { return *term_->as<Formation>(); }
  const TermPtr& term() const { return term_; }
  const std::string& label() const { return label_; }
  const ObjPtr& parent() const { return parent_; }
  const ObjPtr& home() const { return home_; }
  bool is_root() const { return root_; }
  void mark_root() { root_ = true; }

  // True when `name` is a param or binding of this formation.
  bool defines(const std::string& name) const;
  bool has_decoratee() const { return formation().find("@") != nullptr; }
  std::size_t unbound_params() const;
  // Literal `source` binding, if any.
  std::string source_text() const;

  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr delegate(Runtime& rt) override;
  ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args) override;
  ObjPtr step(Runtime& rt) override;
  void clear() override;

  // Shallow copy sharing already materialized attributes.
  std::shared_ptr<FormationObject> shallow_copy(Runtime& rt) const;

 private:
  ObjPtr param(Runtime& rt, std::size_t index);

  TermPtr term_;
  ObjPtr parent_;
  ObjPtr home_;
  std::string label_;
  bool root_ = false;
  std::vector<ThunkPtr> args_;
  std::map<std::string, ObjPtr> attrs_;
  std::map<std::string, ObjPtr> memo_;
};

struct AtomSpec;

// Application of a native atom: a spec, an optional receiver and arguments.
class NativeCall final : public Object {
 public:
  NativeCall(const AtomSpec& spec, ObjPtr receiver, std::vector<ThunkPtr> args = {});

  const AtomSpec& spec() const { return *spec_; }
  const ObjPtr& receiver() const { return receiver_; }
  std::size_t arg_count() const { return args_.size(); }
  ObjPtr arg(Runtime& rt, std::size_t i) const;
  const std::vector<ThunkPtr>& args() const { return args_; }

  // Extra native state (e.g. record offset of a heap block).
  std::int64_t aux = 0;

  std::string describe() const override;
  ObjPtr delegate(Runtime& rt) override;
  ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args) override;
  ObjPtr step(Runtime& rt) override;
  bool lazy_methods() const override;
  void clear() override;

 private:
  const AtomSpec* spec_;
  ObjPtr receiver_;
  std::vector<ThunkPtr> args_;
  ObjPtr product_;
};

using NativeFn = std::function<ObjPtr(Runtime&, NativeCall&)>;

struct AtomSpec {
  std::string name;
  int min_args = 0;
  int max_args = 0;  // -1: variadic
  // Constructors produce their result once per call object and cache it.
  bool constructor = false;
  NativeFn run;
};

// Memory cell holding a datum.
class MemoryObject final : public Object {
 public:
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr delegate(Runtime& rt) override { return step(rt); }
  ObjPtr step(Runtime& rt) override;
  bool lazy_methods() const override { return true; }

  bool empty() const { return !slot_.has_value(); }
  const DataValue& get() const;
  void set(DataValue v) { slot_ = std::move(v); }

 private:
  std::optional<DataValue> slot_;
};

// Cell holding an object, unevaluated.
class CageObject final : public Object {
 public:
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr delegate(Runtime&) override { return content(); }
  ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args) override;
  ObjPtr step(Runtime&) override { return content(); }
  void clear() override { slot_.reset(); }

  ObjPtr content() const;
  bool empty() const { return !slot_; }
  void set(ObjPtr o) { slot_ = std::move(o); }

 private:
  ObjPtr slot_;
};

// `b'`: a snapshot of `source`, taken on `.<` or on first use.
class SnapshotObject final : public Object {
 public:
  explicit SnapshotObject(ObjPtr source) : source_(std::move(source)) {}
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr delegate(Runtime& rt) override { return captured(rt); }
  ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args) override;
  ObjPtr step(Runtime& rt) override { return captured(rt); }
  void clear() override;

  void anchor(Runtime& rt);
  ObjPtr captured(Runtime& rt);

 private:
  ObjPtr source_;
  ObjPtr captured_;
};

class ArrayObject final : public Object {
 public:
  explicit ArrayObject(std::vector<ThunkPtr> items) : items_(std::move(items)) {}
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime&) override { return nullptr; }
  void clear() override { items_.clear(); }

  std::size_t size() const { return items_.size(); }
  ObjPtr at(Runtime& rt, std::size_t i) const { return items_[i]->force(rt); }

 private:
  std::vector<ThunkPtr> items_;
};

// `Q.org.eolang...` namespace path.
class PackageObject final : public Object {
 public:
  explicit PackageObject(std::string path) : path_(std::move(path)) {}
  std::string describe() const override { return "package " + path_; }
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime&) override { return nullptr; }

 private:
  std::string path_;
};

// Built-in home of a datum: answers `subtype-of` for its primitive type.
class HomeObject final : public Object {
 public:
  explicit HomeObject(std::string type) : type_(std::move(type)) {}
  std::string describe() const override { return "home " + type_; }
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime&) override { return nullptr; }
  const std::string& type() const { return type_; }

 private:
  std::string type_;
};

// Identity of one goto or try scope.
struct ScopeToken {
  enum class Kind { kGoto, kTry };
  Kind kind;
  std::uint64_t serial;
  bool live = true;
};

// `g` inside a goto scope or the throw object inside a try scope.
class TokenObject final : public Object {
 public:
  explicit TokenObject(std::shared_ptr<ScopeToken> token) : token_(std::move(token)) {}
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr apply(Runtime& rt, std::vector<ThunkPtr> args) override;
  ObjPtr step(Runtime& rt) override;
  const std::shared_ptr<ScopeToken>& token() const { return token_; }

 private:
  std::shared_ptr<ScopeToken> token_;
};

// Non-local outcome travelling outward through dataization.
struct ControlSignal {
  enum class Kind { kForward, kBackward, kThrown };
  Kind kind;
  std::shared_ptr<ScopeToken> token;
  ObjPtr payload;  // may be null

  std::string_view kind_name() const;
};

}  // namespace phi
