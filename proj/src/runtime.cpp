#include "phi/runtime.hpp"

#include <pthread.h>

#include <algorithm>
#include <exception>
#include <ostream>

#include "phi/atoms.hpp"
#include "phi/parser.hpp"

namespace phi {

namespace {

// Lowest stack address the interpreter may reach on this thread; the rest
// is left for native frames below the last guard.
const char* stack_floor() {
  thread_local const char* floor = [] {
    pthread_attr_t attr;
    void* addr = nullptr;
    std::size_t size = 0;
    pthread_getattr_np(pthread_self(), &attr);
    pthread_attr_getstack(&attr, &addr, &size);
    pthread_attr_destroy(&attr);
    return static_cast<const char*>(addr) + std::min<std::size_t>(size / 4, 1 << 20);
  }();
  return floor;
}

struct Guard {
  int& counter;
  Guard(int& c, const Runtime& rt) : counter(c) {
    if (static_cast<const char*>(__builtin_frame_address(0)) < stack_floor()) {
      rt.fail(ErrorKind::kRecursionDepth, "program nests too deeply for the interpreter stack");
    }
    ++counter;
  }
  ~Guard() { --counter; }
};

const Term* site_head(const Term& t) {
  if (const auto* app = t.as<Application>()) return app->head.get();
  return &t;
}

}  // namespace

Runtime::Runtime(RunConfig config, std::ostream& out, std::ostream& diag)
    : config_(config), out_(out), diag_(diag), heap_(config.heap_size) {}

Runtime::~Runtime() {
  root_.reset();
  for (auto& weak : registry_) {
    if (auto obj = weak.lock()) obj->clear();
  }
}

void Runtime::track(const ObjPtr& obj) {
  obj->id_ = ++next_id_;
  registry_.push_back(obj);
  if (registry_.size() >= registry_mark_) {
    std::erase_if(registry_, [](const std::weak_ptr<Object>& w) { return w.expired(); });
    registry_mark_ = std::max<std::size_t>(1024, registry_.size() * 2);
  }
}

void Runtime::fail(ErrorKind kind, const std::string& message) const { throw RuntimeError(kind, message); }

ObjPtr Runtime::data(DataValue v) { return make<DataObject>(std::move(v)); }

void Runtime::load(const Program& source) {
  Program program = source;
  if (config_.traceability) {
    std::size_t before = warnings_.size();
    program = attach_source(source, warnings_);
    for (std::size_t i = before; i < warnings_.size(); ++i) diag_ << warnings_[i] << "\n";
  }
  Formation top;
  unnamed_.clear();
  last_name_.reset();
  for (const Binding& item : program.items) {
    if (item.term->as<MetaImport>()) continue;
    if (item.name.empty()) {
      unnamed_.push_back(item.term);
      last_name_.reset();
    } else {
      top.bindings.push_back(item);
      last_name_ = item.name;
    }
  }
  root_ = make<FormationObject>(make_term(std::move(top), SourceSpan{program.file, 0, 0}), nullptr, nullptr, "Q");
  root_->mark_root();
}

ObjPtr Runtime::entry() {
  if (!root_) fail(ErrorKind::kBadArgument, "no program loaded");
  for (const char* name : {"main", "app"}) {
    if (root_->defines(name)) return resolve(root_, name);
  }
  if (last_name_) return resolve(root_, *last_name_);
  if (!unnamed_.empty()) return evaluate(unnamed_.back(), root_);
  fail(ErrorKind::kBadArgument, "program defines no objects");
}

DataValue Runtime::run() {
  try {
    return dataize(entry());
  } catch (const ControlSignal& s) {
    fail(ErrorKind::kEscapingSignal, std::string(s.kind_name()) + " escaped its scope");
  }
}

ObjPtr Runtime::resolve(const ObjPtr& obj, const std::string& name) {
  Guard guard(nesting_, *this);
  ObjPtr cur = obj;
  while (true) {
    if (ObjPtr found = cur->own(*this, name)) return found;
    if (cur->lazy_methods()) {
      if (const AtomSpec* spec = data_method(name)) return make<NativeCall>(*spec, cur);
    }
    ObjPtr next = cur->delegate(*this);
    if (!next) fail(ErrorKind::kAttributeNotFound, "'" + name + "' not found in " + obj->describe());
    tick(next);
    cur = std::move(next);
  }
}

ObjPtr Runtime::apply(const ObjPtr& obj, std::vector<ObjPtr> args) {
  std::vector<ThunkPtr> thunks;
  thunks.reserve(args.size());
  for (auto& a : args) thunks.push_back(std::make_shared<Thunk>(std::move(a)));
  return obj->apply(*this, std::move(thunks));
}

void Runtime::tick(const ObjPtr& obj) {
  if (++steps_ > config_.max_steps) throw BudgetExhausted(config_.max_steps);
  if (!config_.trace) return;
  diag_ << std::string(static_cast<std::size_t>(std::max(depth_ - 1, 0)) * 2, ' ') << '#' << obj->id() << ' ' << obj->describe();
  if (auto* f = dynamic_cast<FormationObject*>(obj.get())) {
    std::string src = f->source_text();
    if (!src.empty()) diag_ << " @ " << src;
  }
  diag_ << '\n';
}

ObjPtr Runtime::reduce(ObjPtr obj) {
  Guard guard(depth_, *this);
  while (true) {
    tick(obj);
    ObjPtr next = obj->step(*this);
    if (!next) return obj;
    obj = std::move(next);
  }
}

DataValue Runtime::dataize(const ObjPtr& obj) {
  ObjPtr result = reduce(obj);
  if (auto* d = dynamic_cast<DataObject*>(result.get())) return d->value();
  fail(ErrorKind::kMissingDecoratee, result->describe() + " has no '@' and is not data");
}

DataizeOutcome Runtime::dataize_outcome(const ObjPtr& obj) {
  try {
    return dataize(obj);
  } catch (const ControlSignal& s) {
    return s;
  }
}

ObjPtr Runtime::snapshot(const ObjPtr& obj) {
  if (auto* cage = dynamic_cast<CageObject*>(obj.get())) return snapshot(cage->content());
  if (auto* snap = dynamic_cast<SnapshotObject*>(obj.get())) return snapshot(snap->captured(*this));
  if (auto* f = dynamic_cast<FormationObject*>(obj.get())) return f->shallow_copy(*this);
  if (auto* mem = dynamic_cast<MemoryObject*>(obj.get())) {
    auto copy = make<MemoryObject>();
    if (!mem->empty()) copy->set(mem->get());
    return copy;
  }
  return obj;
}

bool Runtime::subtype_check(const ObjPtr& value, const std::string& type_name) {
  ObjPtr home = resolve(value, "&");
  ObjPtr check = apply(resolve(home, "subtype-of"), {data(type_name)});
  DataValue v = dataize(check);
  if (!v.is_bool()) fail(ErrorKind::kTypeMismatch, "subtype-of must answer a Bool");
  return v.as_bool();
}

ObjPtr Runtime::evaluate(const TermPtr& term, const ObjPtr& scope, const std::string& label) {
  Guard guard(nesting_, *this);
  if (term->as<Formation>()) return make<FormationObject>(term, scope, scope, label);
  if (const auto* app = term->as<Application>()) {
    ObjPtr head = evaluate(app->head, scope);
    std::vector<ThunkPtr> args;
    args.reserve(app->args.size());
    for (const auto& a : app->args) args.push_back(std::make_shared<Thunk>(a, scope));
    return head->apply(*this, std::move(args));
  }
  if (const auto* d = term->as<Dispatch>()) {
    if (!d->receiver) return lookup(scope, d->attr);
    ObjPtr recv = evaluate(d->receiver, scope);
    if (d->attr == "'") return make<SnapshotObject>(recv);
    const BindingSite* saved = active_site_;
    active_site_ = (!sites_.empty() && sites_.back().first == term.get()) ? &sites_.back().second : nullptr;
    try {
      ObjPtr found = resolve(recv, d->attr);
      active_site_ = saved;
      return found;
    } catch (...) {
      active_site_ = saved;
      throw;
    }
  }
  if (const auto* lit = term->as<Literal>()) return data(lit->value);
  return data(true);
}

ObjPtr Runtime::lookup(const ObjPtr& scope, const std::string& name) {
  if (name == "Q") return root_;
  if (name == "$") return scope;
  if (name == "^" || name == "&" || name == "@") return resolve(scope, name);
  for (ObjPtr s = scope; s;) {
    auto* f = dynamic_cast<FormationObject*>(s.get());
    if (!f) break;
    if (f->defines(name)) return f->own(*this, name);
    s = f->parent();
  }
  if (ObjPtr b = builtin(name)) return b;
  fail(ErrorKind::kUnknownName, "'" + name + "' is not defined");
}

ObjPtr Runtime::builtin(const std::string& name) { return instantiate_builtin(*this, name); }

ObjPtr Runtime::materialize(FormationObject& instance, std::size_t index) {
  const Binding& b = instance.formation().bindings[index];
  ObjPtr self = instance.shared_from_this();
  sites_.emplace_back(site_head(*b.term), BindingSite{&instance, index});
  try {
    ObjPtr result = evaluate(b.term, self, b.name);
    sites_.pop_back();
    return result;
  } catch (...) {
    sites_.pop_back();
    throw;
  }
}

namespace {

Execution execute_here(std::string_view source, const std::string& file, const RunConfig& config, std::ostream& out,
                       std::ostream& diag) {
  Execution ex;
  Program program;
  try {
    program = parse_program(source, file);
  } catch (const ParseError& e) {
    ex.exit_code = 2;
    ex.diagnostic = e.what();
    diag << e.what() << '\n';
    return ex;
  }
  Runtime rt(config, out, diag);
  try {
    rt.load(program);
    ex.value = rt.run();
  } catch (const BudgetExhausted& e) {
    ex.exit_code = 3;
    ex.diagnostic = e.what();
  } catch (const RuntimeError& e) {
    ex.exit_code = 1;
    ex.diagnostic = file + ": runtime error: " + e.what();
  }
  out.flush();
  if (!ex.diagnostic.empty()) diag << ex.diagnostic << '\n';
  ex.steps = rt.steps();
  return ex;
}

struct ExecuteJob {
  std::string_view source;
  const std::string& file;
  const RunConfig& config;
  std::ostream& out;
  std::ostream& diag;
  Execution result;
  std::exception_ptr failure;
};

void* execute_job(void* raw) {
  auto* job = static_cast<ExecuteJob*>(raw);
  try {
    job->result = execute_here(job->source, job->file, job->config, job->out, job->diag);
  } catch (...) {
    job->failure = std::current_exception();
  }
  return nullptr;
}

constexpr std::size_t kProgramStack = std::size_t{512} << 20;

}  // namespace

Execution execute(std::string_view source, const std::string& file, const RunConfig& config, std::ostream& out,
                  std::ostream& diag) {
  ExecuteJob job{source, file, config, out, diag, {}, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kProgramStack);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, execute_job, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) return execute_here(source, file, config, out, diag);
  pthread_join(thread, nullptr);
  if (job.failure) std::rethrow_exception(job.failure);
  return job.result;
}

}  // namespace phi
