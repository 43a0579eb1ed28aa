#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phi/data.hpp"
#include "phi/errors.hpp"
#include "phi/heap.hpp"
#include "phi/objects.hpp"
#include "phi/syntax.hpp"

namespace phi {

struct RunConfig {
  long long max_steps = 1'000'000;
  std::int64_t heap_size = 1 << 20;
  bool trace = false;
  bool traceability = false;
};

using DataizeOutcome = std::variant<DataValue, ControlSignal>;

// Where an attribute is being materialized: the instance and binding index.
struct BindingSite {
  FormationObject* instance = nullptr;
  std::size_t index = 0;
};

// One program instance: its root object, heap, output streams and budget.
// Not thread-safe; distinct instances are independent.
class Runtime {
 public:
  Runtime(RunConfig config, std::ostream& out, std::ostream& diag);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // Installs the program's top-level objects under the root. With
  // traceability on, formations first receive synthetic `source` attributes.
  void load(const Program& program);

  std::shared_ptr<FormationObject> root() const { return root_; }
  // `main`, else `app`, else the last top-level object.
  ObjPtr entry();
  // Dataizes entry(); escaping control signals become runtime errors.
  DataValue run();

  // Attribute search: own attributes, then decoratees.
  ObjPtr resolve(const ObjPtr& obj, const std::string& name);
  ObjPtr apply(const ObjPtr& obj, std::vector<ObjPtr> args);
  ObjPtr reduce(ObjPtr obj);
  DataValue dataize(const ObjPtr& obj);
  DataizeOutcome dataize_outcome(const ObjPtr& obj);
  ObjPtr snapshot(const ObjPtr& obj);
  bool subtype_check(const ObjPtr& value, const std::string& type_name);

  // Term evaluation: builds the object a term denotes without dataizing it.
  ObjPtr evaluate(const TermPtr& term, const ObjPtr& scope, const std::string& label = "");
  ObjPtr lookup(const ObjPtr& scope, const std::string& name);
  ObjPtr materialize(FormationObject& instance, std::size_t index);
  const BindingSite* active_site() const { return active_site_; }

  template <typename T, typename... Args>
  std::shared_ptr<T> make(Args&&... args) {
    auto obj = std::make_shared<T>(std::forward<Args>(args)...);
    track(obj);
    return obj;
  }
  ObjPtr data(DataValue v);

  HeapStore& heap() { return heap_; }
  std::ostream& out() { return out_; }
  std::ostream& diag() { return diag_; }
  const RunConfig& config() const { return config_; }
  long long steps() const { return steps_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::uint64_t next_token_serial() { return ++token_serial_; }

  [[noreturn]] void fail(ErrorKind kind, const std::string& message) const;

 private:
  void track(const ObjPtr& obj);
  void tick(const ObjPtr& obj);
  ObjPtr builtin(const std::string& name);

  RunConfig config_;
  std::ostream& out_;
  std::ostream& diag_;
  HeapStore heap_;
  std::shared_ptr<FormationObject> root_;
  std::vector<TermPtr> unnamed_;
  std::optional<std::string> last_name_;
  std::vector<std::weak_ptr<Object>> registry_;
  std::size_t registry_mark_ = 1024;
  std::vector<std::string> warnings_;
  const BindingSite* active_site_ = nullptr;
  // Binding sites being materialized, keyed by the head term of the binding.
  std::vector<std::pair<const Term*, BindingSite>> sites_;
  std::uint64_t next_id_ = 0;
  std::uint64_t token_serial_ = 0;
  long long steps_ = 0;
  int depth_ = 0;
  int nesting_ = 0;
};

// Outcome of running a whole program, as the CLI reports it.
struct Execution {
  int exit_code = 0;  // 0 ok, 1 runtime error, 2 parse error, 3 budget exhausted
  std::optional<DataValue> value;
  std::string diagnostic;
  long long steps = 0;
};

Execution execute(std::string_view source, const std::string& file, const RunConfig& config, std::ostream& out,
                  std::ostream& diag);

}  // namespace phi
