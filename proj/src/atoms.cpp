#include "phi/atoms.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "phi/runtime.hpp"

namespace phi {

namespace {

DataValue self_data(Runtime& rt, NativeCall& c) { return rt.dataize(c.receiver()); }
DataValue arg_data(Runtime& rt, NativeCall& c, std::size_t i) { return rt.dataize(c.arg(rt, i)); }

[[noreturn]] void mismatch(Runtime& rt, const std::string& op, const DataValue& a, const DataValue& b) {
  rt.fail(ErrorKind::kTypeMismatch,
          "'" + op + "' on " + std::string(a.type_name()) + " and " + std::string(b.type_name()));
}

std::int64_t need_int(Runtime& rt, const DataValue& v, const std::string& what) {
  if (!v.is_int()) rt.fail(ErrorKind::kTypeMismatch, what + " expects Int, got " + std::string(v.type_name()));
  return v.as_int();
}

bool need_bool(Runtime& rt, const DataValue& v, const std::string& what) {
  if (!v.is_bool()) rt.fail(ErrorKind::kTypeMismatch, what + " expects Bool, got " + std::string(v.type_name()));
  return v.as_bool();
}

using IntOp = bool (*)(std::int64_t, std::int64_t, std::int64_t*);

AtomSpec arithmetic(const std::string& name, IntOp int_op, double (*float_op)(double, double)) {
  return {name, 1, 1, false, [name, int_op, float_op](Runtime& rt, NativeCall& c) -> ObjPtr {
            DataValue a = self_data(rt, c);
            DataValue b = arg_data(rt, c, 0);
            if (!a.is_number() || !b.is_number()) mismatch(rt, name, a, b);
            if (a.is_int() && b.is_int()) {
              std::int64_t r;
              if (int_op(a.as_int(), b.as_int(), &r)) {
                rt.fail(ErrorKind::kIntegerOverflow, a.literal() + " " + name + " " + b.literal() + " overflows");
              }
              return rt.data(r);
            }
            return rt.data(float_op(a.to_double(), b.to_double()));
          }};
}

int compare(Runtime& rt, const std::string& op, const DataValue& a, const DataValue& b) {
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    double x = a.to_double(), y = b.to_double();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.is_string() && b.is_string()) return a.as_string().compare(b.as_string()) < 0 ? -1 : (a.as_string() == b.as_string() ? 0 : 1);
  mismatch(rt, op, a, b);
}

std::map<std::string, AtomSpec> build_data_methods() {
  std::map<std::string, AtomSpec> m;
  auto add = [&](AtomSpec s) { m.emplace(s.name, std::move(s)); };

  add(arithmetic(
      "add", [](std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_add_overflow(a, b, r); },
      [](double a, double b) { return a + b; }));
  add(arithmetic(
      "sub", [](std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_sub_overflow(a, b, r); },
      [](double a, double b) { return a - b; }));
  add(arithmetic(
      "mul", [](std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_mul_overflow(a, b, r); },
      [](double a, double b) { return a * b; }));

  add({"div", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue a = self_data(rt, c);
         DataValue b = arg_data(rt, c, 0);
         if (!a.is_number() || !b.is_number()) mismatch(rt, "div", a, b);
         if (b.to_double() == 0.0) rt.fail(ErrorKind::kDivisionByZero, a.literal() + " divided by zero");
         if (a.is_int() && b.is_int()) {
           if (a.as_int() == std::numeric_limits<std::int64_t>::min() && b.as_int() == -1) {
             rt.fail(ErrorKind::kIntegerOverflow, a.literal() + " div -1 overflows");
           }
           return rt.data(a.as_int() / b.as_int());
         }
         return rt.data(a.to_double() / b.to_double());
       }});
  add({"mod", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         std::int64_t a = need_int(rt, self_data(rt, c), "mod");
         std::int64_t b = need_int(rt, arg_data(rt, c, 0), "mod");
         if (b == 0) rt.fail(ErrorKind::kDivisionByZero, std::to_string(a) + " mod zero");
         if (b == -1) return rt.data(std::int64_t{0});
         return rt.data(a % b);
       }});
  add({"eq", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue a = self_data(rt, c);
         DataValue b = arg_data(rt, c, 0);
         if (a.is_number() && b.is_number()) return rt.data(compare(rt, "eq", a, b) == 0);
         return rt.data(a == b);
       }});
  add({"less", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         return rt.data(compare(rt, "less", self_data(rt, c), arg_data(rt, c, 0)) < 0);
       }});
  add({"greater", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         return rt.data(compare(rt, "greater", self_data(rt, c), arg_data(rt, c, 0)) > 0);
       }});
  add({"not", 0, 0, false,
       [](Runtime& rt, NativeCall& c) -> ObjPtr { return rt.data(!need_bool(rt, self_data(rt, c), "not")); }});
  add({"and", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         if (!need_bool(rt, self_data(rt, c), "and")) return rt.data(false);
         return rt.data(need_bool(rt, arg_data(rt, c, 0), "and"));
       }});
  add({"or", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         if (need_bool(rt, self_data(rt, c), "or")) return rt.data(true);
         return rt.data(need_bool(rt, arg_data(rt, c, 0), "or"));
       }});
  add({"as-string", 0, 0, false,
       [](Runtime& rt, NativeCall& c) -> ObjPtr { return rt.data(self_data(rt, c).render()); }});
  add({"as-int", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue v = self_data(rt, c);
         if (v.is_int()) return rt.data(v.as_int());
         if (v.is_bool()) return rt.data(std::int64_t{v.as_bool() ? 1 : 0});
         if (v.is_float()) {
           double t = std::trunc(v.as_float());
           if (!std::isfinite(t) || t < -9.2233720368547758e18 || t >= 9.2233720368547758e18) {
             rt.fail(ErrorKind::kIntegerOverflow, v.literal() + " does not fit in Int");
           }
           return rt.data(static_cast<std::int64_t>(t));
         }
         if (v.is_bytes()) {
           const Bytes& b = v.as_bytes();
           if (b.size() != 8) {
             rt.fail(ErrorKind::kBadArgument, "as-int needs exactly 8 bytes, got " + std::to_string(b.size()));
           }
           std::uint64_t u = 0;
           for (int i = 7; i >= 0; --i) u = (u << 8) | b[static_cast<std::size_t>(i)];
           return rt.data(static_cast<std::int64_t>(u));
         }
         const std::string& s = v.as_string();
         std::int64_t out = 0;
         auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
         if (ec != std::errc() || ptr != s.data() + s.size()) {
           rt.fail(ErrorKind::kBadArgument, v.literal() + " is not an integer");
         }
         return rt.data(out);
       }});
  add({"as-float", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue v = self_data(rt, c);
         if (v.is_number()) return rt.data(v.to_double());
         if (v.is_bytes() && v.as_bytes().size() == 8) {
           std::uint64_t u = 0;
           for (int i = 7; i >= 0; --i) u = (u << 8) | v.as_bytes()[static_cast<std::size_t>(i)];
           return rt.data(std::bit_cast<double>(u));
         }
         rt.fail(ErrorKind::kTypeMismatch, "as-float on " + std::string(v.type_name()));
       }});
  add({"starts", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue a = self_data(rt, c);
         DataValue b = arg_data(rt, c, 0);
         if (!a.is_string() || !b.is_string()) mismatch(rt, "starts", a, b);
         return rt.data(a.as_string().starts_with(b.as_string()));
       }});
  add({"length", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         DataValue v = self_data(rt, c);
         if (v.is_string()) return rt.data(static_cast<std::int64_t>(v.as_string().size()));
         if (v.is_bytes()) return rt.data(static_cast<std::int64_t>(v.as_bytes().size()));
         rt.fail(ErrorKind::kTypeMismatch, "length on " + std::string(v.type_name()));
       }});
  add({"if", 2, 2, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         return c.arg(rt, need_bool(rt, self_data(rt, c), "if") ? 0 : 1);
       }});
  add({"while", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
         ObjPtr body = c.arg(rt, 0);
         for (std::int64_t i = 0; need_bool(rt, self_data(rt, c), "while"); ++i) {
           rt.reduce(rt.apply(body, {rt.data(i)}));
         }
         return rt.data(false);
       }});
  return m;
}

const std::map<std::string, AtomSpec>& data_methods() {
  static const auto table = build_data_methods();
  return table;
}

ObjPtr run_goto(Runtime& rt, NativeCall& c) {
  ObjPtr scope = c.arg(rt, 0);
  auto token = std::make_shared<ScopeToken>(ScopeToken{ScopeToken::Kind::kGoto, rt.next_token_serial(), true});
  struct Expire {
    ScopeToken& t;
    ~Expire() { t.live = false; }
  } expire{*token};
  ObjPtr body = rt.apply(scope, {rt.make<TokenObject>(token)});
  while (true) {
    try {
      return rt.reduce(body);
    } catch (const ControlSignal& s) {
      if (s.token != token) throw;
      if (s.kind == ControlSignal::Kind::kForward) return s.payload ? s.payload : rt.data(true);
      if (s.kind != ControlSignal::Kind::kBackward) throw;
    }
  }
}

ObjPtr run_try(Runtime& rt, NativeCall& c) {
  auto token = std::make_shared<ScopeToken>(ScopeToken{ScopeToken::Kind::kTry, rt.next_token_serial(), true});
  ObjPtr result;
  std::exception_ptr pending;
  try {
    result = rt.reduce(rt.apply(c.arg(rt, 0), {rt.make<TokenObject>(token)}));
  } catch (const ControlSignal& s) {
    token->live = false;
    if (s.token == token) {
      ObjPtr payload = s.payload ? s.payload : rt.data(std::string());
      try {
        result = rt.reduce(rt.apply(c.arg(rt, 1), {payload}));
      } catch (const ControlSignal&) {
        pending = std::current_exception();
      }
    } else {
      pending = std::current_exception();
    }
  }
  token->live = false;
  rt.dataize(c.arg(rt, 2));
  if (pending) std::rethrow_exception(pending);
  return result;
}

TokenObject& token_of(Runtime& rt, NativeCall& c) {
  auto* tok = dynamic_cast<TokenObject*>(c.receiver().get());
  if (!tok->token()->live) rt.fail(ErrorKind::kDeadToken, tok->describe() + " used after its scope ended");
  return *tok;
}

[[noreturn]] void signal(Runtime& rt, NativeCall& c, ControlSignal::Kind kind) {
  TokenObject& tok = token_of(rt, c);
  ObjPtr payload = c.arg_count() > 0 ? rt.reduce(c.arg(rt, 0)) : nullptr;
  throw ControlSignal{kind, tok.token(), payload};
}

std::map<std::string, AtomSpec> build_atoms() {
  std::map<std::string, AtomSpec> m;
  auto add = [&](const std::string& path, AtomSpec s) { m.emplace(path, std::move(s)); };
  add("org.eolang.seq", {"seq", 1, -1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                           for (std::size_t i = 0; i + 1 < c.arg_count(); ++i) rt.reduce(c.arg(rt, i));
                           return c.arg(rt, c.arg_count() - 1);
                         }});
  add("org.eolang.gray.goto", {"goto", 1, 1, false, run_goto});
  add("org.eolang.gray.try", {"try", 3, 3, false, run_try});
  add("org.eolang.io.stdout", {"stdout", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                                 rt.out() << arg_data(rt, c, 0).render();
                                 rt.out().flush();
                                 return rt.data(true);
                               }});
  add("org.eolang.txt.sprintf", {"sprintf", 1, -1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                                   DataValue fmt = arg_data(rt, c, 0);
                                   if (!fmt.is_string()) rt.fail(ErrorKind::kBadFormat, "format must be a String");
                                   std::vector<DataValue> args;
                                   for (std::size_t i = 1; i < c.arg_count(); ++i) args.push_back(arg_data(rt, c, i));
                                   return rt.data(format_text(rt, fmt.as_string(), args));
                                 }});
  add("org.eolang.error", {"error", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                             rt.fail(ErrorKind::kUserError, arg_data(rt, c, 0).render());
                           }});
  add("org.eolang.tuple", {"*", 0, -1, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                             return rt.make<ArrayObject>(c.args());
                           }});
  add("org.eolang.gray.heap.malloc", heap_malloc_spec());
  add("org.eolang.gray.heap.free", heap_free_spec());
  add("org.eolang.gray.heap.pointer", heap_pointer_spec());
  return m;
}

const std::map<std::string, AtomSpec>& atoms() {
  static const auto table = build_atoms();
  return table;
}

// Short names visible from any scope.
const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"seq", "org.eolang.seq"},         {"goto", "org.eolang.gray.goto"},
      {"try", "org.eolang.gray.try"},    {"stdout", "org.eolang.io.stdout"},
      {"sprintf", "org.eolang.txt.sprintf"}, {"error", "org.eolang.error"},
      {"*", "org.eolang.tuple"},         {"memory", "org.eolang.memory"},
      {"cage", "org.eolang.gray.cage"},  {"heap", "org.eolang.gray.heap"},
  };
  return table;
}

std::string canonical(const std::string& name) {
  auto it = aliases().find(name);
  return it == aliases().end() ? name : it->second;
}

}  // namespace

const AtomSpec* data_method(const std::string& name) {
  auto it = data_methods().find(name);
  return it == data_methods().end() ? nullptr : &it->second;
}

const AtomSpec* atom_by_name(const std::string& name) {
  auto it = atoms().find(canonical(name));
  return it == atoms().end() ? nullptr : &it->second;
}

bool is_package(const std::string& path) {
  std::string p = canonical(path);
  return p == "org" || p == "org.eolang" || p == "org.eolang.gray" || p == "org.eolang.io" ||
         p == "org.eolang.txt" || p == "org.eolang.gray.heap";
}

ObjPtr instantiate_builtin(Runtime& rt, const std::string& path) {
  std::string p = canonical(path);
  if (p == "org.eolang.memory") return rt.make<MemoryObject>();
  if (p == "org.eolang.gray.cage") return rt.make<CageObject>();
  if (is_package(p)) return rt.make<PackageObject>(p);
  if (const AtomSpec* spec = atom_by_name(p)) return rt.make<NativeCall>(*spec, nullptr);
  return nullptr;
}

const AtomSpec& memory_write_spec() {
  static const AtomSpec spec{"write", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               DataValue v = arg_data(rt, c, 0);
                               dynamic_cast<MemoryObject&>(*c.receiver()).set(v);
                               return rt.data(v);
                             }};
  return spec;
}

const AtomSpec& cage_write_spec() {
  static const AtomSpec spec{"write", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               dynamic_cast<CageObject&>(*c.receiver()).set(c.arg(rt, 0));
                               return rt.data(true);
                             }};
  return spec;
}

const AtomSpec& anchor_spec() {
  static const AtomSpec spec{"<", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               dynamic_cast<SnapshotObject&>(*c.receiver()).anchor(rt);
                               return rt.data(true);
                             }};
  return spec;
}

const AtomSpec& array_get_spec() {
  static const AtomSpec spec{"get", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& arr = dynamic_cast<ArrayObject&>(*c.receiver());
                               std::int64_t i = need_int(rt, arg_data(rt, c, 0), "get");
                               if (i < 0 || static_cast<std::size_t>(i) >= arr.size()) {
                                 rt.fail(ErrorKind::kIndexOutOfRange, "index " + std::to_string(i) +
                                                                          " outside array of " +
                                                                          std::to_string(arr.size()));
                               }
                               return arr.at(rt, static_cast<std::size_t>(i));
                             }};
  return spec;
}

const AtomSpec& array_each_spec() {
  static const AtomSpec spec{"each", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& arr = dynamic_cast<ArrayObject&>(*c.receiver());
                               ObjPtr fn = c.arg(rt, 0);
                               for (std::size_t i = 0; i < arr.size(); ++i) rt.reduce(rt.apply(fn, {arr.at(rt, i)}));
                               return rt.data(true);
                             }};
  return spec;
}

const AtomSpec& array_length_spec() {
  static const AtomSpec spec{"length", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& arr = dynamic_cast<ArrayObject&>(*c.receiver());
                               return rt.data(static_cast<std::int64_t>(arr.size()));
                             }};
  return spec;
}

const AtomSpec& subtype_of_spec() {
  static const AtomSpec spec{"subtype-of", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& home = dynamic_cast<HomeObject&>(*c.receiver());
                               DataValue t = arg_data(rt, c, 0);
                               return rt.data(t.is_string() && t.as_string() == home.type());
                             }};
  return spec;
}

const AtomSpec& jump_forward_spec() {
  static const AtomSpec spec{"forward", 0, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               signal(rt, c, ControlSignal::Kind::kForward);
                             }};
  return spec;
}

const AtomSpec& jump_backward_spec() {
  static const AtomSpec spec{"backward", 0, 0, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               signal(rt, c, ControlSignal::Kind::kBackward);
                             }};
  return spec;
}

const AtomSpec& throw_spec() {
  static const AtomSpec spec{"throw", 0, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               signal(rt, c, ControlSignal::Kind::kThrown);
                             }};
  return spec;
}

std::string format_text(Runtime& rt, const std::string& format, const std::vector<DataValue>& args) {
  std::string out;
  std::size_t next = 0;
  auto take = [&](char conv) -> const DataValue& {
    if (next >= args.size()) rt.fail(ErrorKind::kBadFormat, std::string("missing argument for %") + conv);
    return args[next++];
  };
  for (std::size_t i = 0; i < format.size(); ++i) {
    char ch = format[i];
    if (ch != '%') {
      out += ch;
      continue;
    }
    if (++i >= format.size()) rt.fail(ErrorKind::kBadFormat, "format ends with '%'");
    char conv = format[i];
    switch (conv) {
      case '%': out += '%'; break;
      case 'd': {
        const DataValue& v = take(conv);
        if (!v.is_int()) rt.fail(ErrorKind::kBadFormat, "%d expects Int, got " + std::string(v.type_name()));
        out += std::to_string(v.as_int());
        break;
      }
      case 'x': {
        const DataValue& v = take(conv);
        if (!v.is_int()) rt.fail(ErrorKind::kBadFormat, "%x expects Int, got " + std::string(v.type_name()));
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, static_cast<std::uint64_t>(v.as_int()), 16);
        out.append(buf, res.ptr);
        break;
      }
      case 'f': {
        const DataValue& v = take(conv);
        if (!v.is_number()) rt.fail(ErrorKind::kBadFormat, "%f expects a number, got " + std::string(v.type_name()));
        out += format_double(v.to_double());
        break;
      }
      case 's': out += take(conv).render(); break;
      default: rt.fail(ErrorKind::kBadFormat, std::string("unsupported conversion %") + conv);
    }
  }
  if (next != args.size()) {
    rt.fail(ErrorKind::kBadFormat, std::to_string(args.size() - next) + " unused argument(s)");
  }
  return out;
}

}  // namespace phi
