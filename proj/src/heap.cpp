#include "phi/heap.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "phi/runtime.hpp"

namespace phi {

namespace {

std::string hex(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

HeapStore::HeapStore(std::int64_t capacity) : bytes_(static_cast<std::size_t>(std::max<std::int64_t>(capacity, 0))) {}

std::int64_t HeapStore::allocate(std::int64_t size) {
  if (size <= 0) throw RuntimeError(ErrorKind::kBadArgument, "malloc size must be positive, got " + std::to_string(size));
  std::vector<const Block*> live;
  for (const Block& b : blocks_) {
    if (b.live) live.push_back(&b);
  }
  std::sort(live.begin(), live.end(), [](const Block* a, const Block* b) { return a->base < b->base; });
  std::int64_t cursor = 0;
  for (const Block* b : live) {
    if (b->base - cursor >= size) break;
    cursor = std::max(cursor, b->base + b->length);
  }
  if (cursor + size > capacity()) {
    throw RuntimeError(ErrorKind::kHeapOutOfCapacity, "cannot allocate " + std::to_string(size) + " bytes in a heap of " +
                                                          std::to_string(capacity()));
  }
  std::fill(bytes_.begin() + cursor, bytes_.begin() + cursor + size, 0);
  std::erase_if(blocks_, [&](const Block& b) { return !b.live && b.base >= cursor && b.base < cursor + size; });
  blocks_.push_back({cursor, size, true});
  return cursor;
}

void HeapStore::release(std::int64_t base) {
  for (Block& b : blocks_) {
    if (b.base == base && b.live) {
      b.live = false;
      return;
    }
  }
  for (const Block& b : blocks_) {
    if (b.base == base) throw RuntimeError(ErrorKind::kHeapDoubleFree, "block at " + hex(base) + " freed twice");
  }
  throw RuntimeError(ErrorKind::kBadArgument, hex(base) + " is not the base of an allocation");
}

bool HeapStore::is_live(std::int64_t base) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.live && b.base == base; });
}

void HeapStore::map_absolute(std::int64_t address) {
  if (address < capacity()) return;
  if (window_) {
    if (address >= window_->absolute_base && address < window_->absolute_base + kWindowSize) return;
    throw RuntimeError(ErrorKind::kHeapUnmapped, "absolute address " + hex(address) + " lies outside the mapped window");
  }
  std::int64_t offset = allocate(kWindowSize);
  window_ = Window{std::max(capacity(), address - kWindowSize / 2), offset};
}

std::int64_t HeapStore::translate(std::int64_t address, std::int64_t length) const {
  if (address >= capacity()) {
    if (window_ && address >= window_->absolute_base && address + length <= window_->absolute_base + kWindowSize) {
      return window_->offset + (address - window_->absolute_base);
    }
    throw RuntimeError(ErrorKind::kHeapUnmapped, "address " + hex(address) + " is not mapped");
  }
  if (address < 0) throw RuntimeError(ErrorKind::kHeapOutOfBounds, "negative address " + std::to_string(address));
  for (const Block& b : blocks_) {
    if (b.live && address >= b.base && address < b.base + b.length) {
      if (address + length > b.base + b.length) {
        throw RuntimeError(ErrorKind::kHeapOutOfBounds, std::to_string(length) + " bytes at " + hex(address) +
                                                            " run past the block ending at " +
                                                            hex(b.base + b.length));
      }
      return address;
    }
  }
  for (const Block& b : blocks_) {
    if (!b.live && address >= b.base && address < b.base + b.length) {
      throw RuntimeError(ErrorKind::kHeapUseAfterFree, "address " + hex(address) + " belongs to a freed block");
    }
  }
  throw RuntimeError(ErrorKind::kHeapOutOfBounds, "address " + hex(address) + " is not inside any allocation");
}

void HeapStore::read(std::int64_t address, std::span<std::uint8_t> out) const {
  std::int64_t at = translate(address, static_cast<std::int64_t>(out.size()));
  std::memcpy(out.data(), bytes_.data() + at, out.size());
}

void HeapStore::write(std::int64_t address, std::span<const std::uint8_t> in) {
  std::int64_t at = translate(address, static_cast<std::int64_t>(in.size()));
  std::memcpy(bytes_.data() + at, in.data(), in.size());
}

PointerValue PointerValue::add(std::int64_t k) const {
  std::int64_t delta, next;
  if (__builtin_mul_overflow(k, stride, &delta) || __builtin_add_overflow(address, delta, &next)) {
    throw RuntimeError(ErrorKind::kIntegerOverflow, "pointer arithmetic overflows");
  }
  return {next, stride};
}

Bytes encode_datum(const DataValue& v) {
  auto le = [](std::uint64_t u) {
    Bytes out(8);
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(u >> (8 * i));
    return out;
  };
  if (v.is_int()) return le(static_cast<std::uint64_t>(v.as_int()));
  if (v.is_float()) return le(std::bit_cast<std::uint64_t>(v.as_float()));
  if (v.is_bool()) return Bytes{static_cast<std::uint8_t>(v.as_bool() ? 1 : 0)};
  if (v.is_bytes()) return v.as_bytes();
  return Bytes(v.as_string().begin(), v.as_string().end());
}

namespace {

std::int64_t int_arg(Runtime& rt, NativeCall& c, std::size_t i, const std::string& what) {
  DataValue v = rt.dataize(c.arg(rt, i));
  if (!v.is_int()) rt.fail(ErrorKind::kTypeMismatch, what + " expects Int, got " + std::string(v.type_name()));
  return v.as_int();
}

const Term* block_receiver(const Term& t) {
  const Term* head = &t;
  if (const auto* app = t.as<Application>()) head = app->head.get();
  const auto* d = head->as<Dispatch>();
  if (!d || d->attr != "block" || !d->receiver) return nullptr;
  return d->receiver.get();
}

// Bytes taken by earlier `p.block` bindings of the same formation that use the
// same receiver, so consecutive fields pack one after another.
std::int64_t record_offset(Runtime& rt, const BindingSite& site) {
  const Formation& f = site.instance->formation();
  const Term* mine = block_receiver(*f.bindings[site.index].term);
  if (!mine) return 0;
  ObjPtr scope = site.instance->shared_from_this();
  std::int64_t offset = 0;
  for (std::size_t j = 0; j < site.index; ++j) {
    const Term& t = *f.bindings[j].term;
    const Term* other = block_receiver(t);
    const auto* app = t.as<Application>();
    if (!other || !app || app->args.empty() || !structurally_equal(*other, *mine)) continue;
    DataValue len = rt.dataize(rt.evaluate(app->args[0], scope));
    if (len.is_int()) offset += len.as_int();
  }
  return offset;
}

const AtomSpec& pointer_shift_spec(bool forward) {
  static const AtomSpec add{"add", 1, 1, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                              auto& p = dynamic_cast<PointerObject&>(*c.receiver());
                              return rt.make<PointerObject>(p.value().add(int_arg(rt, c, 0, "add")));
                            }};
  static const AtomSpec sub{"sub", 1, 1, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                              auto& p = dynamic_cast<PointerObject&>(*c.receiver());
                              return rt.make<PointerObject>(p.value().sub(int_arg(rt, c, 0, "sub")));
                            }};
  return forward ? add : sub;
}

const AtomSpec& block_spec() {
  static const AtomSpec spec{"block", 2, 2, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& p = dynamic_cast<PointerObject&>(*c.receiver());
                               std::int64_t len = int_arg(rt, c, 0, "block");
                               if (len <= 0) rt.fail(ErrorKind::kBadArgument, "block length must be positive");
                               return rt.make<BlockViewObject>(p.value(), c.aux, len, c.arg(rt, 1));
                             }};
  return spec;
}

const AtomSpec& block_write_spec() {
  static const AtomSpec spec{"write", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& view = dynamic_cast<BlockViewObject&>(*c.receiver());
                               view.write(rt, rt.dataize(c.arg(rt, 0)));
                               return rt.data(true);
                             }};
  return spec;
}

const AtomSpec& allocation_pointer_spec() {
  static const AtomSpec spec{"pointer", 2, 2, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               auto& a = dynamic_cast<AllocationObject&>(*c.receiver());
                               std::int64_t offset = int_arg(rt, c, 0, "pointer");
                               std::int64_t stride = int_arg(rt, c, 1, "pointer");
                               if (offset < 0 || offset > a.size()) {
                                 rt.fail(ErrorKind::kHeapOutOfBounds, "offset " + std::to_string(offset) +
                                                                          " outside a block of " +
                                                                          std::to_string(a.size()));
                               }
                               if (stride <= 0) rt.fail(ErrorKind::kBadArgument, "stride must be positive");
                               return rt.make<PointerObject>(PointerValue{a.base() + offset, stride});
                             }};
  return spec;
}

}  // namespace

std::string PointerObject::describe() const {
  return "pointer " + hex(value_.address) + " stride " + std::to_string(value_.stride);
}

ObjPtr PointerObject::own(Runtime& rt, const std::string& name) {
  if (name == "add" || name == "sub") return rt.make<NativeCall>(pointer_shift_spec(name == "add"), shared_from_this());
  if (name == "block") {
    auto call = rt.make<NativeCall>(block_spec(), shared_from_this());
    if (const BindingSite* site = rt.active_site()) call->aux = record_offset(rt, *site);
    return call;
  }
  if (name == "address") return rt.data(value_.address);
  if (name == "stride") return rt.data(value_.stride);
  return nullptr;
}

ObjPtr PointerObject::step(Runtime& rt) { return rt.data(value_.address); }

std::string AllocationObject::describe() const {
  return "allocation " + hex(base_) + " of " + std::to_string(size_) + " bytes";
}

ObjPtr AllocationObject::own(Runtime& rt, const std::string& name) {
  if (name == "pointer") return rt.make<NativeCall>(allocation_pointer_spec(), shared_from_this());
  if (name == "size") return rt.data(size_);
  return nullptr;
}

ObjPtr AllocationObject::step(Runtime& rt) { return rt.data(base_); }

Bytes BlockViewObject::read(Runtime& rt) const {
  Bytes out(static_cast<std::size_t>(length_));
  rt.heap().read(address(), out);
  return out;
}

void BlockViewObject::write(Runtime& rt, const DataValue& v) const {
  Bytes enc = encode_datum(v);
  if (static_cast<std::int64_t>(enc.size()) > length_) {
    rt.fail(v.is_string() ? ErrorKind::kStringTooLong : ErrorKind::kBadArgument,
            v.literal() + " needs " + std::to_string(enc.size()) + " bytes, block holds " + std::to_string(length_));
  }
  enc.resize(static_cast<std::size_t>(length_), 0);
  rt.heap().write(address(), enc);
}

std::string BlockViewObject::describe() const {
  return "block " + std::to_string(length_) + " bytes at " + hex(address());
}

ObjPtr BlockViewObject::own(Runtime& rt, const std::string& name) {
  if (name == "write") return rt.make<NativeCall>(block_write_spec(), shared_from_this());
  if (name == "offset") return rt.data(offset_);
  if (name == "length") return rt.data(length_);
  return nullptr;
}

ObjPtr BlockViewObject::step(Runtime& rt) {
  auto* decoder = dynamic_cast<FormationObject*>(decoder_.get());
  if (!decoder || decoder->unbound_params() != 1) {
    rt.fail(ErrorKind::kDecoderArity, "block decoder must be a formation with exactly one free parameter");
  }
  return rt.apply(decoder_, {rt.data(read(rt))});
}

const AtomSpec& heap_malloc_spec() {
  static const AtomSpec spec{"malloc", 1, 1, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               std::int64_t size = int_arg(rt, c, 0, "malloc");
                               return rt.make<AllocationObject>(rt.heap().allocate(size), size);
                             }};
  return spec;
}

const AtomSpec& heap_free_spec() {
  static const AtomSpec spec{"free", 1, 1, false, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               ObjPtr target = rt.reduce(c.arg(rt, 0));
                               std::int64_t base;
                               if (auto* a = dynamic_cast<AllocationObject*>(target.get())) {
                                 base = a->base();
                               } else {
                                 base = int_arg(rt, c, 0, "free");
                               }
                               rt.heap().release(base);
                               return rt.data(true);
                             }};
  return spec;
}

const AtomSpec& heap_pointer_spec() {
  static const AtomSpec spec{"pointer", 2, 2, true, [](Runtime& rt, NativeCall& c) -> ObjPtr {
                               std::int64_t address = int_arg(rt, c, 0, "pointer");
                               std::int64_t stride = int_arg(rt, c, 1, "pointer");
                               if (stride <= 0) rt.fail(ErrorKind::kBadArgument, "stride must be positive");
                               rt.heap().map_absolute(address);
                               return rt.make<PointerObject>(PointerValue{address, stride});
                             }};
  return spec;
}

}  // namespace phi
