#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phi/objects.hpp"

namespace phi {

// Simulated random-access memory. Addresses below capacity() are offsets of
// malloc'd blocks; addresses at or above it are absolute addresses served by
// a translation window created on first use.
class HeapStore {
 public:
  static constexpr std::int64_t kWindowSize = 4096;

  explicit HeapStore(std::int64_t capacity);

  std::int64_t capacity() const { return static_cast<std::int64_t>(bytes_.size()); }

  // First-fit allocation; returns the base address.
  std::int64_t allocate(std::int64_t size);
  void release(std::int64_t base);
  bool is_live(std::int64_t base) const;

  // Makes an absolute address readable, creating the window if needed.
  void map_absolute(std::int64_t address);

  void read(std::int64_t address, std::span<std::uint8_t> out) const;
  void write(std::int64_t address, std::span<const std::uint8_t> in);

 private:
  struct Block {
    std::int64_t base;
    std::int64_t length;
    bool live;
  };
  struct Window {
    std::int64_t absolute_base;
    std::int64_t offset;
  };

  // Byte offset inside bytes_ for [address, address + length).
  std::int64_t translate(std::int64_t address, std::int64_t length) const;

  std::vector<std::uint8_t> bytes_;
  std::vector<Block> blocks_;
  std::optional<Window> window_;
};

// Simulated address with the size of the pointed-to element.
struct PointerValue {
  std::int64_t address = 0;
  std::int64_t stride = 1;

  PointerValue add(std::int64_t k) const;
  PointerValue sub(std::int64_t k) const { return add(-k); }
  friend bool operator==(const PointerValue&, const PointerValue&) = default;
};

class PointerObject final : public Object {
 public:
  explicit PointerObject(PointerValue p) : value_(p) {}
  const PointerValue& value() const { return value_; }
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime& rt) override;

 private:
  PointerValue value_;
};

class AllocationObject final : public Object {
 public:
  AllocationObject(std::int64_t base, std::int64_t size) : base_(base), size_(size) {}
  std::int64_t base() const { return base_; }
  std::int64_t size() const { return size_; }
  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr step(Runtime& rt) override;

 private:
  std::int64_t base_;
  std::int64_t size_;
};

// `length` bytes at base + offset, decoded by a one-parameter formation.
class BlockViewObject final : public Object {
 public:
  BlockViewObject(PointerValue base, std::int64_t offset, std::int64_t length, ObjPtr decoder)
      : base_(base), offset_(offset), length_(length), decoder_(std::move(decoder)) {}

  std::int64_t address() const { return base_.address + offset_; }
  std::int64_t offset() const { return offset_; }
  std::int64_t length() const { return length_; }

  Bytes read(Runtime& rt) const;
  void write(Runtime& rt, const DataValue& v) const;

  std::string describe() const override;
  ObjPtr own(Runtime& rt, const std::string& name) override;
  ObjPtr delegate(Runtime& rt) override { return step(rt); }
  ObjPtr step(Runtime& rt) override;
  bool lazy_methods() const override { return true; }
  void clear() override { decoder_.reset(); }

 private:
  PointerValue base_;
  std::int64_t offset_;
  std::int64_t length_;
  ObjPtr decoder_;
};

// Encodes a datum the way block writes store it: integers and floats as 8
// little-endian bytes, strings as UTF-8, booleans as one byte.
Bytes encode_datum(const DataValue& v);

// Atoms reachable as Q.org.eolang.gray.heap.{malloc,free,pointer}.
const AtomSpec& heap_malloc_spec();
const AtomSpec& heap_free_spec();
const AtomSpec& heap_pointer_spec();

}  // namespace phi
