#include <gtest/gtest.h>

#include <array>

#include "phi/errors.hpp"
#include "phi/heap.hpp"
#include "support.hpp"

using namespace phi;
using namespace phi::testing;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const RuntimeError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no runtime error";
  return ErrorKind::kUserError;
}

const std::string kLong64 = "[p] > long64\n  p.block > @\n    8\n    [b] (b.as-int > @)\n";
const std::string kHeap = "Q.org.eolang.gray.heap";

}  // namespace

TEST(HeapStore, FirstFitReusesFreedSpace) {
  HeapStore heap(256);
  std::int64_t a = heap.allocate(16);
  std::int64_t b = heap.allocate(16);
  EXPECT_NE(a, b);
  EXPECT_GE(b, a + 16);
  heap.release(a);
  EXPECT_EQ(heap.allocate(8), a);
}

TEST(HeapStore, AllocationErrors) {
  HeapStore heap(64);
  EXPECT_EQ(kind_of([&] { heap.allocate(65); }), ErrorKind::kHeapOutOfCapacity);
  EXPECT_EQ(kind_of([&] { heap.allocate(0); }), ErrorKind::kBadArgument);
  std::int64_t a = heap.allocate(8);
  heap.release(a);
  EXPECT_EQ(kind_of([&] { heap.release(a); }), ErrorKind::kHeapDoubleFree);
}

TEST(HeapStore, ReadWriteAndIsolation) {
  HeapStore heap(64);
  std::int64_t a = heap.allocate(4);
  std::int64_t b = heap.allocate(4);
  std::array<std::uint8_t, 4> one{1, 2, 3, 4}, two{9, 9, 9, 9}, got{};
  heap.write(a, one);
  heap.write(b, two);
  heap.read(a, got);
  EXPECT_EQ(got, one);
  EXPECT_EQ(kind_of([&] { heap.write(a + 2, one); }), ErrorKind::kHeapOutOfBounds);
  heap.release(a);
  EXPECT_EQ(kind_of([&] { heap.read(a, got); }), ErrorKind::kHeapUseAfterFree);
}

TEST(HeapStore, AbsoluteWindow) {
  HeapStore heap(1 << 12);
  std::array<std::uint8_t, 8> bytes{7}, got{};
  EXPECT_EQ(kind_of([&] { heap.read(0x1A76EC09, got); }), ErrorKind::kHeapUnmapped);
  heap.map_absolute(0x1A76EC09);
  heap.write(0x1A76EC09 + 756, bytes);
  heap.read(0x1A76EC09 + 756, got);
  EXPECT_EQ(got, bytes);
}

TEST(PointerValue, ScaledArithmetic) {
  PointerValue p{0x1A76EC09, 108};
  EXPECT_EQ(p.add(7).address, 444002045);
  EXPECT_EQ(p.add(7).stride, 108);
  EXPECT_EQ(p.add(0), p);
  EXPECT_EQ(p.add(5).sub(5), p);
  EXPECT_EQ(kind_of([&] { PointerValue{INT64_MAX - 1, 8}.add(1); }), ErrorKind::kIntegerOverflow);
}

TEST(Heap, PointerArithmeticInPrograms) {
  EXPECT_EQ(value_of(kHeap + ".pointer 0x1A76EC09 108 > p\np.add 7 > q\nq.address\n"), DataValue(444002045));
  EXPECT_EQ(value_of(kHeap + ".pointer 64 8 > p\n(p.add 3).sub 3 > q\nq.address\n"), DataValue(64));
}

TEST(Heap, MallocGivesDisjointCells) {
  const std::string src = kLong64 +
                          "[] > main\n  " + kHeap + ".malloc 16 > stack\n  long64 (stack.pointer 0 8) > b\n"
                          "  long64 (stack.pointer 8 8) > a\n  seq > @\n    b.write 7\n    a.write 42\n    b.add a\n";
  EXPECT_EQ(value_of(src), DataValue(49));
}

TEST(Heap, OneByteRoundtrip) {
  const std::string src =
      "[] > main\n  " + kHeap + ".malloc 1 > m\n  (m.pointer 0 1).block > cell\n    1\n    [b] (b.as-string > @)\n"
      "  seq > @\n    cell.write \"z\"\n    cell\n";
  EXPECT_EQ(value_of(src), DataValue("z"));
}

TEST(Heap, StackProgramReadsSeven) {
  const std::string src = kLong64 +
                          "[] > main\n  seq > @\n    " + kHeap + ".malloc 16 > stack\n"
                          "    long64 (stack.pointer 0 8) > b\n    b.write 7\n    long64 (stack.pointer 8 8) > a\n"
                          "    a.write 42\n    long64 (a.p.sub 1) > ret!\n    " + kHeap + ".free stack\n    ret\n";
  EXPECT_EQ(value_of(src), DataValue(7));
}

TEST(Heap, BlocksPackContiguously) {
  const std::string book =
      "[ptr] > book\n  ptr.block > title\n    100\n    [b] (b.as-string > @)\n"
      "  ptr.block > price\n    8\n    [b] (b.as-int > @)\n";
  const std::string base = book + kHeap + ".malloc 216 > m\nbook (m.pointer 0 108) > b\n";
  EXPECT_EQ(value_of(base + "b.title.offset\n"), DataValue(0));
  EXPECT_EQ(value_of(base + "b.price.offset\n"), DataValue(100));
  const std::string interleaved = base +
                                  "[] > main\n  seq > @\n    b.price.write 256\n    b.title.write \"Object Thinking\"\n"
                                  "    stdout (sprintf \"%d %s\" b.price b.title)\n";
  Outcome o = run_program(interleaved);
  EXPECT_EQ(o.out, "256 Object Thinking") << o.err;
}

TEST(Heap, Errors) {
  EXPECT_TRUE(fails_with("[] > main\n  " + kHeap + ".malloc 2000000 > @\n", "heap-out-of-capacity"));
  EXPECT_TRUE(fails_with("[] > main\n  " + kHeap + ".malloc 0 > @\n", "bad-argument"));
  const std::string freed = "[] > main\n  " + kHeap + ".malloc 8 > m\n  seq > @\n    " + kHeap + ".free m\n    ";
  EXPECT_TRUE(fails_with(freed + kHeap + ".free m\n", "double-free"));
  EXPECT_TRUE(fails_with(kLong64 + freed + "long64 (m.pointer 0 8)\n", "use-after-free"));
  EXPECT_TRUE(fails_with(kLong64 + "[] > main\n  " + kHeap + ".malloc 8 > m\n  long64 (m.pointer 4 8) > @\n",
                         "out-of-bounds"));
  const std::string title = "[] > main\n  " + kHeap + ".malloc 4 > m\n  (m.pointer 0 4).block > t\n    4\n    [b] (b.as-string > @)\n";
  EXPECT_TRUE(fails_with(title + "  t.write \"too long\" > @\n", "string-too-long"));
  const std::string two_params = "[] > main\n  " + kHeap + ".malloc 8 > m\n  (m.pointer 0 8).block > t\n    8\n    [a b] (a > @)\n";
  EXPECT_TRUE(fails_with(two_params + "  seq > @\n    t.write 1\n    t\n", "decoder-arity"));
}
