#include <gtest/gtest.h>

#include <random>

#include "phi/corpus.hpp"
#include "phi/heap.hpp"
#include "support.hpp"

using namespace phi;
using namespace phi::testing;

namespace {

constexpr int kCases = 250;

std::string indent(int level) { return std::string(static_cast<std::size_t>(level) * 2, ' '); }

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> ch(32, 126);
  std::string s(len(rng), ' ');
  for (char& c : s) c = static_cast<char>(ch(rng));
  return s;
}

DataValue random_value(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return DataValue(static_cast<std::int64_t>(rng()));
    case 1: return DataValue(std::uniform_real_distribution<double>(-1e6, 1e6)(rng));
    case 2: return DataValue(random_text(rng, 20));
    default: return DataValue(rng() % 2 == 0);
  }
}

// Stops a property after the first failing case so the log stays readable.
#define CHECK_CASE(cond, program)                               \
  do {                                                          \
    if (!(cond)) {                                              \
      ADD_FAILURE() << "case " << i << " failed:\n" << program; \
      return;                                                   \
    }                                                           \
  } while (0)

}  // namespace

TEST(Property, HeapIntRoundtrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < kCases; ++i) {
    auto v = static_cast<std::int64_t>(rng());
    int slot = static_cast<int>(rng() % 4);
    std::string src =
        "[p] > long64\n  p.block > @\n    8\n    [b] (b.as-int > @)\n"
        "[] > main\n  Q.org.eolang.gray.heap.malloc 32 > m\n  long64 (m.pointer " + std::to_string(slot * 8) +
        " 8) > cell\n  seq > @\n    cell.write " + std::to_string(v) + "\n    cell\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue(v), src + o.err);
  }
}

TEST(Property, HeapStringRoundtrip) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < kCases; ++i) {
    int length = 1 + static_cast<int>(rng() % 64);
    std::string text = random_text(rng, static_cast<std::size_t>(length));
    std::string src =
        "[] > main\n  Q.org.eolang.gray.heap.malloc " + std::to_string(length) + " > m\n"
        "  (m.pointer 0 " + std::to_string(length) + ").block > cell\n    " + std::to_string(length) +
        "\n    [b] (b.as-string > @)\n  seq > @\n    cell.write " + quote_string(text) + "\n    cell\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue(text), src + o.err);
  }
}

TEST(Property, MemoryRoundtrip) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < kCases; ++i) {
    DataValue v = random_value(rng);
    std::string src = "[] > main\n  memory > m\n  seq > @\n    m.write " + v.literal() + "\n    m\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == v, src + o.err);
  }
}

TEST(Property, PointerAlgebra) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < kCases; ++i) {
    std::int64_t address = static_cast<std::int64_t>(rng() % (std::int64_t{1} << 40));
    std::int64_t stride = 1 + static_cast<std::int64_t>(rng() % 4096);
    std::int64_t k = static_cast<std::int64_t>(rng() % 2001) - 1000;
    PointerValue p{address, stride};
    CHECK_CASE(p.add(k).sub(k) == p, address);
    CHECK_CASE(p.add(k).address - p.address == k * stride, address);
    std::string ks = std::to_string(k);
    std::string src = "Q.org.eolang.gray.heap.pointer " + std::to_string(address) + " " + std::to_string(stride) +
                      " > p\n[] > main\n  seq > @\n    ((p.add " + ks + ").sub " + ks + ").address.eq p.address\n"
                      "    ((p.add " + ks + ").address.sub p.address).eq (" + ks + ".mul p.stride)\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue(true), src + o.err);
  }
}

TEST(Property, GotoForwardPayloadSkipsDeadCode) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < kCases; ++i) {
    DataValue v = random_value(rng);
    int dead = 1 + static_cast<int>(rng() % 3);
    std::string src = "[] > main\n  memory > c\n  goto > r!\n    [g]\n      seq > @\n        g.forward " + v.literal() + "\n";
    for (int d = 0; d < dead; ++d) src += "        c.write (c.add 1)\n";
    src += "  seq > @\n    c.write 0\n    r\n    if.\n      c.eq 0\n      r\n      \"dead code ran\"\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == v, src + o.err);
  }
}

TEST(Property, TryFinallyRunsOnBothPaths) {
  std::mt19937_64 rng(16);
  int thrown = 0;
  for (int i = 0; i < kCases; ++i) {
    bool raise = rng() % 2 == 0;
    thrown += raise;
    auto payload = static_cast<std::int64_t>(rng() % 100000);
    auto body = static_cast<std::int64_t>(rng() % 100000);
    std::string src =
        "[] > main\n  memory > f\n  try > r!\n    [t]\n      seq > @\n        if.\n          " +
        std::string(raise ? "TRUE" : "FALSE") + "\n          t " + std::to_string(payload) +
        "\n          TRUE\n        " + std::to_string(body) +
        "\n    [e]\n      e.add 1000000 > @\n    f.write 1\n"
        "  seq > @\n    f.write 0\n    r\n    if.\n      f.eq 1\n      r\n      \"finally skipped\"\n";
    DataValue want = raise ? DataValue(payload + 1000000) : DataValue(body);
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == want, src + o.err);
  }
  EXPECT_GT(thrown, 0);
  EXPECT_LT(thrown, kCases);
}

TEST(Property, NestedTokensRouteToOwner) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < kCases; ++i) {
    int depth = 1 + static_cast<int>(rng() % 4);
    std::vector<bool> is_try(static_cast<std::size_t>(depth));
    for (auto&& t : is_try) t = rng() % 2 == 0;
    int target = static_cast<int>(rng() % static_cast<unsigned>(depth));
    std::string payload = "\"hit" + std::to_string(target) + "\"";

    std::string src = "[] > main\n";
    for (int level = 0; level < depth; ++level) {
      std::string s = "s" + std::to_string(level);
      src += indent(1 + 2 * level) + (is_try[level] ? "try" : "goto") + " > @\n";
      src += indent(2 + 2 * level) + "[" + s + "]\n";
    }
    std::string inner = is_try[target] ? "s" + std::to_string(target) + " " + payload
                                       : "s" + std::to_string(target) + ".forward " + payload;
    src += indent(1 + 2 * depth) + "seq > @\n" + indent(2 + 2 * depth) + inner + "\n" + indent(2 + 2 * depth) +
           "\"fell through\"\n";
    for (int level = depth - 1; level >= 0; --level) {
      if (!is_try[level]) continue;
      src += indent(2 + 2 * level) + "[e]\n" + indent(3 + 2 * level) + "sprintf \"%s@try" + std::to_string(level) +
             "\" e > @\n" + indent(2 + 2 * level) + "TRUE\n";
    }
    std::string want = "hit" + std::to_string(target) + (is_try[target] ? "@try" + std::to_string(target) : "");
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue(want), src + o.err + (o.value ? o.value->literal() : ""));
  }
}

TEST(Property, IfEvaluatesOneBranch) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < kCases; ++i) {
    auto x = static_cast<std::int64_t>(rng() % 1000) - 500;
    auto y = static_cast<std::int64_t>(rng() % 1000) - 500;
    std::string src =
        "[] > main\n  memory > a\n  memory > b\n  seq > @\n    a.write 0\n    b.write 0\n    if.\n      " +
        std::to_string(x) + ".less " + std::to_string(y) +
        "\n      a.write (a.add 1)\n      b.write (b.add 1)\n    sprintf \"%d%d\" a b\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue(x < y ? "10" : "01"), src + o.err);
  }
}

TEST(Property, ConstantBindingForcedOnce) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < kCases; ++i) {
    int reads = 1 + static_cast<int>(rng() % 10);
    std::string src =
        "[] > main\n  memory > once\n  memory > every\n  (once.write (once.add 1)).as-int > cached!\n"
        "  every.write (every.add 1) > fresh\n  seq > @\n    once.write 0\n    every.write 0\n";
    for (int r = 0; r < reads; ++r) src += "    cached\n    fresh\n";
    src += "    sprintf \"%d/%d\" once every\n";
    Outcome o = run_program(src);
    CHECK_CASE(o.exit == 0 && o.value == DataValue("1/" + std::to_string(reads)), src + o.err);
  }
}

TEST(Property, CorpusRunsAreDeterministic) {
  std::vector<CorpusEntry> quick;
  for (const auto& e : list_entries()) {
    if (e.expected_exit != 3) quick.push_back(e);
  }
  ASSERT_FALSE(quick.empty());
  std::mt19937_64 rng(20);
  for (int i = 0; i < kCases; ++i) {
    const CorpusEntry& e = quick[rng() % quick.size()];
    EntryRun a = run_entry(e), b = run_entry(e);
    CHECK_CASE(a.stdout_bytes == b.stdout_bytes && a.stderr_bytes == b.stderr_bytes &&
                   a.execution.exit_code == b.execution.exit_code && a.execution.value == b.execution.value &&
                   a.execution.steps == b.execution.steps,
               e.id);
  }
  // The divergent entry stops at the same step every time.
  EntryRun a = run_entry("goto-complex-divergent"), b = run_entry("goto-complex-divergent");
  EXPECT_EQ(a.stdout_bytes, b.stdout_bytes);
  EXPECT_EQ(a.stderr_bytes, b.stderr_bytes);
}
