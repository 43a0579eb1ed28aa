#pragma once

#include <optional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "phi/runtime.hpp"

namespace phi::testing {

struct Outcome {
  int exit = 0;
  std::string out;
  std::string err;
  std::optional<DataValue> value;
};

inline Outcome run_program(const std::string& source, RunConfig config = {}, const std::string& file = "test.phi") {
  std::ostringstream out, err;
  Execution ex = execute(source, file, config, out, err);
  return {ex.exit_code, out.str(), err.str(), ex.value};
}

// Value of a program whose entry must dataize without error.
inline DataValue value_of(const std::string& source, RunConfig config = {}) {
  Outcome o = run_program(source, config);
  if (o.exit != 0 || !o.value) throw std::runtime_error("program failed: " + o.err);
  return *o.value;
}

}  // namespace phi::testing

namespace phi::testing {

// Program exits 1 and the diagnostic names the error kind.
inline ::testing::AssertionResult fails_with(const std::string& source, const std::string& kind) {
  Outcome o = run_program(source);
  if (o.exit != 1) return ::testing::AssertionFailure() << "exit " << o.exit << ", stderr: " << o.err;
  if (o.err.find(kind) == std::string::npos) return ::testing::AssertionFailure() << "stderr: " << o.err;
  return ::testing::AssertionSuccess();
}

}  // namespace phi::testing
