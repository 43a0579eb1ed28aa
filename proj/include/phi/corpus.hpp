#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phi/runtime.hpp"

namespace phi {

struct CorpusEntry {
  std::string id;
  std::string section;
  std::filesystem::path program;
  std::string expected_stdout;
  std::optional<DataValue> expected_value;
  std::string notes;
  // Run options; most entries use the defaults.
  RunConfig config;
  std::string source_name;  // file name used for spans; defaults to the program path
  int expected_exit = 0;
  std::string stderr_contains;
  bool check_stdout = true;
};

struct EntryRun {
  std::string stdout_bytes;
  std::string stderr_bytes;
  Execution execution;
};

struct EntryVerdict {
  std::string id;
  bool passed = false;
  std::string reason;
};

// Directory holding index.json; PHI_CORPUS_DIR at build time.
std::filesystem::path default_corpus_dir();

// Entries in index order. Throws std::runtime_error on a malformed index.
std::vector<CorpusEntry> list_entries(const std::filesystem::path& dir = default_corpus_dir());

// Entries whose id matches a shell-style glob.
std::vector<CorpusEntry> filter_entries(const std::vector<CorpusEntry>& entries, const std::string& glob);

EntryRun run_entry(const CorpusEntry& entry);
EntryRun run_entry(const std::string& id, const std::filesystem::path& dir = default_corpus_dir());

// Compares a run against the entry's goldens.
EntryVerdict check_entry(const CorpusEntry& entry, const EntryRun& run);

}  // namespace phi
