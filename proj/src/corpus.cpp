#include "phi/corpus.hpp"

#include <fnmatch.h>

#include <fstream>
#include "json.hpp"
#include <sstream>
#include <stdexcept>

#ifndef PHI_SOURCE_DIR
#define PHI_SOURCE_DIR "."
#endif

namespace phi {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DataValue value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return DataValue(j.get<bool>());
  if (j.is_number_integer()) return DataValue(j.get<std::int64_t>());
  if (j.is_number_float()) return DataValue(j.get<double>());
  if (j.is_string()) return DataValue(j.get<std::string>());
  throw std::runtime_error("unsupported expected value " + j.dump());
}

}  // namespace

std::filesystem::path default_corpus_dir() { return std::filesystem::path(PHI_SOURCE_DIR) / "corpus"; }

std::vector<CorpusEntry> list_entries(const std::filesystem::path& dir) {
  nlohmann::json index = nlohmann::json::parse(slurp(dir / "index.json"));
  std::vector<CorpusEntry> entries;
  for (const auto& item : index.at("entries")) {
    CorpusEntry e;
    e.id = item.at("id").get<std::string>();
    e.section = item.at("section").get<std::string>();
    std::filesystem::path base = dir / e.id;
    e.program = base / "program.phi";
    e.expected_stdout = slurp(base / "expected.txt");
    if (std::filesystem::exists(base / "NOTES.md")) e.notes = slurp(base / "NOTES.md");
    if (item.contains("value")) e.expected_value = value_from_json(item["value"]);
    e.expected_exit = item.value("exit", 0);
    e.stderr_contains = item.value("stderr-contains", std::string());
    e.check_stdout = item.value("check-stdout", true);
    e.source_name = item.value("source-name", std::string());
    e.config.traceability = item.value("traceability", false);
    e.config.max_steps = item.value("max-steps", e.config.max_steps);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<CorpusEntry> filter_entries(const std::vector<CorpusEntry>& entries, const std::string& glob) {
  std::vector<CorpusEntry> out;
  for (const auto& e : entries) {
    if (fnmatch(glob.c_str(), e.id.c_str(), 0) == 0) out.push_back(e);
  }
  return out;
}

EntryRun run_entry(const CorpusEntry& entry) {
  std::string source = slurp(entry.program);
  std::string name = entry.source_name.empty() ? entry.program.string() : entry.source_name;
  std::ostringstream out, err;
  EntryRun run;
  run.execution = execute(source, name, entry.config, out, err);
  run.stdout_bytes = out.str();
  run.stderr_bytes = err.str();
  return run;
}

EntryRun run_entry(const std::string& id, const std::filesystem::path& dir) {
  for (const auto& e : list_entries(dir)) {
    if (e.id == id) return run_entry(e);
  }
  throw std::runtime_error("no corpus entry '" + id + "'");
}

EntryVerdict check_entry(const CorpusEntry& entry, const EntryRun& run) {
  EntryVerdict v{entry.id, false, ""};
  const Execution& ex = run.execution;
  if (ex.exit_code != entry.expected_exit) {
    v.reason = "exit " + std::to_string(ex.exit_code) + ", expected " + std::to_string(entry.expected_exit);
    if (!ex.diagnostic.empty()) v.reason += " (" + ex.diagnostic + ")";
    return v;
  }
  if (entry.check_stdout && run.stdout_bytes != entry.expected_stdout) {
    v.reason = "stdout differs: got " + quote_string(run.stdout_bytes) + ", expected " +
               quote_string(entry.expected_stdout);
    return v;
  }
  if (!entry.stderr_contains.empty() && run.stderr_bytes.find(entry.stderr_contains) == std::string::npos) {
    v.reason = "stderr lacks " + quote_string(entry.stderr_contains);
    return v;
  }
  if (entry.expected_value && (!ex.value || !(*ex.value == *entry.expected_value))) {
    v.reason = "value " + (ex.value ? ex.value->literal() : std::string("none")) + ", expected " +
               entry.expected_value->literal();
    return v;
  }
  v.passed = true;
  v.reason = "ok";
  return v;
}

}  // namespace phi
