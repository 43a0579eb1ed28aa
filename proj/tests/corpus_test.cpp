#include <gtest/gtest.h>

#include <set>

#include "phi/corpus.hpp"

using namespace phi;

TEST(Corpus, ListsEnoughUniqueEntries) {
  auto entries = list_entries();
  EXPECT_GE(entries.size(), 22u);
  std::set<std::string> ids;
  for (const auto& e : entries) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    EXPECT_FALSE(e.section.empty()) << e.id;
    EXPECT_FALSE(e.notes.empty()) << e.id;
    EXPECT_TRUE(std::filesystem::exists(e.program)) << e.id;
  }
}

TEST(Corpus, EveryEntryPasses) {
  for (const auto& e : list_entries()) {
    EntryVerdict v = check_entry(e, run_entry(e));
    EXPECT_TRUE(v.passed) << e.id << ": " << v.reason;
  }
}

TEST(Corpus, GlobFilter) {
  auto entries = list_entries();
  EXPECT_EQ(filter_entries(entries, "goto-*").size(), 4u);
  EXPECT_TRUE(filter_entries(entries, "no-such-entry").empty());
  EXPECT_EQ(filter_entries(entries, "*").size(), entries.size());
}

TEST(Corpus, RunEntryById) {
  EXPECT_EQ(run_entry("destructors").stdout_bytes, "AliveDead");
  EXPECT_EQ(run_entry("inheritance-prototype").stdout_bytes, "4.2");
  EXPECT_EQ(run_entry("generators").stdout_bytes, "1\n1\n2\n4\n8\n16\n32\n64\n128\n");
  EXPECT_THROW(run_entry("missing-entry"), std::runtime_error);
}

TEST(Corpus, RunErrorsNameTheEntry) {
  EntryRun run = run_entry("types-mismatch");
  EXPECT_EQ(run.execution.exit_code, 1);
  EXPECT_NE(run.execution.diagnostic.find("types-mismatch"), std::string::npos) << run.execution.diagnostic;
}

TEST(Corpus, CheckEntryReportsDifferences) {
  CorpusEntry e = filter_entries(list_entries(), "destructors").at(0);
  EntryRun run = run_entry(e);
  run.stdout_bytes = "Alive";
  EntryVerdict v = check_entry(e, run);
  EXPECT_FALSE(v.passed);
  EXPECT_NE(v.reason.find("stdout"), std::string::npos);
}

TEST(Corpus, DivergentEntryHitsBudget) {
  EntryRun run = run_entry("goto-complex-divergent");
  EXPECT_EQ(run.execution.exit_code, 3);
}
