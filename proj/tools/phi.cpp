#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phi/corpus.hpp"
#include "phi/runtime.hpp"

namespace {

int run_file(const std::string& path, phi::RunConfig config, const std::string& source_name, bool print) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot open file\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();
  phi::Execution ex = phi::execute(text.str(), source_name.empty() ? path : source_name, config, std::cout, std::cerr);
  if (print && ex.value) std::cout << ex.value->render() << '\n';
  return ex.exit_code;
}

int run_corpus(const std::string& glob, const std::string& dir) {
  std::vector<phi::CorpusEntry> entries;
  try {
    entries = phi::filter_entries(phi::list_entries(dir), glob);
  } catch (const std::exception& e) {
    std::cerr << "corpus: " << e.what() << '\n';
    return 2;
  }
  int failed = 0;
  for (const auto& entry : entries) {
    phi::EntryVerdict v = phi::check_entry(entry, phi::run_entry(entry));
    if (!v.passed) ++failed;
    std::cout << std::left << std::setw(28) << v.id << (v.passed ? "PASS  " : "FAIL  ") << v.reason << '\n';
  }
  std::cout << entries.size() - failed << "/" << entries.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter for a small object calculus"};
  app.require_subcommand(1);

  phi::RunConfig config;
  std::string file, source_name, glob = "*", corpus_dir = phi::default_corpus_dir().string(), expr;
  bool print = false;

  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-steps", config.max_steps, "Dataization step budget")->check(CLI::PositiveNumber);
    cmd->add_option("--heap-size", config.heap_size, "Simulated heap size in bytes")->check(CLI::Range(16LL, 1LL << 34));
    cmd->add_flag("--trace", config.trace, "Print every dataization step to stderr");
    cmd->add_flag("--traceability", config.traceability, "Attach source spans to formations");
  };

  auto* run = app.add_subcommand("run", "Dataize a program file");
  run->add_option("file", file, "Program file")->required();
  run->add_option("--source-name", source_name, "File name reported in spans and diagnostics");
  run->add_flag("--print", print, "Print the final value");
  add_limits(run);

  auto* corpus = app.add_subcommand("corpus", "Run the feature corpus against its goldens");
  corpus->add_option("glob", glob, "Entry id glob");
  corpus->add_option("--corpus-dir", corpus_dir, "Corpus directory");

  auto* eval = app.add_subcommand("eval", "Dataize an expression and print its value");
  eval->add_option("expr", expr, "Expression")->required();
  add_limits(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) return run_file(file, config, source_name, print);
  if (*corpus) return run_corpus(glob, corpus_dir);
  phi::Execution ex = phi::execute(expr, "<eval>", config, std::cout, std::cerr);
  if (ex.value) std::cout << ex.value->render() << '\n';
  return ex.exit_code;
}
