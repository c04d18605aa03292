// Acceptance run: one line per criterion, full profile. Nonzero exit if any fails.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gclab/lab.hpp"
#include "gclab/reports.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "gclab_acceptance";
  fs::create_directories(scratch);

  gclab::lab::SuiteOptions opts;
  opts.profile = "full";
  const auto summary = gclab::lab::suite_run(opts, scratch);

  for (const auto& c : summary.criteria) {
    std::printf("[%s] criterion %2d  %-52s %7.2fs\n", c.passed ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
    for (const auto& k : c.checks) {
      if (!k.passed) {
        std::printf("        failed: %s  value=%s  threshold=%s %s\n", k.name.c_str(),
                    gclab::format_double(k.value).c_str(), gclab::format_double(k.threshold).c_str(),
                    k.detail.c_str());
      }
    }
    if (!c.error.empty()) std::printf("        error: %s\n", c.error.c_str());
  }
  std::printf("%s: %zu criteria in %.2fs\n", summary.all_passed ? "ALL PASS" : "FAILURES", summary.criteria.size(),
              summary.seconds);
  gclab::write_file_atomic((scratch / "acceptance.md").string(), summary.markdown());
  return summary.all_passed ? 0 : 1;
}
