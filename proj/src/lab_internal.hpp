#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "gclab/lab.hpp"
#include "gclab/propagators.hpp"

namespace gclab::lab {

nlohmann::json check_json(const Check& c);
std::string utc_timestamp();

struct Context {
  std::filesystem::path out;
  unsigned threads = 1;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  nlohmann::json summary = nlohmann::json::object();

  void check(std::string name, bool passed, double value, double threshold, std::string detail = {}) {
    checks.push_back({std::move(name), passed, value, threshold, std::move(detail)});
  }
  // Full path for an artifact file; records it.
  std::string path(const std::string& file) {
    artifacts.push_back(file);
    return (out / file).string();
  }
};

using Experiment = std::function<void(const RunConfig&, Context&)>;
const std::map<std::string, Experiment>& registry();

Grid1D grid_of(const RunConfig& c, std::size_t n, double L);
cplx z_of(const RunConfig& c, cplx fallback = {0.0, 1.0});
PotentialSpec potential_of(const RunConfig& c);

// Runs fn(i) for i in [0, n) on up to `threads` workers; results are written by
// index so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gclab::lab
