#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "criteria.hpp"

// Usage: acceptance [id...]. Runs every criterion when no ids are given.
int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0') {
      std::fprintf(stderr, "usage: %s [criterion id...]\n", argv[0]);
      return 2;
    }
    wanted.insert(static_cast<int>(id));
  }
  int failed = 0;
  int ran = 0;
  for (const auto& c : acceptance::criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    acceptance::Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] C%d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
