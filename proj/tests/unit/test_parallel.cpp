#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lightray/parallel.hpp"

using namespace lightray;

TEST_CASE("parallel_for covers every index once") {
  for (int threads : {1, 2, 5}) {
    set_thread_count(threads);
    CHECK(thread_count() == threads);
    for (std::size_t count : {0u, 1u, 7u, 1000u}) {
      std::vector<int> hits(count, 0);
      parallel_for(count, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      for (int h : hits) CHECK(h == 1);
    }
  }
  set_thread_count(1);
}

TEST_CASE("exceptions propagate") {
  set_thread_count(3);
  CHECK_THROWS(parallel_for(100, [](std::size_t b, std::size_t e) {
    if (b <= 50 && 50 < e) throw std::runtime_error("boom");
  }));
  set_thread_count(1);
}
