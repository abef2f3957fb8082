#include "property_suites.hpp"

#include <doctest.h>

TEST_CASE("all structural property suites hold") {
  const auto results = convlab::props::run_all_property_suites(1000);
  CHECK(results.size() >= 20);
  for (const auto& r : results) {
    INFO(r.module, ": ", r.name, " -- ", r.first_failure);
    CHECK(r.cases > 0);
    CHECK(r.failures == 0);
  }
}
