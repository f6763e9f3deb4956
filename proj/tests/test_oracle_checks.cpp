#include "doctest.h"
#include "switchvol/verify.hpp"

using namespace switchvol;

// The fast oracle suites shared with `switchvol verify` and the acceptance
// runner. Each must pass at its stated tolerance.

TEST_CASE("oracle checks 1-6") {
  VerifyOptions opts;
  for (int id = 1; id <= kOracleCheckCount; ++id) {
    const auto r = run_check(id, opts);
    INFO(format_result(r));
    CHECK(r.pass);
  }
}

TEST_CASE("oracle checks under a second seed") {
  VerifyOptions opts;
  opts.seed = 777;
  for (int id = 1; id <= kOracleCheckCount; ++id) {
    const auto r = run_check(id, opts);
    INFO(format_result(r));
    CHECK(r.pass);
  }
}
