#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tslab/states.hpp"
#include "tslab/verifier.hpp"

using namespace tslab;

TEST_CASE("claims suite passes") {
  for (const auto& r : run_suite("claims", 1)) {
    INFO(r.name, ": ", r.details);
    CHECK(r.status == CheckStatus::Pass);
  }
}

TEST_CASE("sampling suite passes") {
  for (const auto& r : run_suite("sampling", 1)) {
    INFO(r.name, ": ", r.details);
    CHECK(r.status == CheckStatus::Pass);
  }
}

TEST_CASE("init suite passes") {
  for (const auto& r : run_suite("init", 1)) {
    INFO(r.name, ": ", r.details);
    CHECK(r.status == CheckStatus::Pass);
  }
}

TEST_CASE("kernels suite passes") {
  for (const auto& r : run_suite("kernels", 1)) {
    INFO(r.name, ": ", r.details);
    CHECK(r.status == CheckStatus::Pass);
  }
}

TEST_CASE("landscape suite has no failures") {
  for (const auto& r : run_suite("landscape", 1)) {
    INFO(r.name, ": ", r.details);
    CHECK(r.status != CheckStatus::Fail);
  }
}

TEST_CASE("suite determinism") {
  const auto a = run_suite("claims", 7);
  const auto b = run_suite("claims", 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].status == b[i].status);
    for (const auto& [key, value] : a[i].measured) {
      CHECK(b[i].measured.at(key) == value);
    }
  }
}

TEST_CASE("unknown suite throws, known names accepted") {
  CHECK(suite_known("all"));
  CHECK(suite_known("landscape"));
  CHECK(!suite_known("bogus"));
  CHECK_THROWS_AS(run_suite("bogus", 1), std::invalid_argument);
}

TEST_CASE("inconclusive statuses surface as such") {
  // a state far above the low-loss threshold makes the landscape checks
  // inconclusive rather than failed
  VerifierConfig cfg;
  const WarmupState ws = make_warmup_state(1.2);  // large delta, large loss
  const CheckReport r = lojasiewicz_check(ws.teacher, {ws.student}, cfg);
  CHECK(r.status == CheckStatus::Inconclusive);
}

TEST_CASE("report json shape") {
  const auto reports = run_suite("claims", 3);
  const std::string json = check_report_json(reports);
  CHECK(json.find("\"name\"") != std::string::npos);
  CHECK(json.find("\"status\"") != std::string::npos);
  CHECK(json.find("\"measured\"") != std::string::npos);
}
