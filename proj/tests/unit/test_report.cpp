#include <doctest.h>

#include <cmath>
#include <limits>

#include "csq/error.hpp"
#include "csq/report.hpp"

using namespace csq;
using report::Json;

TEST_SUITE("report") {
  TEST_CASE("doubles keep 17 digits") {
    const Json j{{"a", 0.1}, {"b", 1.0 / 3.0}, {"n", 3}, {"bad", std::nan("")},
                 {"inf", std::numeric_limits<double>::infinity()}};
    const std::string s = report::dump(j, 0);
    CHECK(s == "{\"a\":0.10000000000000001,\"b\":0.33333333333333331,\"n\":3,\"bad\":null,"
               "\"inf\":null}\n");
    const Json back = Json::parse(s);
    CHECK(back["b"].get<double>() == 1.0 / 3.0);
  }

  TEST_CASE("tables") {
    report::Table t{{"n", "error"}, {}};
    t.add({4, 0.25});
    t.add({8, 0.125});
    CHECK(t.to_csv() == "n,error\n4,0.25\n8,0.125\n");
    CHECK_THROWS_AS(t.add({1}), ConfigError);
    CHECK(t.to_json()["rows"].size() == 2);
  }

  TEST_CASE("overall status") {
    report::Report r;
    CHECK_FALSE(r.pass());
    r.suites.push_back({"a", true, Json::object(), {}, {}});
    CHECK(r.pass());
    r.suites.push_back({"b", false, Json::object(), {}, {}});
    CHECK_FALSE(r.pass());
    const Json j = r.to_json();
    CHECK(j["suites"][1]["status"] == "fail");
    CHECK(j["pass"] == false);
  }
}
