#include <doctest.h>

#include <json.hpp>

#include "connexion/emit.hpp"

using namespace connexion;

namespace {

Output sample_output() {
  Output out;
  out.command = "demo";
  out.config = {{"n", "3"}, {"format", "json"}};
  out.results.push_back({{"label", std::string("plain")},
                         {"n", 1LL},
                         {"ok", true},
                         {"value", Quantity::from_exact(BigRational(3, 4), 20)}});
  out.results.push_back({{"label", std::string("needs \"quotes\", commas")},
                         {"n", 2LL},
                         {"ok", false},
                         {"value", Quantity::from_double(0.1, Provenance::Oracle)}});
  out.checks.push_back(CheckRecord{"x", "a check", true, Quantity::from_double(1e-9, Provenance::Oracle), "<= 1", ""});
  return out;
}

}  // namespace

TEST_CASE("format names") {
  CHECK(parse_format("json") == Format::Json);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("text") == Format::Text);
  CHECK_FALSE(parse_format("xml").has_value());
}

TEST_CASE("JSON carries exact, decimal and provenance for every number") {
  const auto j = nlohmann::json::parse(to_json(sample_output()));
  CHECK(j["command"] == "demo");
  CHECK(j["config"]["n"] == "3");
  REQUIRE(j["results"].size() == 2);
  CHECK(j["results"][0]["value"]["exact"] == "3/4");
  CHECK(j["results"][0]["value"]["decimal"] == "0.75");
  CHECK(j["results"][0]["value"]["provenance"] == "exact");
  CHECK(j["results"][1]["value"]["exact"].is_null());
  CHECK(j["results"][1]["value"]["provenance"] == "oracle");
  CHECK(j["checks"][0]["passed"] == true);
  CHECK(j["checks"][0]["measured"]["decimal"] == "1e-09");
}

TEST_CASE("JSON keeps config keys in insertion order") {
  const std::string text = to_json(sample_output());
  CHECK(text.find("\"n\"") < text.find("\"format\""));
}

TEST_CASE("CSV follows RFC 4180") {
  const std::string csv = to_csv(sample_output());
  CHECK(csv ==
        "label,n,ok,value,value_exact,value_provenance\r\n"
        "plain,1,true,0.75,3/4,exact\r\n"
        "\"needs \"\"quotes\"\", commas\",2,false,0.1,,oracle\r\n");
}

TEST_CASE("CSV falls back to the checks table") {
  Output out = sample_output();
  out.results.clear();
  const std::string csv = to_csv(out);
  CHECK(csv.rfind("id,name,passed,measured,measured_provenance,bound,note\r\n", 0) == 0);
}

TEST_CASE("rendering is deterministic") {
  const Output out = sample_output();
  for (Format f : {Format::Json, Format::Csv, Format::Text}) CHECK(render(out, f) == render(out, f));
}

TEST_CASE("quantities") {
  CHECK(to_string(Provenance::SeriesTruncation) == "series-truncation");
  CHECK(Quantity::from_exact(BigRational(1, 3), 5).decimal == "0.33333");
  CHECK(Quantity::from_double(0.16871221602428704, Provenance::Oracle).decimal == "0.16871221602428704");
  CHECK(Quantity::from_real(Real("0.125"), Provenance::SeriesTruncation, 10).decimal == "0.125");
}
