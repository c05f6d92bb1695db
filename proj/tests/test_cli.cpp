#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "lcdiag/instance.hpp"

using namespace lcdiag;
using nlohmann::json;

namespace {

// The worked two-term instance: f = (x-1/2)y^-1 + (x-1/2)(x-3/4)y^-2, mu = 1.
const char* kTwoTerm = R"({
  "q": 1,
  "seed": 0,
  "pieces": [{
    "f": {"m": 1, "n": 1, "l": 0, "groups": [
      {"label": "g1", "r": ["-1"], "s": [0], "critical": true,
       "coeff": [{"x": [1], "c": "1"}, {"x": [0], "c": "-1/2"}]},
      {"label": "g2", "r": ["-2"], "s": [0], "critical": true,
       "coeff": [{"x": [2], "c": "1"}, {"x": [1], "c": "-5/4"},
                 {"x": [0], "c": "3/8"}]}
    ]},
    "mu": {"m": 1, "n": 1, "l": 0, "groups": [
      {"label": "m", "r": ["0"], "s": [0], "critical": true,
       "coeff": [{"x": [0], "c": "1"}]}
    ]},
    "gamma": ["0"]
  }]
})";

std::string path_of(const InstanceError& e) { return e.path; }

int run_cli(const std::string& args) {
  const int status = std::system(("./lcdiag " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("schema violations report the JSON path") {
  CHECK_THROWS_WITH_AS(parse_instance("{}"), doctest::Contains("$.q"),
                       InstanceError);
  try {
    parse_instance("{}");
  } catch (const InstanceError& e) {
    CHECK(path_of(e) == "$.q");
  }
  CHECK_THROWS_AS(parse_instance("not json"), InstanceError);
  CHECK_THROWS_WITH_AS(parse_instance(R"({"q": "1", "pieces": [{}]})"),
                       doctest::Contains("$.pieces[0].f"), InstanceError);
  CHECK_THROWS_WITH_AS(
      parse_instance(R"({"q": "0"})"), doctest::Contains("positive"),
      InstanceError);
  CHECK_THROWS_WITH_AS(
      parse_instance(R"({"q": "a/b"})"), doctest::Contains("malformed"),
      InstanceError);
}

TEST_CASE("fractional exponents parse exactly") {
  Instance inst = parse_instance(R"({
    "q": "1/2",
    "classify": {"monomials": [{"alpha": "1/3", "beta": 0}]}
  })");
  CHECK(inst.q == Rat(1, 2));
  REQUIRE(inst.classify);
  CHECK(inst.classify->monomials[0].alpha == Rat(1, 3));
}

TEST_CASE("instances round-trip through canonical serialization") {
  Instance a = parse_instance(kTwoTerm);
  json ja = instance_to_json(a);
  Instance b = parse_instance(ja.dump());
  CHECK(instance_to_json(b) == ja);

  // Richer document: cell, map, family, classify, countex sections.
  const char* doc = R"({
    "q": "2", "seed": 7, "mode": "sampled", "points": [["1/3"]],
    "cell": {"n": 2, "l": 0,
             "lower": [{"c": "0", "e": ["0", "0"]},
                       {"c": "1/2", "e": ["1", "0"]}],
             "upper": [{"c": "1", "e": ["0", "0"]},
                       {"c": "1", "e": ["1", "0"]}]},
    "map": {"comps": [{"c": "1", "e": ["1", "1"]}]},
    "family": {"xy_arity": 1, "k": 2,
               "coeffs": [{"alpha": [1, 0], "poly": [{"e": [1], "c": "1"}]}]},
    "classify": {"monomials": [{"alpha": "-1", "beta": 2}],
                 "rects": [{"alpha": ["1", "-1/2"], "beta": [0, 1], "l": 1}]},
    "countex": {"x": ["1/10"],
                "candidates": [{"label": "lead", "g": {"1": [{"e": [0, 0, 0], "c": "1"}]},
                                "t": ["1/4"]}]}
  })";
  Instance c = parse_instance(doc);
  json jc = instance_to_json(c);
  CHECK(instance_to_json(parse_instance(jc.dump())) == jc);
  CHECK(c.mode == CrMode::Sampled);
  REQUIRE(c.cell);
  CHECK(c.cell->lower[1].coeff.base == Rat(1, 2));
}

TEST_CASE("classify command evaluates both query kinds") {
  Instance inst = parse_instance(R"({
    "q": 1,
    "classify": {
      "monomials": [{"alpha": "-1/2", "beta": 3}, {"alpha": "-1", "beta": 0}],
      "rects": [{"alpha": ["-2", "1/2"], "beta": [0, 0], "l": 1}]
    }
  })");
  json r = run("classify", inst);
  CHECK(r["monomials"][0]["integrable"] == true);
  CHECK(r["monomials"][0]["bounded"] == false);
  CHECK(r["monomials"][1]["integrable"] == false);
  // Prefix coordinate ignored: only alpha_2 = 1/2 matters.
  CHECK(r["rects"][0]["integrable"] == true);
  CHECK(r["rects"][0]["bounded"] == true);
}

TEST_CASE("diagram command emits the three-interval report") {
  Instance inst = parse_instance(kTwoTerm);
  json r = run("diagram", inst);
  REQUIRE(r["entries"].size() == 3);
  // Every endpoint decomposes over the span {1, q}.
  for (const auto& e : r["entries"]) {
    for (const char* side : {"lo", "hi"}) {
      const auto& v = e["interval"][side];
      CHECK((v.contains("infinite") || (v.contains("a") && v.contains("b"))));
    }
  }
}

TEST_CASE("rectilinearize command splits the wedge") {
  Instance inst = parse_instance(R"({
    "q": 1,
    "cell": {"n": 2, "l": 0,
             "lower": [{"c": "0", "e": ["0", "0"]},
                       {"c": "1/10", "e": ["1", "0"]}],
             "upper": [{"c": "1", "e": ["0", "0"]},
                       {"c": "1", "e": ["1", "0"]}]}
  })");
  json r = run("rectilinearize", inst);
  CHECK(r["count"].get<std::size_t>() >= 2);
  CHECK(r["pieces"].size() == r["count"].get<std::size_t>());
  for (const auto& p : r["pieces"]) CHECK(p.contains("jacobian"));
}

TEST_CASE("dickson and split commands expose the combinatorial layer") {
  Instance inst = parse_instance(R"({
    "q": 1,
    "family": {"xy_arity": 1, "k": 2, "coeffs": [
      {"alpha": [1, 1], "poly": [{"e": [0], "c": "1"}]},
      {"alpha": [2, 0], "poly": [{"e": [1], "c": "1"}]},
      {"alpha": [3, 3], "poly": [{"e": [0], "c": "1"}]}
    ]}
  })");
  json d = run("dickson", inst);
  // (3,3) dominates (1,1): the antichain keeps (1,1) and (2,0).
  CHECK(d["antichain"].size() == 2);
  CHECK(!d["partition"].empty());

  json s = run("split", inst);
  CHECK(s["m_cr"] == d["antichain"]);
  CHECK(s["critical"].size() + s["noncritical"].size() >= 2);
}

TEST_CASE("countex reports the wedge sup and the naive-split unboundedness") {
  Instance inst = parse_instance(R"({
    "q": 1,
    "countex": {
      "x": ["1/10"],
      "candidates": [
        {"label": "pure-log", "g": {"1": [{"e": [0, 0, 0], "c": "1"}]},
         "t": ["1/2"]},
        {"label": "two-powers",
         "g": {"0": [{"e": [0, 1, 0], "c": "1"}, {"e": [0, 0, 1], "c": "1"}]},
         "t": ["1/4", "3/4"]}
      ]
    }
  })");
  json r = run("countex", inst);
  const auto& fib = r["fibers"][0];
  CHECK(fib["rect_pieces"].get<std::size_t>() >= 2);
  CHECK(fib["f"]["bounded"] == true);
  CHECK(fib["f"]["sup"].get<double>() ==
        doctest::Approx(2.302585).epsilon(1e-3));
  CHECK(fib["log_y1"]["bounded"] == false);
  CHECK(fib["log_y2"]["bounded"] == false);

  const auto& pure = r["candidates"][0];
  CHECK(pure["leading"]["r"] == 1);
  CHECK(pure["limits"][0]["limit"].get<double>() == doctest::Approx(1.0));
  const auto& two = r["candidates"][1];
  CHECK(two["leading"]["q"] == 1);
  CHECK(two["limits"][0]["in_window"] == true);
  CHECK(two["limits"][0]["limit"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(two["limits"][1]["in_window"] == false);
}

TEST_CASE("verify command cross-checks the diagram against quadrature") {
  Instance inst = parse_instance(kTwoTerm);
  inst.samples = 40;
  json r = run("verify", inst);
  CHECK(r["samples"].get<std::size_t>() >= 30);
  CHECK(r["agreement"].get<double>() >= 0.99);
  CHECK(r["ok"] == true);
}

TEST_CASE("unknown commands are input errors") {
  Instance inst = parse_instance(kTwoTerm);
  CHECK_THROWS_AS(run("explode", inst), InstanceError);
  CHECK_THROWS_AS(run("classify", inst), InstanceError);  // missing section
}

TEST_CASE("cli binary: exit codes and deterministic reports") {
  // ctest runs in the build directory, next to the binary.
  if (!std::ifstream("./lcdiag").good()) return;
  write_file("cli_two_term.json", kTwoTerm);
  write_file("cli_bad.json", R"({"pieces": []})");

  CHECK(run_cli("diagram --in cli_two_term.json --out cli_report_a.json") == 0);
  CHECK(run_cli("diagram --in cli_two_term.json --out cli_report_b.json") == 0);
  const std::string a = read_file("cli_report_a.json");
  CHECK(!a.empty());
  CHECK(a == read_file("cli_report_b.json"));
  CHECK(json::parse(a)["entries"].size() == 3);

  CHECK(run_cli("diagram --in cli_bad.json") == 2);
  CHECK(run_cli("diagram --in cli_missing_file.json") == 2);
  CHECK(run_cli("explode --in cli_two_term.json") == 2);
  CHECK(run_cli("diagram") == 2);  // missing --in

  // Cap small enough that the 4-config enumeration trips it.
  json capped = json::parse(kTwoTerm);
  capped["config_cap"] = 2;
  write_file("cli_capped.json", capped.dump());
  CHECK(run_cli("diagram --in cli_capped.json") == 3);
}
