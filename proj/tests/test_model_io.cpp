#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "gibbsfit/model_io.hpp"
#include "gibbsfit/models.hpp"
#include "support.hpp"

using namespace gibbsfit;

namespace {

ModelFile parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in, "test");
}

}  // namespace

TEST_CASE("parse a full model with comments and wrapped lists") {
  auto m = parse_text(
      "# golden mean chain\n"
      "alphabet 2\n"
      "incidence\n"
      "0 1   # no 1 after 1\n"
      "1 1\n"
      "potential base depth 1\n"
      "0.5 -0.5\n"
      "potential dir depth 2\n"
      "1\n"
      "0 0\n"
      "potential dir depth 1\n"
      "0 1\n"
      "box lower -4 -3\n"
      "box upper 4 3\n"
      "theta 0.25 -1.5\n");

  CHECK(m.spec == golden_mean_shift());
  REQUIRE(m.family.dim() == 2);
  CHECK(m.family.base.values == std::vector<double>{0.5, -0.5});
  CHECK(m.family.dirs[0].depth == 2);
  CHECK(m.family.dirs[0].values == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(m.family.dirs[1].values == std::vector<double>{0.0, 1.0});
  REQUIRE(m.has_box());
  CHECK(m.box_lower[1] == -3.0);
  CHECK(m.box_upper[0] == 4.0);
  REQUIRE(m.has_theta());
  CHECK(m.theta[0] == 0.25);
  CHECK(m.theta[1] == -1.5);
}

TEST_CASE("defaults: full shift, zero base, no box or theta") {
  auto m = parse_text(
      "alphabet 3\n"
      "potential dir depth 1\n"
      "1 0 0\n");
  CHECK(m.spec == full_shift(3));
  CHECK(m.family.base.depth == 1);
  CHECK(m.family.base.values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK_FALSE(m.has_box());
  CHECK_FALSE(m.has_theta());
}

TEST_CASE("write then parse is the identity") {
  ModelFile m{golden_mean_shift(), markov_family(golden_mean_shift()),
              Eigen::VectorXd::Constant(2, -2.5), Eigen::VectorXd::Constant(2, 2.5),
              Eigen::VectorXd::Zero(2)};
  m.theta << 1.0 / 3.0, -0.1234567890123456789;

  std::ostringstream out;
  write_model(out, m);
  auto back = parse_text(out.str());
  CHECK(back.spec == m.spec);
  REQUIRE(back.family.dim() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(back.family.dirs[static_cast<std::size_t>(i)].depth ==
          m.family.dirs[static_cast<std::size_t>(i)].depth);
    CHECK(back.family.dirs[static_cast<std::size_t>(i)].values ==
          m.family.dirs[static_cast<std::size_t>(i)].values);
  }
  // %.17g round-trips doubles exactly.
  CHECK((back.theta.array() == m.theta.array()).all());
  CHECK((back.box_lower.array() == m.box_lower.array()).all());

  // Full-shift models omit the incidence block entirely.
  ModelFile iid{full_shift(2), bernoulli_family(2), {}, {}, {}};
  std::ostringstream out2;
  write_model(out2, iid);
  CHECK(out2.str().find("incidence") == std::string::npos);
  CHECK(parse_text(out2.str()).spec == full_shift(2));
}

TEST_CASE("parser diagnostics carry the origin and the problem") {
  auto check_fails = [](const std::string& text, const std::string& needle) {
    try {
      parse_text(text);
      FAIL_CHECK("expected parse failure for: " << needle);
    } catch (const std::runtime_error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("test:") == 0);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };

  check_fails("potential dir depth 1\n0 0\n", "alphabet");
  check_fails("alphabet 1\n", "[2, 64]");
  check_fails("alphabet 2\n", "no 'potential dir'");
  check_fails("alphabet 2\npotential dir depth 1\n0\n", "unexpected end of file");
  check_fails("alphabet 2\npotential dir depth 0\n", "[1, 12]");
  check_fails("alphabet 2\npotential dir depth 1\n0 x\n", "expected number");
  check_fails("alphabet 2\nincidence\n0 2 1 1\npotential dir depth 1\n0 0\n", "0 or 1");
  check_fails("alphabet 2\npotential dir depth 1\n0 0\nincidence\n0 1 1 1\n",
              "must precede");
  check_fails(
      "alphabet 2\npotential base depth 1\n0 0\npotential base depth 1\n0 0\n"
      "potential dir depth 1\n0 0\n",
      "duplicate base");
  check_fails("alphabet 2\npotential dir depth 1\n0 0\nbox lower -1\n", "together");
  check_fails("alphabet 2\npotential dir depth 1\n0 0\nbox lower -1\nbox upper -1\n",
              "strictly below");
  check_fails("alphabet 2\npotential dir depth 1\n0 0\nbox lower -1 0\nbox upper 1 2\n",
              "per direction");
  check_fails("alphabet 2\npotential dir depth 1\n0 0\ntheta 1 2\n", "per direction");
  check_fails("alphabet 2\ngibberish\n", "unknown directive");
  check_fails("alphabet 2\npotential dir depth 1\n0 nan\n", "non-finite");
  // Identity incidence is not mixing.
  check_fails("alphabet 2\nincidence\n1 0 0 1\npotential dir depth 1\n0 0\n", "");
}

TEST_CASE("sample files round trip with headers") {
  Word w({1, 2, 2, 1, 2});
  std::ostringstream out;
  write_sample(out, w, {"made by the tests", "theta 0"});
  CHECK(out.str().find("# made by the tests") != std::string::npos);

  std::istringstream in(out.str());
  CHECK(parse_sample(in, "test") == w);

  std::istringstream bad("1 2 0 1");
  CHECK_THROWS_AS(parse_sample(bad, "test"), std::runtime_error);
  std::istringstream words("1 two 1");
  CHECK_THROWS_AS(parse_sample(words, "test"), std::runtime_error);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_sample(empty, "test"), std::runtime_error);
}

TEST_CASE("long samples wrap but parse back intact") {
  std::vector<int> syms;
  for (int i = 0; i < 500; ++i) syms.push_back(1 + i % 2);
  Word w(std::move(syms));
  std::ostringstream out;
  write_sample(out, w);
  std::istringstream back(out.str());
  CHECK(parse_sample(back, "test") == w);
}
