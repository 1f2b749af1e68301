// Parameter validation and the key-value model format.

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "longmem/model.hpp"

using namespace longmem;

TEST_CASE("delta range is enforced") {
  ParamVector theta;
  theta.delta = 0.6;
  const auto rep = validate(theta);
  REQUIRE_FALSE(rep.ok());
  REQUIRE_FALSE(rep.delta_in_range);
  REQUIRE_THAT(rep.message(),
               Catch::Matchers::ContainsSubstring("memory parameter"));

  theta.delta = 0.3;
  REQUIRE(validate(theta).ok());
  theta.delta = 0.0;
  REQUIRE_FALSE(validate(theta).delta_in_range);
}

TEST_CASE("root margins are enforced") {
  ParamVector theta;
  theta.delta = 0.2;
  theta.ar = {1.1};  // root at 1/1.1, inside the unit circle
  auto rep = validate(theta);
  REQUIRE_FALSE(rep.ok());
  REQUIRE_FALSE(rep.ar_roots_outside);

  theta.ar = {0.995};  // root at 1.005, inside the margin circle
  REQUIRE_FALSE(validate(theta).ar_roots_outside);

  theta.ar = {0.5};
  REQUIRE(validate(theta).ok());

  theta.ma = {1.05};  // MA root inside
  REQUIRE_FALSE(validate(theta).ma_roots_outside);

  // second-order AR with complex roots well outside
  theta.ar = {0.4, -0.2};
  theta.ma.clear();
  REQUIRE(validate(theta).ok());
}

TEST_CASE("common roots break identifiability") {
  ParamVector theta;
  theta.delta = 0.25;
  theta.ar = {0.5};
  theta.ma = {-0.5};  // phi(s) = psi(s) = 1 - 0.5 s
  const auto rep = validate(theta);
  REQUIRE_FALSE(rep.ok());
  REQUIRE_FALSE(rep.no_common_root);

  theta.ma = {-0.4};
  REQUIRE(validate(theta).ok());
}

TEST_CASE("spec-level checks add sigma2 and order consistency") {
  ModelSpec spec;
  spec.theta.delta = 0.3;
  spec.sigma2 = -1.0;
  REQUIRE_FALSE(validate(spec).sigma2_positive);
  spec.sigma2 = 1.0;
  REQUIRE(validate(spec).ok());

  spec.order.p = 2;  // but theta.ar is empty
  REQUIRE_FALSE(validate(spec).ok());
}

TEST_CASE("flatten round trip preserves the layout") {
  ParamVector theta;
  theta.delta = 0.31;
  theta.ar = {0.5, -0.1};
  theta.ma = {0.2};
  const auto flat = theta.flatten();
  REQUIRE(flat == std::vector<double>{0.31, 0.5, -0.1, 0.2});
  REQUIRE(ParamVector::from_flat({2, 1}, flat) == theta);
}

TEST_CASE("key-value serialization round trips") {
  ModelSpec spec;
  spec.theta.delta = 0.3;
  spec.theta.ar = {0.5};
  spec.theta.ma = {-0.25};
  spec.order = {1, 1};
  spec.sigma2 = 2.0;
  const auto kv = model_to_kv(spec);
  REQUIRE(kv.at("order.p") == "1");
  REQUIRE(kv.at("theta.delta") == "0.29999999999999999");
  const auto back = model_from_kv(kv);
  REQUIRE(back.theta == spec.theta);
  REQUIRE(back.sigma2 == spec.sigma2);
}

TEST_CASE("key-value order mismatch is rejected") {
  std::map<std::string, std::string> kv{
      {"theta.delta", "0.3"}, {"theta.ar", "0.5"}, {"order.p", "2"}};
  REQUIRE_THROWS_AS(model_from_kv(kv), std::invalid_argument);
}

TEST_CASE("default bounds stay within the admissible region") {
  const auto b = ParamBounds::defaults({1, 1});
  REQUIRE(b.delta.first == kDeltaLower);
  REQUIRE(b.delta.second == kDeltaUpper);
  REQUIRE(b.arma.size() == 2);
  ParamVector theta;
  theta.delta = 0.25;
  theta.ar = {b.arma[0].second};
  theta.ma = {b.arma[1].second};
  REQUIRE(validate(theta).ok());
}
