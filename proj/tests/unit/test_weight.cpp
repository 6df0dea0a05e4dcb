#include "dgs/weight.hpp"
#include "support.hpp"

using namespace dgs;

TEST_CASE("weights are exact decimals") {
  CHECK(Weight::parse("2.5").ticks() == 2'500'000);
  CHECK(Weight::parse("0.125").ticks() == 125'000);
  CHECK(Weight::parse("3").to_string() == "3");
  CHECK(Weight::parse("2.5").to_string() == "2.5");
  CHECK(Weight::from_int(2) + Weight::parse("0.5") == Weight::parse("2.5"));
  CHECK((Weight::infinity() + Weight::from_int(1)).is_infinite());
  CHECK(Weight::ceil_of(0.1234567).ticks() == 123'457);
  CHECK(Weight::ceil_of(3.0) == Weight::from_int(3));
}

TEST_CASE("pair identities") {
  CHECK(pair_index(1, 2, 5) == 2);
  CHECK(pair_index(2, 1, 5) == 2);
  CHECK(pair_index(5, 5, 5) == 25);
  CHECK(edge_name_low(edge_name(7, 3)) == 3);
  CHECK(edge_name_high(edge_name(7, 3)) == 7);
}
