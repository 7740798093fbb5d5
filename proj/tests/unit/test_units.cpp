#include <doctest.h>

#include <stdexcept>

#include "tlsbath/units.hpp"

using namespace tlsbath::units;

TEST_CASE("frequencies are stored as angular frequencies") {
    CHECK(parse_quantity("6.3 GHz", Kind::frequency) == doctest::Approx(two_pi * 6.3e9));
    CHECK(parse_quantity("50kHz", Kind::frequency) == doctest::Approx(two_pi * 5e4));
    CHECK(to_hz(mhz(20.0)) == doctest::Approx(20e6));
}

TEST_CASE("durations convert to seconds") {
    CHECK(parse_quantity("34 us", Kind::duration) == doctest::Approx(34e-6));
    CHECK(parse_quantity("34 µs", Kind::duration) == doctest::Approx(34e-6));
    CHECK(parse_quantity("100 ns", Kind::duration) == doctest::Approx(100e-9));
    CHECK(parse_quantity("0.64 ms", Kind::duration) == doctest::Approx(0.64e-3));
}

TEST_CASE("a rate may be written as a frequency or as a lifetime") {
    CHECK(parse_quantity("34 us", Kind::rate) == doctest::Approx(1.0 / 34e-6));
    CHECK(parse_quantity("2 MHz", Kind::rate) == doctest::Approx(two_pi * 2e6));
}

TEST_CASE("densities are per rad/s") {
    CHECK(parse_quantity("20 /MHz", Kind::density) == doctest::Approx(per_mhz(20.0)));
    CHECK(per_mhz(20.0) == doctest::Approx(20e-6 / two_pi));
    CHECK(density_to_per_hz(per_ghz(0.35)) == doctest::Approx(0.35e-9));
}

TEST_CASE("unit-less and mismatched values are rejected") {
    CHECK_THROWS_AS(parse_quantity("6.3", Kind::frequency), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("6.3 us", Kind::frequency), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("GHz", Kind::frequency), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("nan GHz", Kind::frequency), std::invalid_argument);
    CHECK_FALSE(is_valid_unit("furlong", Kind::length));
    CHECK(is_valid_unit("nm", Kind::length));
}
