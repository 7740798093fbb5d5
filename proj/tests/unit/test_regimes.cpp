#include <doctest.h>

#include <cmath>

#include "comb_oracle.hpp"
#include "tlsbath/errors.hpp"
#include "tlsbath/fitting.hpp"
#include "tlsbath/regimes.hpp"
#include "tlsbath/units.hpp"

using namespace tlsbath;

TEST_CASE("classification thresholds") {
    const double rho = 1.0 / units::mhz(1.0);
    const double spacing = 1.0 / rho;
    CHECK(regime_classify(units::khz(10.0), 2.0 * 2.0 * spacing, rho) == Regime::fermi);
    CHECK(regime_classify(units::khz(10.0), 2.0 * 0.005 * spacing, rho) == Regime::purcell);
    CHECK(regime_classify(units::khz(10.0), 2.0 * 0.1 * spacing, rho) == Regime::crossover);
    CHECK(regime_classify(units::khz(10.0), 2.0 * 0.005 * spacing, rho, spacing) == Regime::crossover);
    CHECK(to_string(Regime::fermi) == "fermi");
}

TEST_CASE("fixed-offset comb lifetime matches a direct sum") {
    const double rho = 20.0 / units::mhz(1.0);
    const double g = units::khz(30.0);
    for (double gamma_t : {1e3, 1e5, 1e7}) {
        const double spacing = 1.0 / rho;
        const double gamma_m = gamma_t / 2.0;
        const double direct = oracle::comb_sum_direct(2.0 * g * g / gamma_m, gamma_m / spacing, 0.5 * spacing / gamma_m);
        CHECK(comb_lifetime(g, gamma_t, rho, 0.0, {}) == doctest::Approx(1.0 / direct).epsilon(1e-8));
    }
}

TEST_CASE("averaging over offsets lengthens the Purcell-limited lifetime") {
    const double rho = 20.0 / units::mhz(1.0);
    const double fixed = comb_lifetime(units::khz(30.0), 1e3, rho, 0.0, {OffsetPolicy::fixed, 0.5});
    const double averaged = comb_lifetime(units::khz(30.0), 1e3, rho, 0.0, {OffsetPolicy::averaged, 0.5});
    CHECK(averaged < fixed);
    CHECK(parse_offset_policy("averaged") == OffsetPolicy::averaged);
    CHECK_THROWS_AS(parse_offset_policy("mean"), ArgumentError);
}

TEST_CASE("map is independent of the thread count") {
    MapSpec spec = MapSpec::defaults();
    spec.g_grid = log_spaced(units::khz(10.0), units::mhz(100.0), 13);
    spec.gamma_t_grid = log_spaced(1e2, 1e8, 11);
    const LifetimeMap a = lifetime_map(spec, 1);
    const LifetimeMap b = lifetime_map(spec, 3);
    REQUIRE(a.cells.size() == 13 * 11);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].inv_gamma_1 == b.cells[i].inv_gamma_1);
        CHECK(a.cells[i].regime == b.cells[i].regime);
    }
    CHECK(a.at(0, 0).g == spec.g_grid[0]);
    CHECK(a.at(1, 0).g == spec.g_grid[1]);
    spec.rho = -1.0;
    CHECK_THROWS(spec.validate());
}

TEST_CASE("frequency model follows the band edge") {
    const FreqModelSpec spec = FreqModelSpec::defaults();
    const auto rows = frequency_model(spec);
    REQUIRE(rows.size() == 201);
    for (const auto& r : rows) {
        CHECK(r.gamma_t == spec.profile(r.omega));
        CHECK(r.inv_gamma_1 > 0.0);
    }
    const double w = units::ghz(6.0);
    CHECK(sqrt_coefficient_matching(spec.coupling_coefficient, w) * std::sqrt(w) ==
          doctest::Approx(spec.coupling_coefficient * w * w));
    CHECK(frequency_model_lifetime(spec, w, spec.profile.gamma_inside) == doctest::Approx(rows.back().inv_gamma_1).epsilon(0.5));
}
