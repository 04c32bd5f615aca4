#include <cmath>
#include <stdexcept>

#include "adkey/bounds.hpp"
#include "doctest.h"

using namespace adkey;

TEST_CASE("binary entropy endpoints and known values") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.811278).epsilon(1e-5));
    CHECK(binary_entropy(0.11) == doctest::Approx(0.499916).epsilon(1e-5));
    CHECK(binary_entropy(0.3) == binary_entropy(0.7));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("binary entropy is concave on a grid") {
    for (double a = 0.05; a < 0.9; a += 0.05) {
        const double b = a + 0.1;
        CHECK(binary_entropy(0.5 * (a + b)) >=
              0.5 * (binary_entropy(a) + binary_entropy(b)) - 1e-12);
    }
}

TEST_CASE("truncated entropy equals entropy below one half, 1 above") {
    CHECK(truncated_binary_entropy(0.2) == binary_entropy(0.2));
    CHECK(truncated_binary_entropy(0.5) == 1.0);
    CHECK(truncated_binary_entropy(0.9) == 1.0);
}

TEST_CASE("confidence domain") {
    CHECK_THROWS_AS(Confidence(0.0), std::domain_error);
    CHECK_THROWS_AS(Confidence(-1e-3), std::domain_error);
    CHECK_THROWS_AS(Confidence(1.5), std::domain_error);
    CHECK_NOTHROW(Confidence(1.0));
}

TEST_CASE("hoeffding deviation") {
    CHECK(hoeffding_delta(1e8, Confidence(1e-10)) ==
          doctest::Approx(33930.70).epsilon(1e-5));
    CHECK(hoeffding_delta(0.0, Confidence(1e-10)) == 0.0);
    CHECK(hoeffding_delta(100.0, Confidence(1.0)) == 0.0);
}

TEST_CASE("chernoff deviations at zero count reduce to the log terms") {
    const Confidence eps(std::exp(-1.0));
    CHECK(chernoff_delta(0.0, eps, Direction::upper) == doctest::Approx(2.0));
    CHECK(chernoff_delta(0.0, eps, Direction::lower) == doctest::Approx(1.0));
}

TEST_CASE("combined deviation picks the smaller branch") {
    // Small subset in a large set: the subset-count branch wins.
    const Confidence tight(1e-10);
    const double cell = chernoff_delta(1e5, tight, Direction::upper);
    CHECK(cell == doctest::Approx(2169.2).epsilon(1e-4));
    CHECK(combined_delta(1e6, 1e5, tight, Direction::upper) == doctest::Approx(cell));
    // Small total: the total-count branch wins.
    const Confidence loose(1e-6);
    CHECK(combined_delta(100.0, 90.0, loose, Direction::upper) ==
          doctest::Approx(26.28).epsilon(1e-3));
    CHECK(combined_delta(100.0, 90.0, loose, Direction::upper) ==
          doctest::Approx(hoeffding_delta(100.0, loose)));
}

TEST_CASE("extrapolation term") {
    CHECK(serfling_nu(1e6, 1e4, Confidence(1e-10)) ==
          doctest::Approx(0.0341016).epsilon(1e-4));
    CHECK(serfling_nu(1e6, 1e4, Confidence(1.0)) == 0.0);
    CHECK_THROWS_AS(serfling_nu(0.5, 10.0, Confidence(0.01)), std::domain_error);
    CHECK_THROWS_AS(serfling_nu(10.0, 0.5, Confidence(0.01)), std::domain_error);
    // More test samples shrink the term.
    CHECK(serfling_nu(1e6, 2e4, Confidence(1e-10)) <
          serfling_nu(1e6, 1e4, Confidence(1e-10)));
}

TEST_CASE("block deviation envelope") {
    CHECK(mcdiarmid_block_delta(1e4, Confidence(0.01)) ==
          doctest::Approx(455.228).epsilon(1e-5));
    CHECK(mcdiarmid_block_delta(9.0, Confidence(std::exp(-2.0))) ==
          doctest::Approx(9.0));
    CHECK(mcdiarmid_block_delta(1e6, Confidence(0.1)) ==
          doctest::Approx(3.0 * hoeffding_delta(1e6, Confidence(0.1))));
}
