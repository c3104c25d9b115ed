#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corelay/channel.hpp"

using namespace corelay;

// Hand-evaluated references: T_sym = 2^sf/BW, preamble (8 + 4.25) symbols,
// payload symbols 8 + ceil((8*PL - 4*sf + 44)/(4*(sf - 2*DE))) * 5 at CR 4/5
// with CRC and explicit header.
//   SF7, 13 B: 12.25*1.024ms + 33*1.024ms = 46.336 ms
//   SF8, 12 B: 12.25*2.048ms + 28*2.048ms = 82.432 ms
//   SF7, 12 B: 12.25*1.024ms + 28*1.024ms = 41.216 ms
//   SF12, 12 B, DE=1: (12.25 + 23)*32.768ms = 1155.072 ms

TEST_CASE("known time-on-air values to 1 us") {
    CHECK(airtime_s(7, 125000, 1, 8, true, 13, false) ==
          doctest::Approx(0.046336).epsilon(1e-9));
    CHECK(airtime_s(8, 125000, 1, 8, true, 12, false) ==
          doctest::Approx(0.082432).epsilon(1e-9));
    CHECK(airtime_s(7, 125000, 1, 8, true, 12, false) ==
          doctest::Approx(0.041216).epsilon(1e-9));
    CHECK(airtime_s(12, 125000, 1, 8, true, 12, true) ==
          doctest::Approx(1.155072).epsilon(1e-9));
}

TEST_CASE("airtime is non-decreasing in payload length") {
    for (int sf = 7; sf <= 12; ++sf) {
        double prev = 0.0;
        for (int pl = 1; pl <= 64; ++pl) {
            const double t = airtime_s(sf, 125000, 1, 8, true, pl, false);
            CHECK(t >= prev);
            prev = t;
        }
    }
    CHECK(airtime_s(7, 125000, 1, 8, true, 13, false) >
          airtime_s(7, 125000, 1, 8, true, 12, false) - 1e-12);
}

TEST_CASE("larger spreading factors give longer frames") {
    for (int sf = 7; sf < 12; ++sf) {
        CHECK(airtime_s(sf + 1, 125000, 1, 8, true, 16, false) >
              airtime_s(sf, 125000, 1, 8, true, 16, false));
        // also with the default low-data-rate switch applied per SF
        CHECK(airtime_s(sf + 1, 125000, 1, 8, true, 16, low_dr_default(sf + 1, 125000)) >
              airtime_s(sf, 125000, 1, 8, true, 16, low_dr_default(sf, 125000)));
    }
}

TEST_CASE("implicit header never lengthens the frame") {
    for (int pl = 1; pl <= 32; ++pl) {
        CHECK(airtime_s(7, 125000, 1, 8, false, pl, false) <=
              airtime_s(7, 125000, 1, 8, true, pl, false));
    }
    // the 20 header bits cross a symbol-block boundary at 13 bytes
    CHECK(airtime_s(7, 125000, 1, 8, false, 13, false) <
          airtime_s(7, 125000, 1, 8, true, 13, false));
}

TEST_CASE("contract violations throw") {
    CHECK_THROWS_AS(airtime_s(6, 125000, 1, 8, true, 12, false), std::invalid_argument);
    CHECK_THROWS_AS(airtime_s(13, 125000, 1, 8, true, 12, false), std::invalid_argument);
    CHECK_THROWS_AS(airtime_s(7, 125000, 1, 8, true, 0, false), std::invalid_argument);
    CHECK_THROWS_AS(airtime_s(7, 125000, 5, 8, true, 12, false), std::invalid_argument);
}

TEST_CASE("low data rate optimization defaults") {
    CHECK(!low_dr_default(7, 125000));
    CHECK(!low_dr_default(10, 125000));
    CHECK(low_dr_default(11, 125000));
    CHECK(low_dr_default(12, 125000));
    CHECK(!low_dr_default(12, 500000));
}
