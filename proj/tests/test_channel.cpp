#include "doctest.h"

#include <cmath>

#include "molchan/channel.hpp"
#include "molchan/error.hpp"
#include "molchan/rng.hpp"
#include "oracles.hpp"

using namespace molchan;

namespace {

PhysicalScenario reference() { return PhysicalScenario{}; }

TrainingSequence bits(const char* text) { return TrainingSequence::parse(text); }

}  // namespace

TEST_CASE("concentration at the peak sample time")
{
    const PhysicalScenario sc = reference();
    const double c = concentration_at(sc, 500e-9, 9.546e-5);
    CHECK(c == doctest::Approx(5.89e22).epsilon(2e-3));
    CHECK(c == doctest::Approx(oracle::point_concentration(1e5, 4.365e-10, 500e-9, 9.546e-5)).epsilon(1e-12));

    PhysicalScenario doubled = sc;
    doubled.n_tx *= 2;
    CHECK(concentration_at(doubled, 500e-9, 9.546e-5) == 2 * c);
    CHECK(concentration_at(sc, 500e-9, 1e3) < concentration_at(sc, 500e-9, 1e2));
    CHECK(concentration_at(sc, 500e-9, 1e12) < 1e-20 * c);

    CHECK_THROWS_AS(concentration_at(sc, 500e-9, 0.0), DomainError);
    CHECK_THROWS_AS(concentration_at(sc, 0.0, 1e-4), DomainError);
}

TEST_CASE("peak sample time")
{
    PhysicalScenario sc = reference();
    const double t = peak_sample_time(sc);
    CHECK(t == doctest::Approx(9.546e-5).epsilon(1e-4));

    const double searched = oracle::golden_max(
        [](double x) { return oracle::point_concentration(1e5, 4.365e-10, 500e-9, x); }, 1e-6, 1e-3);
    CHECK(t == doctest::Approx(searched).epsilon(1e-6));

    sc.mean_distance *= 2;
    CHECK(peak_sample_time(sc) == doctest::Approx(4 * t).epsilon(1e-14));
    sc = reference();
    sc.diffusion_coeff *= 2;
    CHECK(peak_sample_time(sc) == doctest::Approx(t / 2).epsilon(1e-14));
}

TEST_CASE("first tap against sphere quadrature")
{
    const PhysicalScenario sc = reference();
    const Cir cir = synthesize_cir(scenario_for_taps(sc, 1));
    CHECK(cir.taps[0] == doctest::Approx(22.5).epsilon(0.01));
    const double integral = oracle::sphere_integral(1e5, 4.365e-10, 500e-9, 45e-9, 9.546e-5);
    CHECK(std::abs(cir.taps[0] - integral) / integral < 0.02);
    CHECK(cir.noise_mean == doctest::Approx(cir.taps[0] / 2).epsilon(1e-12));
}

TEST_CASE("cir taps vanish for long symbols")
{
    PhysicalScenario sc = reference();
    sc.num_taps = 3;
    sc.symbol_duration = 1e3;
    const Cir cir = synthesize_cir(sc);
    REQUIRE(cir.num_taps() == 3);
    CHECK(cir.taps[1] < 1e-6 * cir.taps[0]);
    CHECK(cir.taps[2] < 1e-6 * cir.taps[0]);
}

TEST_CASE("cir at an explicit distance")
{
    PhysicalScenario sc = scenario_for_taps(reference(), 2);
    const Cir near = synthesize_cir(sc, 400e-9);
    const Cir mean = synthesize_cir(sc);
    CHECK(near.taps[0] > mean.taps[0]);
    CHECK(near.noise_mean == mean.noise_mean);
    CHECK_THROWS_AS(synthesize_cir(sc, -1e-9), DomainError);
}

TEST_CASE("symbol duration selection")
{
    const PhysicalScenario sc = reference();
    const SymbolParams one = choose_symbol_params(sc, 1);
    CHECK(one.num_taps == 1);
    PhysicalScenario wide = sc;
    wide.num_taps = 2;
    wide.symbol_duration = one.symbol_duration;
    const Cir probe = synthesize_cir(wide);
    CHECK(probe.taps[1] < 0.1 * probe.taps[0]);
    wide.symbol_duration = one.symbol_duration * 0.99;
    const Cir shorter = synthesize_cir(wide);
    CHECK(shorter.taps[1] >= 0.1 * shorter.taps[0]);

    const SymbolParams five = choose_symbol_params(sc, 5);
    CHECK(five.symbol_duration < one.symbol_duration);

    PhysicalScenario fixed = sc;
    fixed.symbol_duration = one.symbol_duration;
    CHECK(choose_symbol_params(fixed, std::nullopt).num_taps == 1);
    CHECK(choose_symbol_params(sc, 1, 1.0).num_taps == 1);

    CHECK_THROWS_AS(choose_symbol_params(sc, 0), ConfigError);
}

TEST_CASE("expected observations")
{
    const Cir cir{{9.0}, 2.0};
    const Eigen::VectorXd mu = mean_observations(cir, bits("1010"));
    CHECK(mu.size() == 4);
    CHECK(mu[0] == 11);
    CHECK(mu[1] == 2);
    CHECK(mu[2] == 11);
    CHECK(mu[3] == 2);

    const Eigen::VectorXd off = mean_observations(cir, bits("0000"));
    CHECK((off.array() == 2.0).all());
    CHECK(mean_observations(Cir{{9.0}, 0.0}, bits("0000")).isZero());

    const Cir two{{5.0, 1.0}, 0.5};
    const Eigen::VectorXd m2 = mean_observations(two, bits("1101"));
    REQUIRE(m2.size() == 3);
    CHECK(m2[0] == 6.5);
    CHECK(m2[1] == 1.5);
    CHECK(m2[2] == 5.5);
}

TEST_CASE("simulated counts")
{
    const Cir cir{{9.0}, 2.0};
    const TrainingSequence seq = bits("1010");
    CHECK(simulate_observations(cir, seq, 3, 4).counts == simulate_observations(cir, seq, 3, 4).counts);
    CHECK(simulate_observations(cir, seq, 3, 4).counts != simulate_observations(cir, seq, 3, 5).counts);
    CHECK(simulate_observations(Cir{{0.0}, 0.0}, seq, 3, 4).counts == std::vector<std::int64_t>(4, 0));
    CHECK_THROWS_AS(simulate_observations(Cir{{-1.0}, 2.0}, seq, 1, 0), ArgumentError);

    double on = 0, off = 0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        const ObservationVector obs = simulate_observations(cir, seq, 11, static_cast<std::uint64_t>(t));
        on += static_cast<double>(obs.counts[0] + obs.counts[2]);
        off += static_cast<double>(obs.counts[1] + obs.counts[3]);
    }
    CHECK(on / (2 * n) == doctest::Approx(11).epsilon(0.01));
    CHECK(off / (2 * n) == doctest::Approx(2).epsilon(0.01));
}

TEST_CASE("independent streams per lane")
{
    SplitMix64 a = make_stream(1, 0, StreamLane::Observations);
    SplitMix64 b = make_stream(1, 0, StreamLane::Distance);
    SplitMix64 c = make_stream(1, 1, StreamLane::Observations);
    const auto x = a();
    CHECK(x != b());
    CHECK(x != c());
    CHECK(make_stream(1, 0, StreamLane::Observations)() == x);
}

TEST_CASE("distance draws")
{
    PhysicalScenario sc = reference();
    CHECK(draw_distance(sc, 1, 0) == sc.mean_distance);
    sc.distance_halfwidth = 100e-9;
    double lo = 1, hi = 0, sum = 0;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        const double d = draw_distance(sc, 5, static_cast<std::uint64_t>(t));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        sum += d;
    }
    CHECK(lo >= 400e-9);
    CHECK(hi <= 600e-9);
    CHECK(lo < 402e-9);
    CHECK(hi > 598e-9);
    CHECK(sum / n == doctest::Approx(500e-9).epsilon(2e-3));
    CHECK(draw_distance(sc, 5, 17) == draw_distance(sc, 5, 17));
}

TEST_CASE("prior mean cir")
{
    PhysicalScenario sc = scenario_for_taps(reference(), 2);
    const Cir fixed = mean_cir(sc, 1);
    CHECK(fixed.as_vector() == synthesize_cir(sc).as_vector());

    sc.distance_halfwidth = 100e-9;
    const Cir prior = mean_cir(sc, 1, 20000);
    CHECK(prior.taps[0] > fixed.taps[0]);
    CHECK(prior.noise_mean == doctest::Approx(fixed.noise_mean).epsilon(1e-12));
    CHECK(mean_cir(sc, 1, 500).as_vector() == mean_cir(sc, 1, 500).as_vector());
}

TEST_CASE("scenario validation")
{
    PhysicalScenario sc = reference();
    CHECK_NOTHROW(sc.validate());
    CHECK_THROWS_AS(sc.validate(true), ArgumentError);
    sc.distance_halfwidth = sc.mean_distance;
    CHECK_THROWS_AS(sc.validate(), ArgumentError);
    sc = reference();
    sc.diffusion_coeff = 0;
    CHECK_THROWS_AS(sc.validate(), ArgumentError);
    CHECK(reference().receiver_volume() == doctest::Approx(4.0 / 3.0 * 3.14159265358979 * std::pow(45e-9, 3)));
}
