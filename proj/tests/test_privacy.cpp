#include "doctest.h"

#include <cmath>
#include <numeric>

#include "hidesim/obfuscation.hpp"
#include "hidesim/privacy.hpp"
#include "hidesim/programs.hpp"

using namespace hidesim;

namespace {

ObservationHistogram hist(std::initializer_list<std::pair<const char*, std::uint64_t>> cells) {
    ObservationHistogram h;
    for (auto [k, n] : cells) h.add(k, n);
    return h;
}

}  // namespace

TEST_CASE("binomial coefficients and pmf") {
    CHECK(binomial_coefficient(10, 3) == 120);
    CHECK(binomial_coefficient(64, 32) == 1832624140942590534ULL);
    CHECK(binomial_coefficient(5, 6) == 0);
    CHECK_THROWS_AS(binomial_coefficient(65, 1), std::invalid_argument);
    for (std::uint32_t B : {1u, 16u, 64u, 65u, 100u, 1024u}) {
        auto p = binomial_pmf_table(B);
        CHECK(p.size() == B + 1);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::uint32_t l = 0; l <= B / 2; ++l) CHECK(p[l] == doctest::Approx(p[B - l]).epsilon(1e-12));
    }
    CHECK(binomial_pmf(4, 2) == 6.0 / 16.0);
    CHECK_THROWS_AS(binomial_pmf(4, 5), std::invalid_argument);
}

TEST_CASE("likelihood ratio identity: pmf(B,l) = f(B,l) pmf(B,l-1)") {
    // Exact integer form: C(B,l) l = C(B,l-1) (B-l+1).
    for (std::uint32_t B = 1; B <= 60; ++B)
        for (std::uint32_t l = 1; l <= B; ++l) {
            CHECK(binomial_coefficient(B, l) * l == binomial_coefficient(B, l - 1) * (B - l + 1));
            CHECK(likelihood_ratio_f(B, l) * binomial_pmf(B, l - 1) ==
                  doctest::Approx(binomial_pmf(B, l)).epsilon(1e-12));
        }
    CHECK_THROWS_AS(likelihood_ratio_f(10, 0), std::invalid_argument);
    CHECK_THROWS_AS(likelihood_ratio_f(10, 11), std::invalid_argument);
}

TEST_CASE("interval and theoretical parameters at B=100, xi=2") {
    auto iv = interval_I(100, 2.0);
    CHECK(iv.lo == 30.0);
    CHECK(iv.hi == 71.0);
    auto [lo, hi] = integer_span(iv, 1, 100);
    CHECK(lo == 30);
    CHECK(hi == 71);
    auto t = bba_theoretical_params(100, 2.0, 3);
    CHECK(t.epsilon_per_box == doctest::Approx(std::log(71.0 / 30.0)));
    CHECK(t.delta_per_box == doctest::Approx(std::exp(-2.0)));
    CHECK(t.epsilon == doctest::Approx(3 * t.epsilon_per_box));
    CHECK(t.delta == doctest::Approx(3 * std::exp(-2.0)));
    CHECK_THROWS_AS(chernoff_bound(0.0), std::invalid_argument);
    CHECK_THROWS_AS(bba_theoretical_params(100, -1.0, 1), std::invalid_argument);
}

TEST_CASE("exact box tails agree with direct summation") {
    for (std::uint32_t B : {16u, 64u}) {
        for (double xi : {1.0, 1.5, 2.0}) {
            auto iv = interval_I(B, xi);
            double out_s = 0.0, out_b = 0.0;
            for (std::uint32_t l = 0; l <= B; ++l) {
                double p = static_cast<double>(binomial_coefficient(B, l)) / std::ldexp(1.0, B);
                if (l < iv.lo || l > iv.hi) out_s += p;
                if (l + 1 < iv.lo || l + 1 > iv.hi) out_b += p;
            }
            CHECK(silent_box_tail(B, xi) == doctest::Approx(out_s).epsilon(1e-9));
            CHECK(beep_box_tail(B, xi) == doctest::Approx(out_b).epsilon(1e-9));
        }
    }
}

TEST_CASE("estimator on hand-built histograms") {
    auto a = hist({{"x", 50}, {"y", 50}});
    auto r = estimate_eps_delta(a, a, 0.0);
    CHECK(r.epsilon_hat == 0.0);
    CHECK(r.delta_hat == 0.0);
    CHECK(r.bounded);

    auto b = hist({{"x", 50}});
    auto c = hist({{"y", 50}});
    CHECK_FALSE(estimate_eps_delta(b, c, 0.0).bounded);
    auto full = estimate_eps_delta(b, c, 1.0);
    CHECK(full.bounded);
    CHECK(full.delta_hat == 1.0);

    // 60/40 vs 40/60 with alpha = 0: eps = ln 1.5 on both outcomes.
    auto x = hist({{"0", 60}, {"1", 40}});
    auto y = hist({{"0", 40}, {"1", 60}});
    auto e = estimate_eps_delta(x, y, 0.0, 0.0);
    CHECK(e.epsilon_hat == doctest::Approx(std::log(1.5)));
    // A budget of 0.6 absorbs one outcome; the other still has ratio 1.5.
    CHECK(estimate_eps_delta(x, y, 0.6, 0.0).epsilon_hat == doctest::Approx(std::log(1.5)));
    CHECK(estimate_eps_delta(x, y, 0.6, 0.0).outcomes_in_tail == 1);

    // One rare outcome only on one side goes to the tail when the budget allows.
    auto p = hist({{"a", 99}, {"rare", 1}});
    auto q = hist({{"a", 100}});
    CHECK_FALSE(estimate_eps_delta(p, q, 0.0).bounded);
    auto pr = estimate_eps_delta(p, q, 0.02);
    CHECK(pr.bounded);
    CHECK(pr.delta_hat == doctest::Approx(0.01));

    CHECK_THROWS_AS(estimate_eps_delta(ObservationHistogram{}, a, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_eps_delta(a, a, 2.0), std::invalid_argument);
}

TEST_CASE("histograms") {
    auto h = hist({{"10", 1}, {"9", 2}});
    CHECK(h.total == 3);
    CHECK(h.counts.begin()->first == "9");  // short-lex: numeric order
    CHECK(h.dense(10) == std::vector<std::uint64_t>{0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1});
    CHECK_THROWS_AS(h.dense(5), std::out_of_range);
    auto g = hist({{"9", 1}});
    h.merge(g);
    CHECK(h.count("9") == 3);
    ObservationHistogram other;
    other.mode = EventMode::BoxCounts;
    CHECK_THROWS_AS(h.merge(other), std::invalid_argument);
}

TEST_CASE("box-count collection") {
    auto g = NetworkGraph::complete(2);
    auto scenario = [&](std::uint64_t seed) {
        auto inner = scripted_programs({schedule_from_symbols("T", {}), {}});
        return SimulationConfig{g, ChannelModel::Beeping,
                                bba_wrap(inner, {secret_schedule(SharedSecret::derive(seed), 8), 1}), 9, seed, ""};
    };
    FeedbackSpec beep{FeedbackKind::BeepDetecting, {}};
    auto h = collect_histogram(scenario, beep, 200, 1, EventMode::BoxCounts, 9);
    CHECK(h.total == 200);
    CHECK(h.count("0") == 0);  // a beep box always has at least one beep
    CHECK_THROWS_AS(collect_histogram(scenario, {FeedbackKind::TransmissionCounting, {}}, 1, 1,
                                      EventMode::BoxCounts, 9),
                    ConfigError);
    CHECK_THROWS_AS(collect_histogram(scenario, beep, 0, 1), ConfigError);
    CHECK_THROWS_AS(collect_histogram(scenario, beep, 1, 1, EventMode::BoxCounts, 4), ConfigError);
}

TEST_CASE("goodness of fit") {
    std::vector<double> pmf{0.25, 0.5, 0.25};
    std::vector<std::uint64_t> exact{250, 500, 250};
    CHECK(total_variation(exact, pmf) == 0.0);
    CHECK(chi_square_test(exact, pmf).p_value == doctest::Approx(1.0));
    std::vector<std::uint64_t> skew{500, 500, 0};
    CHECK(total_variation(skew, pmf) == doctest::Approx(0.25));
    CHECK(chi_square_test(skew, pmf).p_value < 1e-10);
    // Pooling: 1000 samples of Binomial(30): far cells merge into their neighbours.
    auto p30 = binomial_pmf_table(30);
    std::vector<std::uint64_t> obs(31);
    for (std::size_t l = 0; l <= 30; ++l) obs[l] = static_cast<std::uint64_t>(std::llround(1000 * p30[l]));
    auto cs = chi_square_test(obs, p30);
    CHECK(cs.degrees_of_freedom < 30);
    CHECK(cs.p_value > 0.5);
}

TEST_CASE("cost of hiding") {
    auto g = NetworkGraph::complete(4);
    auto inner = flooding_broadcast(0, payload_of("m"));
    auto base = run({g, ChannelModel::CdMac, inner, 50, 0, ""});
    auto wrapped = run({g, ChannelModel::CdMac, bba_wrap(inner, {secret_schedule(SharedSecret::derive(3), 7),
                                                                 base.length()}),
                        1000, 0, ""});
    auto c = cost_of_hiding(base, wrapped);
    CHECK(c.time_ratio == 8.0);
    CHECK(c.energy_ratio >= 1.0);
    auto silent = run({g, ChannelModel::CdMac, silent_programs(2), 5, 0, ""});
    auto cz = cost_of_hiding(silent, wrapped);
    CHECK(cz.base_energy_zero);
}
