#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hidesim/adversary.hpp"
#include "hidesim/engine.hpp"

namespace hidesim {

// ---------------------------------------------------------------------------
// Empirical side: sample the adversary's view and certify (eps, delta).
// ---------------------------------------------------------------------------

enum class EventMode {
    Stream,     // outcome = the whole serialized feedback stream
    BoxCounts,  // outcome = number of beeping slots in one box (beep feedback only)
};

std::string_view event_mode_name(EventMode m);
std::optional<EventMode> parse_event_mode(std::string_view s);

// Orders outcomes by length, then lexicographically, so decimal box counts
// sort numerically.
struct ShortLex {
    bool operator()(const std::string& a, const std::string& b) const {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    }
};

struct ObservationHistogram {
    EventMode mode = EventMode::Stream;
    std::map<std::string, std::uint64_t, ShortLex> counts;
    std::uint64_t total = 0;

    void add(const std::string& outcome, std::uint64_t n = 1) {
        counts[outcome] += n;
        total += n;
    }
    void merge(const ObservationHistogram& other);
    std::uint64_t count(const std::string& outcome) const {
        auto it = counts.find(outcome);
        return it == counts.end() ? 0 : it->second;
    }
    // Box-count histograms only: counts[l] for l = 0..max_outcome.
    std::vector<std::uint64_t> dense(std::size_t max_outcome) const;
};

// Builds the simulation of one run from its derived seed. Anything random
// about a run (station coins, the BBA secret) must come from that seed.
using ScenarioBuilder = std::function<SimulationConfig(std::uint64_t run_seed)>;

// `runs` independent executions, run i seeded with run_seed(seed, i).
// BoxCounts mode splits every beep stream into boxes of `box_size` slots and
// records each box's beep count as one sample.
ObservationHistogram collect_histogram(const ScenarioBuilder& scenario, const FeedbackSpec& feedback,
                                       std::size_t runs, std::uint64_t seed,
                                       EventMode mode = EventMode::Stream, std::size_t box_size = 0);

inline constexpr double kDefaultSmoothing = 0.5;

struct PrivacyReport {
    double epsilon_hat = 0.0;
    double delta_hat = 0.0;
    // False when no assignment within the delta budget bounds the log-ratio;
    // epsilon_hat is then +infinity.
    bool bounded = true;
    double delta_budget = 0.0;
    std::uint64_t samples_x = 0;
    std::uint64_t samples_y = 0;
    double smoothing_alpha = kDefaultSmoothing;
    EventMode event_mode = EventMode::Stream;
    std::size_t outcomes = 0;         // |support(x) ∪ support(y)|
    std::size_t outcomes_in_tail = 0; // outcomes charged to delta
};

// Plug-in certificate of  Pr[x ∈ S] <= e^eps Pr[y ∈ S] + delta  (both
// directions) on the observed data.
//
// Every outcome in the joint support gets an add-alpha smoothed probability
// on each side, p(o) = (c(o) + alpha) / (N + alpha * K). Outcomes observed on
// one side only have an unbounded ratio. Outcomes are sorted by
// |ln(px/py)|, largest first, and moved into the delta tail while the raw
// empirical tail mass on both sides stays within `delta_budget`. epsilon_hat
// is the largest ratio left outside the tail; delta_hat is the max tail mass.
//
// Not a statistical upper confidence bound: it certifies the inequality on
// the sample only.
PrivacyReport estimate_eps_delta(const ObservationHistogram& hx, const ObservationHistogram& hy,
                                 double delta_budget, double alpha = kDefaultSmoothing);

// ---------------------------------------------------------------------------
// Analytic side: the box statistics of Binomial Boxes.
//
// A silent box shows T_S ~ Binomial(B, 1/2) beeps, a beep box T_B = T_S + 1.
// ---------------------------------------------------------------------------

// C(B, l) exactly, for B <= 64.
std::uint64_t binomial_coefficient(std::uint32_t B, std::uint32_t l);

// Pr[Binomial(B, 1/2) = l]. Exact rational arithmetic for B <= 64, log-gamma
// beyond. Throws std::invalid_argument when l > B.
double binomial_pmf(std::uint32_t B, std::uint32_t l);
std::vector<double> binomial_pmf_table(std::uint32_t B);

// f(B, l) = (B - l + 1) / l = Pr[T_S = l] / Pr[T_B = l], for 1 <= l <= B.
double likelihood_ratio_f(std::uint32_t B, std::uint32_t l);

// exp(-xi^2 / 2): bound on Pr[|T_S - B/2| > xi sqrt(B)].
double chernoff_bound(double xi);

struct Interval {
    double lo;
    double hi;
};

// [B/2 - xi sqrt(B), B/2 + xi sqrt(B) + 1].
Interval interval_I(std::uint32_t B, double xi);

// Integer points of `iv` clamped to [lo_clamp, hi_clamp]; empty when first > second.
std::pair<std::int64_t, std::int64_t> integer_span(Interval iv, std::int64_t lo_clamp, std::int64_t hi_clamp);

// Exact Pr[T_S outside I] and Pr[T_B outside I].
double silent_box_tail(std::uint32_t B, double xi);
double beep_box_tail(std::uint32_t B, double xi);

struct BbaTheory {
    std::uint32_t dummy_slots = 0;  // B
    double xi = 0.0;
    std::size_t boxes = 1;          // k
    double epsilon_per_box = 0.0;   // max |ln f(B, l)| over integer l in I ∩ [1, B]
    double delta_per_box = 0.0;     // exp(-xi^2/2)
    double epsilon = 0.0;           // k * epsilon_per_box
    double delta = 0.0;             // k * delta_per_box (not clamped to 1)
};

BbaTheory bba_theoretical_params(std::uint32_t B, double xi, std::size_t k);

// ---------------------------------------------------------------------------
// Cost of hiding.
// ---------------------------------------------------------------------------

struct CostOfHiding {
    double time_ratio = 1.0;
    // energy(hidden) / energy(base); when the base spends no energy, the
    // absolute hidden energy with base_energy_zero set.
    double energy_ratio = 1.0;
    bool base_energy_zero = false;
};

CostOfHiding cost_of_hiding(const ExecutionTrace& base, const ExecutionTrace& hidden);

// ---------------------------------------------------------------------------
// Goodness of fit against an exact pmf.
// ---------------------------------------------------------------------------

double total_variation(const std::vector<std::uint64_t>& observed, const std::vector<double>& pmf);

struct ChiSquare {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};

// Pearson's test. Adjacent cells are pooled from the outside in until every
// pooled cell expects at least `min_expected` samples.
ChiSquare chi_square_test(const std::vector<std::uint64_t>& observed, const std::vector<double>& pmf,
                          double min_expected = 5.0);

}  // namespace hidesim
