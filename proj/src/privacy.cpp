#include "hidesim/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "hidesim/digest.hpp"

namespace hidesim {

std::string_view event_mode_name(EventMode m) {
    return m == EventMode::BoxCounts ? "box_counts" : "stream";
}

std::optional<EventMode> parse_event_mode(std::string_view s) {
    if (s == "stream") return EventMode::Stream;
    if (s == "box_counts" || s == "box") return EventMode::BoxCounts;
    return std::nullopt;
}

void ObservationHistogram::merge(const ObservationHistogram& other) {
    if (other.mode != mode) throw std::invalid_argument("cannot merge histograms of different event modes");
    for (const auto& [k, c] : other.counts) add(k, c);
}

std::vector<std::uint64_t> ObservationHistogram::dense(std::size_t max_outcome) const {
    std::vector<std::uint64_t> out(max_outcome + 1, 0);
    for (const auto& [k, c] : counts) {
        std::size_t l = std::stoull(k);
        if (l > max_outcome) throw std::out_of_range("box count " + k + " exceeds " + std::to_string(max_outcome));
        out[l] += c;
    }
    return out;
}

ObservationHistogram collect_histogram(const ScenarioBuilder& scenario, const FeedbackSpec& feedback_spec,
                                       std::size_t runs, std::uint64_t seed, EventMode mode,
                                       std::size_t box_size) {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (mode == EventMode::BoxCounts) {
        if (feedback_spec.kind != FeedbackKind::BeepDetecting)
            throw ConfigError("box-count events are defined for the beep-detecting adversary");
        if (box_size < 2) throw ConfigError("box-count events need a box size >= 2");
    }
    ObservationHistogram h;
    h.mode = mode;
    for (std::size_t i = 0; i < runs; ++i) {
        ExecutionTrace trace = run(scenario(run_seed(seed, i)));
        if (mode == EventMode::Stream) {
            h.add(feedback(trace, feedback_spec).joined());
            continue;
        }
        auto beeps = feedback_beep(trace);
        if (beeps.size() % box_size != 0)
            throw ConfigError("trace length " + std::to_string(beeps.size()) + " is not a multiple of box size " +
                              std::to_string(box_size));
        for (std::size_t b = 0; b < beeps.size(); b += box_size) {
            auto c = std::accumulate(beeps.begin() + b, beeps.begin() + b + box_size, std::size_t{0});
            h.add(std::to_string(c));
        }
    }
    return h;
}

PrivacyReport estimate_eps_delta(const ObservationHistogram& hx, const ObservationHistogram& hy,
                                 double delta_budget, double alpha) {
    if (hx.total == 0 || hy.total == 0) throw std::invalid_argument("empty histogram");
    if (!(delta_budget >= 0.0 && delta_budget <= 1.0)) throw std::invalid_argument("delta budget must lie in [0, 1]");
    if (!(alpha >= 0.0)) throw std::invalid_argument("smoothing alpha must be >= 0");
    if (hx.mode != hy.mode) throw std::invalid_argument("histograms use different event modes");

    std::vector<std::string> support;
    for (const auto& [k, c] : hx.counts) support.push_back(k);
    for (const auto& [k, c] : hy.counts)
        if (!hx.counts.contains(k)) support.push_back(k);

    const double K = static_cast<double>(support.size());
    const double nx = static_cast<double>(hx.total);
    const double ny = static_cast<double>(hy.total);

    struct Cell {
        double log_ratio;  // |ln px/py|, +inf when one side never saw it
        double mass_x;     // raw empirical mass
        double mass_y;
        const std::string* key;
    };
    std::vector<Cell> cells;
    cells.reserve(support.size());
    for (const auto& k : support) {
        double cx = static_cast<double>(hx.count(k));
        double cy = static_cast<double>(hy.count(k));
        double r = std::numeric_limits<double>::infinity();
        if (cx > 0 && cy > 0) {
            double px = (cx + alpha) / (nx + alpha * K);
            double py = (cy + alpha) / (ny + alpha * K);
            r = std::abs(std::log(px / py));
        }
        cells.push_back(Cell{r, cx / nx, cy / ny, &k});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.log_ratio != b.log_ratio) return a.log_ratio > b.log_ratio;
        return ShortLex{}(*a.key, *b.key);
    });

    PrivacyReport rep;
    rep.delta_budget = delta_budget;
    rep.samples_x = hx.total;
    rep.samples_y = hy.total;
    rep.smoothing_alpha = alpha;
    rep.event_mode = hx.mode;
    rep.outcomes = cells.size();

    double tail_x = 0.0;
    double tail_y = 0.0;
    std::size_t i = 0;
    for (; i < cells.size(); ++i) {
        if (cells[i].log_ratio <= 0.0) break;
        double tx = tail_x + cells[i].mass_x;
        double ty = tail_y + cells[i].mass_y;
        if (std::max(tx, ty) > delta_budget) break;
        tail_x = tx;
        tail_y = ty;
    }
    rep.outcomes_in_tail = i;
    rep.delta_hat = std::max(tail_x, tail_y);
    rep.epsilon_hat = i < cells.size() ? std::max(0.0, cells[i].log_ratio) : 0.0;
    rep.bounded = std::isfinite(rep.epsilon_hat);
    return rep;
}

std::uint64_t binomial_coefficient(std::uint32_t B, std::uint32_t l) {
    if (B > 64) throw std::invalid_argument("exact binomial coefficients are limited to B <= 64");
    if (l > B) return 0;
    l = std::min(l, B - l);
    unsigned __int128 c = 1;
    for (std::uint32_t i = 1; i <= l; ++i) c = c * (B - l + i) / i;
    return static_cast<std::uint64_t>(c);
}

double binomial_pmf(std::uint32_t B, std::uint32_t l) {
    if (l > B) throw std::invalid_argument("binomial_pmf: l = " + std::to_string(l) + " exceeds B = " + std::to_string(B));
    if (B <= 64) return std::ldexp(static_cast<double>(binomial_coefficient(B, l)), -static_cast<int>(B));
    double log_p = std::lgamma(B + 1.0) - std::lgamma(l + 1.0) - std::lgamma(B - l + 1.0) - B * std::log(2.0);
    return std::exp(log_p);
}

std::vector<double> binomial_pmf_table(std::uint32_t B) {
    std::vector<double> pmf(B + 1);
    for (std::uint32_t l = 0; l <= B; ++l) pmf[l] = binomial_pmf(B, l);
    return pmf;
}

double likelihood_ratio_f(std::uint32_t B, std::uint32_t l) {
    if (l == 0) throw std::invalid_argument("likelihood_ratio_f: l must be >= 1");
    if (l > B) throw std::invalid_argument("likelihood_ratio_f: l must be <= B");
    return static_cast<double>(B - l + 1) / static_cast<double>(l);
}

double chernoff_bound(double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("chernoff_bound: xi must be > 0");
    return std::exp(-xi * xi / 2.0);
}

Interval interval_I(std::uint32_t B, double xi) {
    double half = B / 2.0;
    double spread = xi * std::sqrt(static_cast<double>(B));
    return Interval{half - spread, half + spread + 1.0};
}

std::pair<std::int64_t, std::int64_t> integer_span(Interval iv, std::int64_t lo_clamp, std::int64_t hi_clamp) {
    auto lo = static_cast<std::int64_t>(std::ceil(iv.lo));
    auto hi = static_cast<std::int64_t>(std::floor(iv.hi));
    return {std::max(lo, lo_clamp), std::min(hi, hi_clamp)};
}

double silent_box_tail(std::uint32_t B, double xi) {
    auto [lo, hi] = integer_span(interval_I(B, xi), 0, B);
    double inside = 0.0;
    for (std::int64_t l = lo; l <= hi; ++l) inside += binomial_pmf(B, static_cast<std::uint32_t>(l));
    return std::max(0.0, 1.0 - inside);
}

double beep_box_tail(std::uint32_t B, double xi) {
    // T_B = T_S + 1 lands in I iff T_S lands in I - 1.
    auto [lo, hi] = integer_span(interval_I(B, xi), 1, static_cast<std::int64_t>(B) + 1);
    double inside = 0.0;
    for (std::int64_t l = lo; l <= hi; ++l) inside += binomial_pmf(B, static_cast<std::uint32_t>(l - 1));
    return std::max(0.0, 1.0 - inside);
}

BbaTheory bba_theoretical_params(std::uint32_t B, double xi, std::size_t k) {
    if (!(xi > 0.0)) throw std::invalid_argument("bba_theoretical_params: xi must be > 0");
    if (k < 1) throw std::invalid_argument("bba_theoretical_params: k must be >= 1");
    if (B < 1) throw std::invalid_argument("bba_theoretical_params: B must be >= 1");
    auto [lo, hi] = integer_span(interval_I(B, xi), 1, B);
    if (lo > hi) throw std::invalid_argument("interval I has no integer point in [1, B]");
    double eps1 = 0.0;
    for (std::int64_t l = lo; l <= hi; ++l)
        eps1 = std::max(eps1, std::abs(std::log(likelihood_ratio_f(B, static_cast<std::uint32_t>(l)))));
    BbaTheory t;
    t.dummy_slots = B;
    t.xi = xi;
    t.boxes = k;
    t.epsilon_per_box = eps1;
    t.delta_per_box = chernoff_bound(xi);
    t.epsilon = static_cast<double>(k) * eps1;
    t.delta = static_cast<double>(k) * t.delta_per_box;
    return t;
}

CostOfHiding cost_of_hiding(const ExecutionTrace& base, const ExecutionTrace& hidden) {
    if (base.length() == 0) throw std::invalid_argument("cost_of_hiding: empty base trace");
    auto b = energy_and_time(base);
    auto h = energy_and_time(hidden);
    CostOfHiding c;
    c.time_ratio = static_cast<double>(h.time) / static_cast<double>(b.time);
    if (b.energy == 0) {
        c.base_energy_zero = true;
        c.energy_ratio = static_cast<double>(h.energy);
    } else {
        c.energy_ratio = static_cast<double>(h.energy) / static_cast<double>(b.energy);
    }
    return c;
}

double total_variation(const std::vector<std::uint64_t>& observed, const std::vector<double>& pmf) {
    if (observed.size() != pmf.size()) throw std::invalid_argument("total_variation: size mismatch");
    double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    if (n == 0) throw std::invalid_argument("total_variation: no samples");
    double tv = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) tv += std::abs(observed[i] / n - pmf[i]);
    return tv / 2.0;
}

ChiSquare chi_square_test(const std::vector<std::uint64_t>& observed, const std::vector<double>& pmf,
                          double min_expected) {
    if (observed.size() != pmf.size()) throw std::invalid_argument("chi_square_test: size mismatch");
    double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    if (n == 0) throw std::invalid_argument("chi_square_test: no samples");

    std::vector<std::pair<double, double>> cells;  // (observed, expected)
    double obs_acc = 0.0;
    double exp_acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        obs_acc += static_cast<double>(observed[i]);
        exp_acc += n * pmf[i];
        if (exp_acc >= min_expected) {
            cells.emplace_back(obs_acc, exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (exp_acc > 0.0 || obs_acc > 0.0) {
        if (cells.empty()) cells.emplace_back(obs_acc, exp_acc);
        else {
            cells.back().first += obs_acc;
            cells.back().second += exp_acc;
        }
    }

    ChiSquare out;
    for (auto [o, e] : cells) out.statistic += (o - e) * (o - e) / e;
    out.degrees_of_freedom = cells.size() > 1 ? cells.size() - 1 : 0;
    if (out.degrees_of_freedom > 0) {
        boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    }
    return out;
}

}  // namespace hidesim
