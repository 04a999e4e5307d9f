// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hidesim/adversary.hpp"
#include "hidesim/experiment.hpp"
#include "hidesim/obfuscation.hpp"
#include "hidesim/privacy.hpp"
#include "hidesim/programs.hpp"

using namespace hidesim;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTvMax = 0.02;
constexpr double kChiAlpha = 0.001;
constexpr double kMcSigmas = 3.0;
constexpr std::size_t kMcDraws = 1'000'000;
constexpr std::size_t kBoxSamples = 100'000;
constexpr double kEpsSlack = 0.05;
constexpr double kScaleLo = 0.5;
constexpr double kScaleHi = 7.0;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

NetworkGraph fig1_graph() {
    std::vector<std::pair<StationId, StationId>> e{{0, 1}, {0, 2}, {0, 3}, {2, 3}};
    return NetworkGraph(4, e);
}

ExecutionTrace fig1_trace(ChannelModel ch) {
    std::vector<std::string> s{"----T-", "---T-T", "T-TTT-", "T-----"};
    std::vector<std::vector<Intent>> sched;
    for (std::size_t v = 0; v < s.size(); ++v)
        sched.push_back(schedule_from_symbols(s[v], payload_of("m" + std::to_string(v))));
    return run({fig1_graph(), ch, scripted_programs(sched), 6, 0, "fig1"});
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " | " : "") + v[i];
    return s;
}

// 1 -------------------------------------------------------------------------
Outcome channel_states() {
    Outcome o;
    const std::vector<std::pair<ChannelModel, std::vector<std::string>>> expected = {
        {ChannelModel::Beeping, {"Beep", "Silence", "Beep", "Beep", "None", "Beep"}},
        {ChannelModel::NoCdMac, {"Noise", "Noise", "Transmission", "Noise", "None", "Transmission"}},
        {ChannelModel::CdMac, {"Collision", "Silence", "Transmission", "Collision", "None", "Transmission"}},
        {ChannelModel::DirectMessaging, {"m2,0 m3,0", "∅", "m2,0", "m1,0 m2,0", "None", "m1,0"}},
    };
    for (const auto& [ch, want] : expected) {
        auto t = fig1_trace(ch);
        std::vector<std::string> got;
        for (const auto& r : t.rounds) got.push_back(render_local(r.observations[0], 0));
        o.require(got == want, std::string(channel_name(ch)) + ": " + join(got));
    }
    if (o.pass) o.detail = "4 channels x 6 rounds exact";
    return o;
}

// 2 -------------------------------------------------------------------------
Outcome adversary_views() {
    Outcome o;
    auto t = fig1_trace(ChannelModel::Beeping);
    o.require(feedback_beep(t) == std::vector<std::uint8_t>{1, 0, 1, 1, 1, 1}, "beep stream");
    o.require(feedback_count(t) == std::vector<std::uint32_t>{2, 0, 1, 2, 2, 1}, "count stream");
    auto full = feedback_full(t);
    o.require(render_edges(full[0]) == "m2,0 m2,3 m3,0 m3,2", "round I: " + render_edges(full[0]));
    o.require(render_edges(full[4]) == "m0,1 m0,2 m0,3 m2,0 m2,3", "round V: " + render_edges(full[4]));
    if (o.pass) o.detail = "beep, count and full-information views exact";
    return o;
}

// 3 -------------------------------------------------------------------------
Outcome box_expansion() {
    Outcome o;
    using D = DummyKind;
    auto src = fixed_schedule({{2, {D::Silent, D::Silent}}, {0, {D::Beep, D::Silent}}, {1, {D::Silent, D::Beep}}});
    const std::vector<std::string> msgs{"SSS", "SBB", "BSS", "BBS"};
    const std::vector<std::string> matrix{"SSSSBSSSB", "SSSBBSSBB", "SSBSBSSSB", "SSBBBSSSB"};
    std::vector<std::vector<Intent>> sched;
    for (const auto& m : msgs) sched.push_back(schedule_from_symbols(m, {}));
    auto wrapped = run({NetworkGraph::complete(4), ChannelModel::Beeping, bba_wrap(scripted_programs(sched), {src, 3}),
                        9, 0, ""});
    auto inner = bba_unwrap(wrapped, *src);
    for (StationId v = 0; v < 4; ++v) {
        std::string w, m;
        for (const auto& r : wrapped.rounds) w += r.intents[v].transmitting() ? 'B' : 'S';
        for (const auto& r : inner.rounds) m += r.intents[v].transmitting() ? 'B' : 'S';
        o.require(w == matrix[v], "station " + std::to_string(v) + " slots " + w);
        o.require(m == msgs[v], "station " + std::to_string(v) + " message " + m);
    }
    if (o.pass) o.detail = "9-slot matrix and unwrapped messages exact";
    return o;
}

// 4 -------------------------------------------------------------------------
Outcome naive_oblivious() {
    Outcome o;
    const std::size_t N = 10, l = 2, runs = 25;
    FeedbackSpec beep{FeedbackKind::BeepDetecting, {}};
    std::vector<std::pair<std::string, ProgramFactory>> algorithms = {
        {"flooding", flooding_broadcast(0, payload_of("ab"))},
        {"chatter", random_chatter(7, 0.3, payload_of("cd"))},
        {"silent", silent_programs(4)},
        {"scripted", scripted_programs({schedule_from_symbols("T-T", payload_of("xy")), {},
                                        schedule_from_symbols("-TT", payload_of("zw"))},
                                       true)},
    };
    std::vector<std::pair<std::string, NetworkGraph>> topologies = {
        {"K5", NetworkGraph::complete(5)}, {"ring5", NetworkGraph::ring(5)}, {"path5", NetworkGraph::path(5)}};
    const std::string ones = "1|1|1|1|1|1|1|1|1|1";
    std::vector<ObservationHistogram> hists;
    for (const auto& [aname, alg] : algorithms) {
        for (const auto& [gname, g] : topologies) {
            auto scenario = [&, g = g, alg = alg](std::uint64_t seed) {
                return SimulationConfig{g, ChannelModel::DirectMessaging, naive_oblivious_wrap(alg, {N, l}), N, seed,
                                        aname};
            };
            auto h = collect_histogram(scenario, beep, runs, 3, EventMode::Stream);
            o.require(h.counts.size() == 1 && h.count(ones) == runs, aname + "/" + gname + " feedback not 1^N");
            hists.push_back(std::move(h));
        }
    }
    for (std::size_t i = 0; i < hists.size(); ++i)
        for (std::size_t j = i + 1; j < hists.size(); ++j) {
            auto r = estimate_eps_delta(hists[i], hists[j], 0.0);
            o.require(r.epsilon_hat == 0.0 && r.delta_hat == 0.0, "pair estimate not (0, 0)");
        }
    o.detail = o.pass ? std::to_string(hists.size()) + " scenarios, all pairs (0, 0)" : o.detail;
    return o;
}

// 5 -------------------------------------------------------------------------
Outcome bba_correctness() {
    Outcome o;
    std::vector<std::pair<std::string, NetworkGraph>> graphs = {{"path6", NetworkGraph::path(6)},
                                                                {"K4", NetworkGraph::complete(4)}};
    std::size_t checked = 0;
    for (const auto& [gname, g] : graphs) {
        for (auto ch : {ChannelModel::CdMac, ChannelModel::Beeping}) {
            auto inner = flooding_broadcast(0, payload_of("flood"));
            auto plain = run({g, ch, inner, 100, 0, "flooding"});
            for (std::uint64_t s = 0; s < 100; ++s) {
                auto src = secret_schedule(SharedSecret::derive(1000 + s), 6);
                auto wrapped = run({g, ch, bba_wrap(inner, {src, plain.length()}), 1000, 0, "flooding"});
                auto back = bba_unwrap(wrapped, *src);
                bool same = back.rounds == plain.rounds && back.final_memories == plain.final_memories;
                o.require(same, gname + "/" + std::string(channel_name(ch)) + " secret " + std::to_string(s));
                ++checked;
            }
        }
    }
    if (o.pass) o.detail = std::to_string(checked) + " wrapped runs unwrap exactly";
    return o;
}

// Box-count histograms shared by criteria 6 and 9.
struct BoxData {
    std::uint32_t B;
    ObservationHistogram silent, beep;
};
std::vector<BoxData> g_boxes;

ObservationHistogram sample_boxes(std::uint32_t B, bool beep_box) {
    auto g = NetworkGraph::complete(2);
    auto scenario = [&](std::uint64_t seed) {
        auto inner = scripted_programs({beep_box ? schedule_from_symbols("T", {}) : std::vector<Intent>{}, {}});
        return SimulationConfig{g, ChannelModel::Beeping,
                                bba_wrap(inner, {secret_schedule(SharedSecret::derive(seed), B), 1}), B + 1, seed, ""};
    };
    return collect_histogram(scenario, {FeedbackKind::BeepDetecting, {}}, kBoxSamples, beep_box ? 7 : 8,
                             EventMode::BoxCounts, B + 1);
}

// 6 -------------------------------------------------------------------------
Outcome box_distributions() {
    Outcome o;
    std::ostringstream d;
    for (std::uint32_t B : {16u, 100u}) {
        BoxData data{B, sample_boxes(B, false), sample_boxes(B, true)};
        auto pmf = binomial_pmf_table(B);
        std::vector<double> silent_pmf(pmf);
        silent_pmf.push_back(0.0);  // B+1 beeps is impossible in a silent box
        std::vector<double> beep_pmf(B + 2, 0.0);
        for (std::uint32_t l = 0; l <= B; ++l) beep_pmf[l + 1] = pmf[l];
        for (auto [name, h, ref] : {std::tuple{"silent", &data.silent, &silent_pmf}, std::tuple{"beep", &data.beep, &beep_pmf}}) {
            auto obs = h->dense(B + 1);
            double tv = total_variation(obs, *ref);
            auto cs = chi_square_test(obs, *ref);
            o.require(h->total == kBoxSamples, "sample count");
            o.require(tv <= kTvMax, std::string(name) + " B=" + std::to_string(B) + " TV " + std::to_string(tv));
            o.require(cs.p_value > kChiAlpha,
                      std::string(name) + " B=" + std::to_string(B) + " chi2 p " + std::to_string(cs.p_value));
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s B=%u TV=%.4f p=%.3f; ", name, B, tv, cs.p_value);
            d << buf;
        }
        g_boxes.push_back(std::move(data));
    }
    if (o.pass) o.detail = d.str();
    return o;
}

// 7 -------------------------------------------------------------------------
Outcome sandwich() {
    Outcome o;
    std::size_t points = 0;
    long double worst_lo = 1e9, worst_hi = 1e9;
    for (std::uint32_t B = 64; B <= 1024; B *= 2) {
        for (double xi : {1.5, 2.0, 3.0}) {
            if (B < 25.0 * xi * xi) continue;
            auto [lo, hi] = integer_span(interval_I(B, xi), 1, B);
            const long double root = std::sqrt(static_cast<long double>(B));
            for (std::int64_t l = lo; l <= hi; ++l) {
                // f = (B - l + 1) / l as an exact ratio of integers.
                const long double num = static_cast<long double>(B - l + 1);
                const long double den = static_cast<long double>(l);
                const long double lower = 1.0L - 5.0L * xi / root;
                const long double upper = 1.0L + 7.0L * xi / root;
                worst_lo = std::min(worst_lo, num - lower * den);
                worst_hi = std::min(worst_hi, upper * den - num);
                o.require(num >= lower * den, "lower bound fails at B=" + std::to_string(B) + " l=" + std::to_string(l));
                o.require(num <= upper * den, "upper bound fails at B=" + std::to_string(B) + " l=" + std::to_string(l));
                ++points;
            }
        }
    }
    if (o.pass) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu points; min slack lower %.3Lf, upper %.3Lf (times l)", points, worst_lo,
                      worst_hi);
        o.detail = buf;
    }
    return o;
}

// 8 -------------------------------------------------------------------------
Outcome chernoff() {
    Outcome o;
    for (std::uint32_t B = 64; B <= 1024; B *= 2)
        for (double xi : {1.5, 2.0, 3.0}) {
            if (B < 25.0 * xi * xi) continue;
            double bound = chernoff_bound(xi);
            o.require(silent_box_tail(B, xi) <= bound, "silent tail B=" + std::to_string(B));
            o.require(beep_box_tail(B, xi) <= bound, "beep tail B=" + std::to_string(B));
        }
    // Monte Carlo through the schedule generator itself: a silent box's beep
    // count is its number of beep dummies.
    const std::uint32_t B = 100;
    const double xi = 2.0;
    auto iv = interval_I(B, xi);
    auto secret = SharedSecret::derive(2024);
    std::size_t out_s = 0, out_b = 0;
    for (std::size_t i = 0; i < kMcDraws; ++i) {
        auto t = bba_schedule(secret, i, B).beep_dummies();
        out_s += t < iv.lo || t > iv.hi;
        out_b += t + 1 < iv.lo || t + 1 > iv.hi;
    }
    char buf[160];
    std::string detail;
    for (auto [name, count, exact] : {std::tuple{"silent", out_s, silent_box_tail(B, xi)},
                                      std::tuple{"beep", out_b, beep_box_tail(B, xi)}}) {
        double p_hat = static_cast<double>(count) / kMcDraws;
        double se = std::sqrt(exact * (1 - exact) / kMcDraws);
        o.require(std::abs(p_hat - exact) <= kMcSigmas * se, std::string(name) + " Monte Carlo tail disagrees");
        o.require(exact <= chernoff_bound(xi), std::string(name) + " tail above bound");
        std::snprintf(buf, sizeof buf, "%s tail exact %.3g mc %.3g (%.2f se); ", name, exact, p_hat,
                      se > 0 ? std::abs(p_hat - exact) / se : 0.0);
        detail += buf;
    }
    if (o.pass) o.detail = detail;
    return o;
}

// 9 -------------------------------------------------------------------------
Outcome fact2_trend() {
    Outcome o;
    const double xi = 2.0;
    double prev = INFINITY;
    std::string detail;
    char buf[96];
    for (std::uint32_t B : {64u, 256u, 1024u}) {
        double eps1 = bba_theoretical_params(B, xi, 1).epsilon_per_box;
        double scaled = eps1 * std::sqrt(static_cast<double>(B)) / xi;
        o.require(eps1 < prev, "eps1 not strictly decreasing at B=" + std::to_string(B));
        o.require(scaled >= kScaleLo && scaled <= kScaleHi, "eps1 sqrt(B)/xi out of range at B=" + std::to_string(B));
        prev = eps1;
        std::snprintf(buf, sizeof buf, "B=%u eps1=%.3f scaled=%.2f; ", B, eps1, scaled);
        detail += buf;
    }
    o.require(g_boxes.size() == 2, "criterion 6 histograms unavailable");
    for (const auto& d : g_boxes) {
        auto th = bba_theoretical_params(d.B, xi, 1);
        auto r = estimate_eps_delta(d.beep, d.silent, th.delta_per_box);
        o.require(r.bounded && r.epsilon_hat <= th.epsilon_per_box + kEpsSlack,
                  "B=" + std::to_string(d.B) + " eps_hat " + std::to_string(r.epsilon_hat));
        std::snprintf(buf, sizeof buf, "B=%u eps_hat=%.3f<=%.3f; ", d.B, r.epsilon_hat, th.epsilon_per_box);
        detail += buf;
    }
    if (o.pass) o.detail = detail;
    return o;
}

// 10 ------------------------------------------------------------------------
Outcome cost() {
    Outcome o;
    // BBA: time grows by exactly B + 1.
    for (std::uint32_t B : {1u, 7u, 32u}) {
        for (auto ch : {ChannelModel::Beeping, ChannelModel::CdMac}) {
            auto g = NetworkGraph::random_connected(9, 0.2, B);
            for (auto inner : {flooding_broadcast(0, payload_of("x")), random_chatter(5, 0.4, payload_of("y"))}) {
                auto base = run({g, ch, inner, 100, B, ""});
                auto src = secret_schedule(SharedSecret::derive(B), B);
                auto hidden = run({g, ch, bba_wrap(inner, {src, base.length()}), 10000, B, ""});
                o.require(cost_of_hiding(base, hidden).time_ratio == B + 1.0, "BBA time ratio at B=" + std::to_string(B));
            }
        }
    }
    // Naive Oblivious on flooding/K4: the excess energy is exactly the dummy-only slots.
    auto g = NetworkGraph::complete(4);
    auto inner = flooding_broadcast(0, payload_of("abc"));
    const std::size_t N = 6;
    auto base = run({g, ChannelModel::DirectMessaging, inner, 100, 0, ""});
    auto hidden = run({g, ChannelModel::DirectMessaging, naive_oblivious_wrap(inner, {N, 3}), N, 0, ""});
    auto c = cost_of_hiding(base, hidden);
    auto base_tx = transmissions_per_station(base);
    auto hidden_tx = transmissions_per_station(hidden);
    std::vector<std::size_t> real(4, 0), dummy(4, 0);
    for (const auto& r : hidden.rounds)
        for (StationId v = 0; v < 4; ++v) {
            const auto& env = r.intents[v].envelopes;
            bool any_real = std::any_of(env.begin(), env.end(),
                                        [](const Envelope& e) { return !e.payload.empty() && e.payload[0] == kRealFlag; });
            ++(any_real ? real[v] : dummy[v]);
        }
    o.require(c.energy_ratio >= 1.0, "energy ratio below 1");
    for (StationId v = 0; v < 4; ++v) {
        o.require(real[v] == base_tx[v], "real transmissions differ at station " + std::to_string(v));
        o.require(hidden_tx[v] == base_tx[v] + dummy[v], "excess not explained by dummies");
    }
    auto emax = *std::max_element(hidden_tx.begin(), hidden_tx.end());
    auto bmax = *std::max_element(base_tx.begin(), base_tx.end());
    o.require(c.energy_ratio == static_cast<double>(emax) / static_cast<double>(bmax), "energy ratio by count");
    if (o.pass) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "BBA time ratio B+1 everywhere; NO energy %zu/%zu = %.1f", emax, bmax,
                      c.energy_ratio);
        o.detail = buf;
    }
    return o;
}

// 11 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        auto other = b / fs::relative(e.path(), a);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
        ++files;
    }
    return true;
}

Outcome determinism() {
    Outcome o;
    auto root = fs::temp_directory_path() / "hidesim_acceptance_det";
    fs::remove_all(root);
    auto x = nlohmann::json::parse(R"({
        "schema_version": 1,
        "topology": {"generator": "random", "n": 10, "p": 0.2, "seed": 4},
        "channels": ["beeping", "cd"],
        "algorithm": {"name": "random_chatter", "rounds": 6, "p": 0.3, "message": "q"},
        "wrapper": {"name": "bba", "B": 5},
        "adversary": {"kind": "count"},
        "runs": 20,
        "seed": 77
    })");
    auto y = x;
    y["algorithm"]["p"] = 0.6;
    y["channels"] = nlohmann::json::array({"cd"});
    auto x1 = x;
    x1["channels"] = nlohmann::json::array({"cd"});
    std::size_t files = 0;
    for (int rep = 0; rep < 2; ++rep) {
        auto dir = root / ("rep" + std::to_string(rep));
        cmd_run(parse_config(x), dir / "run");
        cmd_run(load_config(HIDESIM_SOURCE_DIR "/configs/fig1.json"), dir / "fig1");
        cmd_compare(parse_config(x1), parse_config(y), dir / "compare");
        cmd_report({dir / "compare" / "report.json"}, dir / "summary.csv");
    }
    o.require(same_tree(root / "rep0", root / "rep1", files), "outputs differ between identical runs");
    if (o.pass) o.detail = std::to_string(files) + " files byte-identical";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {1, "fig1 channel states at v0", 1, channel_states},
        {2, "fig1 adversary views", 1, adversary_views},
        {3, "injected 3-box schedule", 1, box_expansion},
        {4, "naive oblivious hides everything", 10, naive_oblivious},
        {5, "binomial boxes preserves executions", 30, bba_correctness},
        {6, "box beep-count distributions", 120, box_distributions},
        {7, "sandwich bounds on f", 10, sandwich},
        {8, "concentration tail bound", 60, chernoff},
        {9, "epsilon trend and empirical epsilon", 120, fact2_trend},
        {10, "cost of hiding", 10, cost},
        {11, "determinism", 10, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += " [over time budget]";
        }
        failures += !o.pass;
        std::printf("%s criterion %2d  %-40s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
