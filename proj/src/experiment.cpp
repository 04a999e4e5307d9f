#include "hidesim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hidesim/digest.hpp"
#include "hidesim/programs.hpp"
#include "hidesim/trace_io.hpp"

namespace hidesim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
    for (const auto& [k, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || k == a;
        if (!ok) fail(path + "." + k, "unknown field");
    }
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// --- topology -------------------------------------------------------------

json normalize_topology(const json& t, const fs::path& base_dir, NetworkGraph& graph) {
    const std::string path = "topology";
    if (!t.is_object()) fail(path, "expected an object");
    try {
        if (t.contains("inline")) {
            reject_unknown(t, {"inline"}, path);
            graph = parse_topology(as_string(t["inline"], path + ".inline"));
            return {{"inline", render_topology(graph)}};
        }
        if (t.contains("file")) {
            reject_unknown(t, {"file"}, path);
            fs::path f = as_string(t["file"], path + ".file");
            if (f.is_relative()) f = base_dir / f;
            graph = parse_topology(read_file(f));
            return {{"inline", render_topology(graph)}};
        }
        if (t.contains("generator")) {
            reject_unknown(t, {"generator", "n", "p", "seed"}, path);
            auto gen = as_string(t["generator"], path + ".generator");
            auto n = as_uint(require(t, "n", path), path + ".n");
            if (gen == "complete") graph = NetworkGraph::complete(n);
            else if (gen == "path") graph = NetworkGraph::path(n);
            else if (gen == "ring") graph = NetworkGraph::ring(n);
            else if (gen == "random") {
                double p = t.contains("p") ? as_double(t["p"], path + ".p") : 0.2;
                std::uint64_t s = t.contains("seed") ? as_uint(t["seed"], path + ".seed") : 0;
                graph = NetworkGraph::random_connected(n, p, s);
                return {{"generator", gen}, {"n", n}, {"p", p}, {"seed", s}};
            } else {
                fail(path + ".generator", "unknown generator '" + gen + "'");
            }
            return {{"generator", gen}, {"n", n}};
        }
    } catch (const TopologyError& e) {
        fail(path, e.what());
    }
    fail(path, "expected one of 'inline', 'file' or 'generator'");
}

// --- algorithm ------------------------------------------------------------

struct AlgorithmSpec {
    std::string name;
    StationId source = 0;
    std::string message = "hello";
    std::vector<std::string> schedules;
    std::optional<std::string> payload;
    bool terminate_at_end = false;
    std::size_t rounds = 1;
    double p = 0.5;
};

json normalize_algorithm(const json& a, AlgorithmSpec& spec, const NetworkGraph& g) {
    const std::string path = "algorithm";
    if (!a.is_object()) fail(path, "expected an object");
    spec.name = as_string(require(a, "name", path), path + ".name");
    if (spec.name == "flooding") {
        reject_unknown(a, {"name", "source", "message"}, path);
        spec.source = static_cast<StationId>(a.contains("source") ? as_uint(a["source"], path + ".source") : 0);
        if (!g.contains(spec.source)) fail(path + ".source", "station out of range");
        if (a.contains("message")) spec.message = as_string(a["message"], path + ".message");
        return {{"name", spec.name}, {"source", spec.source}, {"message", spec.message}};
    }
    if (spec.name == "scripted") {
        reject_unknown(a, {"name", "schedule", "payload", "terminate_at_end"}, path);
        const json& s = require(a, "schedule", path);
        if (!s.is_array()) fail(path + ".schedule", "expected one symbol string per station");
        if (s.size() > g.node_count()) fail(path + ".schedule", "more schedules than stations");
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto sym = as_string(s[i], path + ".schedule[" + std::to_string(i) + "]");
            try {
                (void)schedule_from_symbols(sym, {});
            } catch (const ConfigError& e) {
                fail(path + ".schedule[" + std::to_string(i) + "]", e.what());
            }
            spec.schedules.push_back(sym);
        }
        if (a.contains("payload") && !a["payload"].is_null()) spec.payload = as_string(a["payload"], path + ".payload");
        if (a.contains("terminate_at_end")) {
            if (!a["terminate_at_end"].is_boolean()) fail(path + ".terminate_at_end", "expected a boolean");
            spec.terminate_at_end = a["terminate_at_end"].get<bool>();
        }
        json out = {{"name", spec.name}, {"schedule", spec.schedules}, {"terminate_at_end", spec.terminate_at_end}};
        out["payload"] = spec.payload ? json(*spec.payload) : json(nullptr);
        return out;
    }
    if (spec.name == "silent") {
        reject_unknown(a, {"name", "rounds"}, path);
        spec.rounds = a.contains("rounds") ? as_uint(a["rounds"], path + ".rounds") : 1;
        if (spec.rounds < 1) fail(path + ".rounds", "must be >= 1");
        return {{"name", spec.name}, {"rounds", spec.rounds}};
    }
    if (spec.name == "random_chatter") {
        reject_unknown(a, {"name", "rounds", "p", "message"}, path);
        spec.rounds = as_uint(require(a, "rounds", path), path + ".rounds");
        if (spec.rounds < 1) fail(path + ".rounds", "must be >= 1");
        spec.p = a.contains("p") ? as_double(a["p"], path + ".p") : 0.5;
        if (spec.p < 0.0 || spec.p > 1.0) fail(path + ".p", "must lie in [0, 1]");
        if (a.contains("message")) spec.message = as_string(a["message"], path + ".message");
        return {{"name", spec.name}, {"rounds", spec.rounds}, {"p", spec.p}, {"message", spec.message}};
    }
    fail(path + ".name", "unknown algorithm '" + spec.name + "' (flooding, scripted, silent, random_chatter)");
}

Payload scripted_payload(const AlgorithmSpec& spec, StationId v) {
    return payload_of(spec.payload ? *spec.payload : "m" + std::to_string(v));
}

ProgramFactory make_algorithm(const AlgorithmSpec& spec, const NetworkGraph& g) {
    if (spec.name == "flooding") return flooding_broadcast(spec.source, payload_of(spec.message));
    if (spec.name == "silent") return silent_programs(spec.rounds);
    if (spec.name == "random_chatter") return random_chatter(spec.rounds, spec.p, payload_of(spec.message));
    std::vector<std::vector<Intent>> schedules;
    for (StationId v = 0; v < g.node_count(); ++v)
        schedules.push_back(v < spec.schedules.size()
                                ? schedule_from_symbols(spec.schedules[v], scripted_payload(spec, v))
                                : std::vector<Intent>{});
    return scripted_programs(std::move(schedules), spec.terminate_at_end);
}

std::optional<std::size_t> natural_message_length(const AlgorithmSpec& spec, std::size_t n) {
    if (spec.name == "flooding" || spec.name == "random_chatter") return spec.message.size();
    if (spec.name == "silent") return 1;
    std::optional<std::size_t> len;
    for (StationId v = 0; v < n; ++v) {
        auto l = scripted_payload(spec, v).size();
        if (len && *len != l) return std::nullopt;
        len = l;
    }
    return len;
}

// --- wrapper --------------------------------------------------------------

json normalize_wrapper(const json& w, WrapperConfig& cfg) {
    const std::string path = "wrapper";
    if (!w.is_object()) fail(path, "expected an object");
    auto name = as_string(require(w, "name", path), path + ".name");
    auto optional_count = [&](const char* key) -> std::optional<std::size_t> {
        if (!w.contains(key) || (w[key].is_string() && w[key] == "auto")) return std::nullopt;
        auto v = as_uint(w[key], path + "." + key);
        if (v < 1) fail(path + "." + key, "must be >= 1");
        return v;
    };
    auto count_json = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json("auto"); };

    if (name == "none") {
        reject_unknown(w, {"name"}, path);
        cfg.kind = WrapperKind::None;
        return {{"name", "none"}};
    }
    if (name == "naive_oblivious") {
        reject_unknown(w, {"name", "N", "l"}, path);
        cfg.kind = WrapperKind::NaiveOblivious;
        cfg.rounds = optional_count("N");
        cfg.message_length = optional_count("l");
        return {{"name", name}, {"N", count_json(cfg.rounds)}, {"l", count_json(cfg.message_length)}};
    }
    if (name == "bba") {
        reject_unknown(w, {"name", "B", "boxes", "secret", "schedule"}, path);
        cfg.kind = WrapperKind::Bba;
        auto B = as_uint(require(w, "B", path), path + ".B");
        if (B < 1) fail(path + ".B", "must be >= 1");
        cfg.dummy_slots = static_cast<std::uint32_t>(B);
        cfg.boxes = optional_count("boxes");
        json out = {{"name", name}, {"B", B}, {"boxes", count_json(cfg.boxes)}};
        std::string secret = w.contains("secret") ? as_string(w["secret"], path + ".secret") : "random";
        if (secret != "random") {
            try {
                cfg.secret = SharedSecret::from_hex(secret);
            } catch (const ConfigError& e) {
                fail(path + ".secret", e.what());
            }
        }
        out["secret"] = secret;
        if (w.contains("schedule")) {
            const json& s = w["schedule"];
            if (!s.is_array() || s.empty()) fail(path + ".schedule", "expected a nonempty array of boxes");
            json norm = json::array();
            for (std::size_t i = 0; i < s.size(); ++i) {
                std::string bp = path + ".schedule[" + std::to_string(i) + "]";
                reject_unknown(s[i], {"true_slot", "dummies"}, bp);
                BoxSchedule box;
                box.true_slot = static_cast<std::uint32_t>(as_uint(require(s[i], "true_slot", bp), bp + ".true_slot"));
                auto d = as_string(require(s[i], "dummies", bp), bp + ".dummies");
                for (char c : d) {
                    if (c == 'B') box.dummy_kinds.push_back(DummyKind::Beep);
                    else if (c == 'S') box.dummy_kinds.push_back(DummyKind::Silent);
                    else fail(bp + ".dummies", "use 'B' (beep) and 'S' (silent)");
                }
                if (box.dummy_slots() != B) fail(bp + ".dummies", "expected exactly B = " + std::to_string(B) + " dummies");
                if (box.true_slot > B) fail(bp + ".true_slot", "must be <= B");
                norm.push_back({{"true_slot", box.true_slot}, {"dummies", d}});
                cfg.schedule.push_back(std::move(box));
            }
            out["schedule"] = norm;
        }
        return out;
    }
    fail(path + ".name", "unknown wrapper '" + name + "' (none, naive_oblivious, bba)");
}

// --- taxonomy -------------------------------------------------------------

json normalize_taxonomy(const json& t, const WrapperConfig& w) {
    const std::string path = "taxonomy";
    if (!t.is_null() && !t.is_object()) fail(path, "expected an object");
    struct Axis {
        const char* key;
        std::vector<std::string> values;
        std::string fallback;
    };
    std::vector<Axis> axes = {
        {"station_topology", {"known", "unknown"}, "unknown"},
        {"station_algorithm", {"local", "global"}, "local"},
        {"secret_sharing", {"secret", "open"}, w.kind == WrapperKind::Bba ? "secret" : "open"},
        {"adversary_topology", {"aware", "restricted"}, "aware"},
        {"adversary_algorithm", {"aware", "restricted"}, "aware"},
    };
    json out = json::object();
    if (t.is_object()) {
        for (const auto& [k, _] : t.items()) {
            bool known = false;
            for (const auto& a : axes) known = known || k == a.key;
            if (!known) fail(path + "." + k, "unknown taxonomy axis");
        }
    }
    for (const auto& a : axes) {
        std::string v = a.fallback;
        if (t.is_object() && t.contains(a.key)) v = as_string(t[a.key], path + "." + a.key);
        if (std::find(a.values.begin(), a.values.end(), v) == a.values.end())
            fail(path + "." + a.key, "unknown value '" + v + "'");
        out[a.key] = v;
    }
    if (w.kind == WrapperKind::Bba && out["secret_sharing"] != "secret")
        fail(path + ".secret_sharing", "binomial boxes needs a shared secret");
    return out;
}

}  // namespace

namespace {
AlgorithmSpec algorithm_of(const ExperimentConfig& cfg) {
    AlgorithmSpec spec;
    (void)normalize_algorithm(cfg.normalized.at("algorithm"), spec, cfg.graph);
    return spec;
}
}  // namespace

std::string ExperimentConfig::hash() const { return short_hash(normalized.dump()); }

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir, const ConfigOverrides& overrides) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(doc, {"schema_version", "name", "topology", "channel", "channels", "algorithm", "wrapper",
                         "adversary", "runs", "seed", "max_rounds", "privacy", "taxonomy"},
                   "config");
    ExperimentConfig cfg;
    json n = json::object();

    auto version = as_uint(require(doc, "schema_version", "config"), "schema_version");
    if (version != kSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(version));
    n["schema_version"] = kSchemaVersion;

    cfg.name = doc.contains("name") ? as_string(doc["name"], "name") : "experiment";
    n["name"] = cfg.name;

    n["topology"] = normalize_topology(require(doc, "topology", "config"), base_dir, cfg.graph);

    if (doc.contains("channel") && doc.contains("channels")) fail("channels", "give either 'channel' or 'channels'");
    json ch = doc.contains("channels") ? doc["channels"] : doc.contains("channel") ? doc["channel"] : json("beeping");
    if (ch.is_string()) ch = json::array({ch});
    if (!ch.is_array() || ch.empty()) fail("channels", "expected a channel name or a nonempty list");
    json ch_norm = json::array();
    for (std::size_t i = 0; i < ch.size(); ++i) {
        auto m = parse_channel(as_string(ch[i], "channels[" + std::to_string(i) + "]"));
        if (!m) fail("channels[" + std::to_string(i) + "]", "unknown channel (beeping, nocd, cd, direct)");
        if (std::find(cfg.channels.begin(), cfg.channels.end(), *m) != cfg.channels.end())
            fail("channels[" + std::to_string(i) + "]", "duplicate channel");
        cfg.channels.push_back(*m);
        ch_norm.push_back(channel_name(*m));
    }
    n["channels"] = ch_norm;

    AlgorithmSpec alg;
    n["algorithm"] = normalize_algorithm(require(doc, "algorithm", "config"), alg, cfg.graph);
    n["wrapper"] = normalize_wrapper(doc.contains("wrapper") ? doc["wrapper"] : json{{"name", "none"}}, cfg.wrapper);

    for (auto m : cfg.channels) {
        if (cfg.wrapper.kind == WrapperKind::NaiveOblivious && m != ChannelModel::DirectMessaging)
            fail("wrapper", "naive_oblivious requires the direct channel, got " + std::string(channel_name(m)));
        if (cfg.wrapper.kind == WrapperKind::Bba && m == ChannelModel::DirectMessaging)
            fail("wrapper", "bba requires a beeping or MAC channel, got direct");
    }
    if (cfg.wrapper.kind == WrapperKind::NaiveOblivious && !cfg.wrapper.message_length &&
        !natural_message_length(alg, cfg.graph.node_count()))
        fail("wrapper.l", "scripted payloads differ in length; set l or a common payload");

    json adv = doc.contains("adversary") ? doc["adversary"] : json{{"kind", "beep"}};
    if (!adv.is_object()) fail("adversary", "expected an object");
    reject_unknown(adv, {"kind", "subset"}, "adversary");
    auto kind = parse_feedback(adv.contains("kind") ? as_string(adv["kind"], "adversary.kind") : "beep");
    if (!kind) fail("adversary.kind", "unknown feedback kind (beep, count, local, full)");
    cfg.adversary.kind = *kind;
    json adv_norm = {{"kind", feedback_name(*kind)}};
    if (*kind == FeedbackKind::Local) {
        const json& s = require(adv, "subset", "adversary");
        if (!s.is_array() || s.empty()) fail("adversary.subset", "expected a nonempty list of station ids");
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto v = as_uint(s[i], "adversary.subset[" + std::to_string(i) + "]");
            if (!cfg.graph.contains(static_cast<StationId>(v)))
                fail("adversary.subset[" + std::to_string(i) + "]", "station out of range");
            cfg.adversary.subset.push_back(static_cast<StationId>(v));
        }
        adv_norm["subset"] = cfg.adversary.subset;
    } else if (adv.contains("subset")) {
        fail("adversary.subset", "only the local adversary takes a subset");
    }
    n["adversary"] = adv_norm;

    cfg.runs = overrides.runs ? *overrides.runs : doc.contains("runs") ? as_uint(doc["runs"], "runs") : 1;
    if (cfg.runs < 1) fail("runs", "must be >= 1");
    cfg.seed = overrides.seed ? *overrides.seed : doc.contains("seed") ? as_uint(doc["seed"], "seed") : 0;
    cfg.max_rounds = doc.contains("max_rounds") ? as_uint(doc["max_rounds"], "max_rounds") : 10000;
    if (cfg.max_rounds < 1) fail("max_rounds", "must be >= 1");
    n["runs"] = cfg.runs;
    n["seed"] = cfg.seed;
    n["max_rounds"] = cfg.max_rounds;

    json priv = doc.contains("privacy") ? doc["privacy"] : json::object();
    if (!priv.is_object()) fail("privacy", "expected an object");
    reject_unknown(priv, {"xi", "delta_budget", "smoothing_alpha", "event_mode", "distance", "radius"}, "privacy");
    if (priv.contains("xi")) cfg.xi = as_double(priv["xi"], "privacy.xi");
    if (!(cfg.xi > 0.0)) fail("privacy.xi", "must be > 0");
    if (priv.contains("delta_budget") && !priv["delta_budget"].is_null()) {
        cfg.delta_budget = as_double(priv["delta_budget"], "privacy.delta_budget");
        if (*cfg.delta_budget < 0.0 || *cfg.delta_budget > 1.0) fail("privacy.delta_budget", "must lie in [0, 1]");
    }
    if (priv.contains("smoothing_alpha")) cfg.smoothing_alpha = as_double(priv["smoothing_alpha"], "privacy.smoothing_alpha");
    if (cfg.smoothing_alpha < 0.0) fail("privacy.smoothing_alpha", "must be >= 0");
    std::string mode = priv.contains("event_mode") ? as_string(priv["event_mode"], "privacy.event_mode") : "auto";
    if (mode != "auto") {
        cfg.event_mode = parse_event_mode(mode);
        if (!cfg.event_mode) fail("privacy.event_mode", "expected auto, stream or box_counts");
        mode = std::string(event_mode_name(*cfg.event_mode));
    }
    json priv_norm = {{"xi", cfg.xi},
                      {"delta_budget", cfg.delta_budget ? json(*cfg.delta_budget) : json(nullptr)},
                      {"smoothing_alpha", cfg.smoothing_alpha},
                      {"event_mode", mode},
                      {"distance", priv.contains("distance") ? priv["distance"] : json(nullptr)},
                      {"radius", priv.contains("radius") ? priv["radius"] : json(nullptr)}};
    n["privacy"] = priv_norm;

    n["taxonomy"] = normalize_taxonomy(doc.contains("taxonomy") ? doc["taxonomy"] : json(nullptr), cfg.wrapper);
    cfg.normalized = std::move(n);
    return cfg;
}

ExperimentConfig load_config(const fs::path& file, const ConfigOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(read_file(file));
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return parse_config(doc, file.parent_path(), overrides);
}

SimulationConfig base_simulation(const ExperimentConfig& cfg, ChannelModel channel, std::uint64_t seed) {
    AlgorithmSpec spec = algorithm_of(cfg);
    return SimulationConfig{cfg.graph, channel, make_algorithm(spec, cfg.graph), cfg.max_rounds, seed, spec.name};
}

namespace {

struct Resolved {
    std::size_t rounds = 0;          // naive oblivious N
    std::size_t message_length = 0;  // naive oblivious l
    std::size_t boxes = 0;           // bba k
};

Resolved resolve(const ExperimentConfig& cfg, ChannelModel channel, std::uint64_t seed) {
    Resolved r;
    const auto& w = cfg.wrapper;
    bool need_length = (w.kind == WrapperKind::NaiveOblivious && !w.rounds) || (w.kind == WrapperKind::Bba && !w.boxes);
    std::size_t inner = 0;
    if (need_length) inner = run(base_simulation(cfg, channel, seed)).length();
    if (w.kind == WrapperKind::NaiveOblivious) {
        r.rounds = w.rounds ? *w.rounds : inner;
        r.message_length = w.message_length ? *w.message_length
                                            : *natural_message_length(algorithm_of(cfg), cfg.graph.node_count());
    }
    if (w.kind == WrapperKind::Bba) r.boxes = w.boxes ? *w.boxes : inner;
    return r;
}

std::shared_ptr<const ScheduleSource> schedule_for(const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto& w = cfg.wrapper;
    if (!w.schedule.empty()) return fixed_schedule(w.schedule);
    return secret_schedule(w.secret ? *w.secret : SharedSecret::derive(seed), w.dummy_slots);
}

}  // namespace

SimulationConfig wrapped_simulation(const ExperimentConfig& cfg, ChannelModel channel, std::uint64_t seed) {
    SimulationConfig sim = base_simulation(cfg, channel, seed);
    const auto& w = cfg.wrapper;
    if (w.kind == WrapperKind::None) return sim;
    Resolved r = resolve(cfg, channel, seed);
    if (w.kind == WrapperKind::NaiveOblivious) {
        sim.programs = naive_oblivious_wrap(std::move(sim.programs), {r.rounds, r.message_length});
        sim.max_rounds = r.rounds;
        sim.algorithm = "naive_oblivious(" + sim.algorithm + ")";
    } else {
        if (!w.schedule.empty() && r.boxes > w.schedule.size())
            throw ConfigError("wrapper.schedule: " + std::to_string(w.schedule.size()) + " boxes given, " +
                              std::to_string(r.boxes) + " needed");
        sim.programs = bba_wrap(std::move(sim.programs), {schedule_for(cfg, seed), r.boxes});
        sim.max_rounds = r.boxes * (static_cast<std::size_t>(w.dummy_slots) + 1);
        sim.algorithm = "bba(" + sim.algorithm + ")";
    }
    return sim;
}

namespace {

json redacted(json normalized) {
    auto& w = normalized["wrapper"];
    if (w.contains("secret") && w["secret"] != "random") w["secret"] = "<redacted>";
    return normalized;
}

std::string rel_path(const fs::path& p, const fs::path& root) { return fs::relative(p, root).generic_string(); }

}  // namespace

RunOutputs cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir, OutputFormat format) {
    const std::string hash = cfg.hash();
    RunOutputs outputs;
    json runs = json::array();
    std::vector<ExecutionTrace> first_runs;
    std::span<const StationId> local;
    if (cfg.adversary.kind == FeedbackKind::Local) local = cfg.adversary.subset;

    for (auto channel : cfg.channels) {
        for (std::size_t i = 0; i < cfg.runs; ++i) {
            std::uint64_t seed = run_seed(cfg.seed, i);
            ExecutionTrace trace = run(wrapped_simulation(cfg, channel, seed));
            fs::path dir = out_dir / std::string(channel_name(channel)) / ("run" + std::to_string(i));

            std::ostringstream tr;
            write_trace_jsonl(tr, trace, hash);
            write_file(dir / "trace.jsonl", tr.str());

            std::ostringstream fb;
            fs::path fb_file = dir / (format == OutputFormat::Json ? "feedback.json" : "feedback.csv");
            if (format == OutputFormat::Json) write_feedback_json(fb, trace, local, hash);
            else write_feedback_csv(fb, trace, local, hash);
            write_file(fb_file, fb.str());

            auto et = energy_and_time(trace);
            runs.push_back(json{{"index", i},
                            {"seed", seed},
                            {"channel", channel_name(channel)},
                            {"trace", rel_path(dir / "trace.jsonl", out_dir)},
                            {"feedback", rel_path(fb_file, out_dir)},
                            {"time", et.time},
                            {"energy", et.energy},
                            {"feedback_stream", feedback(trace, cfg.adversary).joined()}});
            outputs.files.push_back(dir / "trace.jsonl");
            outputs.files.push_back(fb_file);
            if (i == 0) first_runs.push_back(std::move(trace));
        }
    }

    std::ostringstream adv;
    write_adversary_views_csv(adv, first_runs.front(), hash);
    write_file(out_dir / "adversary_views.csv", adv.str());
    outputs.files.push_back(out_dir / "adversary_views.csv");

    std::vector<const ExecutionTrace*> ptrs;
    for (const auto& t : first_runs) ptrs.push_back(&t);
    for (auto v : local) {
        std::ostringstream cs;
        write_channel_states_csv(cs, ptrs, v, hash);
        fs::path f = out_dir / ("channel_states_v" + std::to_string(v) + ".csv");
        write_file(f, cs.str());
        outputs.files.push_back(f);
    }

    json manifest = {{"config_hash", hash},
                     {"config", redacted(cfg.normalized)},
                     {"runs", runs}};
    json files = json::array();
    for (const auto& f : outputs.files) files.push_back(rel_path(f, out_dir));
    manifest["files"] = files;
    outputs.manifest = out_dir / "manifest.json";
    write_file(outputs.manifest, manifest.dump(2) + "\n");
    return outputs;
}

namespace {

ScenarioBuilder scenario_of(const ExperimentConfig& cfg) {
    if (cfg.channels.size() != 1)
        throw ConfigError("channels: compare needs exactly one channel per config");
    ChannelModel ch = cfg.channels.front();
    return [&cfg, ch](std::uint64_t seed) { return wrapped_simulation(cfg, ch, seed); };
}

json report_json(const PrivacyReport& r) {
    return {{"epsilon_hat", r.bounded ? json(r.epsilon_hat) : json(nullptr)},
            {"delta_hat", r.delta_hat},
            {"bounded", r.bounded},
            {"delta_budget", r.delta_budget},
            {"samples_x", r.samples_x},
            {"samples_y", r.samples_y},
            {"smoothing_alpha", r.smoothing_alpha},
            {"event_mode", event_mode_name(r.event_mode)},
            {"outcomes", r.outcomes},
            {"outcomes_in_tail", r.outcomes_in_tail}};
}

}  // namespace

CompareResult cmd_compare(const ExperimentConfig& x, const ExperimentConfig& y, const fs::path& out_dir,
                          const CompareOptions& options) {
    if (x.adversary != y.adversary)
        throw ConfigError("adversary: configs use different feedback (" + std::string(feedback_name(x.adversary.kind)) +
                          " vs " + std::string(feedback_name(y.adversary.kind)) + ")");
    auto sx = scenario_of(x);
    auto sy = scenario_of(y);

    const bool both_bba = x.wrapper.kind == WrapperKind::Bba && y.wrapper.kind == WrapperKind::Bba;
    EventMode mode = EventMode::Stream;
    if (options.event_mode) mode = *options.event_mode;
    else if (x.event_mode) mode = *x.event_mode;
    else if (both_bba && x.wrapper.dummy_slots == y.wrapper.dummy_slots &&
             x.adversary.kind == FeedbackKind::BeepDetecting)
        mode = EventMode::BoxCounts;
    if (mode == EventMode::BoxCounts && !(both_bba && x.wrapper.dummy_slots == y.wrapper.dummy_slots))
        throw ConfigError("privacy.event_mode: box counts need two bba configs with the same B");

    const ExperimentConfig* bba = x.wrapper.kind == WrapperKind::Bba ? &x
                                  : y.wrapper.kind == WrapperKind::Bba ? &y
                                                                       : nullptr;
    CompareResult result;
    if (bba) {
        auto r = resolve(*bba, bba->channels.front(), run_seed(bba->seed, 0));
        result.theory = bba_theoretical_params(bba->wrapper.dummy_slots, bba->xi, r.boxes);
    }

    std::size_t box = mode == EventMode::BoxCounts ? x.wrapper.dummy_slots + 1 : 0;
    std::size_t runs = options.runs ? *options.runs : x.runs;
    ObservationHistogram hx, hy;
    hx = collect_histogram(sx, x.adversary, runs, x.seed, mode, box);
    hy = collect_histogram(sy, y.adversary, runs, y.seed, mode, box);

    double budget = 0.0;
    std::optional<double> eps_theory, delta_theory;
    if (result.theory) {
        bool per_box = mode == EventMode::BoxCounts;
        eps_theory = per_box ? result.theory->epsilon_per_box : result.theory->epsilon;
        delta_theory = per_box ? result.theory->delta_per_box : result.theory->delta;
        budget = std::min(1.0, *delta_theory);
    }
    if (x.delta_budget) budget = *x.delta_budget;
    if (options.delta_budget) budget = *options.delta_budget;
    if (budget < 0.0 || budget > 1.0) throw ConfigError("delta_budget: must lie in [0, 1]");

    double alpha = x.smoothing_alpha;
    result.report = estimate_eps_delta(hx, hy, budget, alpha);

    {
        ChannelModel ch = x.channels.front();
        std::uint64_t s0 = run_seed(x.seed, 0);
        result.cost = cost_of_hiding(run(base_simulation(x, ch, s0)), run(wrapped_simulation(x, ch, s0)));
    }

    json doc = report_json(result.report);
    doc["config_hash_x"] = x.hash();
    doc["config_hash_y"] = y.hash();
    doc["feedback"] = feedback_name(x.adversary.kind);
    doc["runs"] = runs;
    doc["epsilon_theory"] = eps_theory ? json(*eps_theory) : json(nullptr);
    doc["delta_theory"] = delta_theory ? json(*delta_theory) : json(nullptr);
    if (result.theory) {
        const auto& t = *result.theory;
        doc["theory"] = {{"B", t.dummy_slots}, {"xi", t.xi}, {"k", t.boxes},
                         {"epsilon_per_box", t.epsilon_per_box}, {"delta_per_box", t.delta_per_box},
                         {"epsilon", t.epsilon}, {"delta", t.delta}};
    } else {
        doc["theory"] = nullptr;
    }
    doc["cost"] = {{"time_ratio", result.cost.time_ratio},
                   {"energy_ratio", result.cost.energy_ratio},
                   {"base_energy_zero", result.cost.base_energy_zero}};
    doc["declared"] = {{"distance", x.normalized["privacy"]["distance"]},
                       {"radius", x.normalized["privacy"]["radius"]}};
    result.document = doc;

    std::string tag = x.hash() + "+" + y.hash();
    std::ostringstream h1, h2;
    write_histogram_csv(h1, hx, x.hash());
    write_histogram_csv(h2, hy, y.hash());
    write_file(out_dir / "histogram_x.csv", h1.str());
    write_file(out_dir / "histogram_y.csv", h2.str());

    if (options.format == OutputFormat::Csv) {
        result.report_file = out_dir / "report.csv";
        std::ostringstream c;
        c << "# config_hash=" << tag << '\n';
        c << "epsilon_hat,delta_hat,bounded,delta_budget,samples_x,samples_y,smoothing_alpha,event_mode,"
             "epsilon_theory,delta_theory,time_ratio,energy_ratio\n";
        const auto& r = result.report;
        c << (r.bounded ? fmt_double(r.epsilon_hat) : "inf") << ',' << fmt_double(r.delta_hat) << ','
          << (r.bounded ? "true" : "false") << ',' << fmt_double(r.delta_budget) << ',' << r.samples_x << ','
          << r.samples_y << ',' << fmt_double(r.smoothing_alpha) << ',' << event_mode_name(r.event_mode) << ','
          << (eps_theory ? fmt_double(*eps_theory) : "") << ',' << (delta_theory ? fmt_double(*delta_theory) : "")
          << ',' << fmt_double(result.cost.time_ratio) << ',' << fmt_double(result.cost.energy_ratio) << '\n';
        write_file(result.report_file, c.str());
    }
    // report.json is always written: it is the input of `report`.
    write_file(out_dir / "report.json", doc.dump(2) + "\n");
    if (options.format == OutputFormat::Json) result.report_file = out_dir / "report.json";
    return result;
}

ReportResult cmd_report(const std::vector<fs::path>& inputs, const fs::path& out_file) {
    std::vector<std::string> missing;
    for (const auto& p : inputs)
        if (!fs::exists(p)) missing.push_back(p.string());
    if (!missing.empty()) {
        std::string msg = "inputs: missing";
        for (const auto& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }

    ReportResult result;
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<std::string> hashes;
    std::vector<std::string> rows;
    for (const auto& p : inputs) {
        json doc;
        try {
            doc = json::parse(read_file(p));
        } catch (const json::parse_error& e) {
            throw ConfigError(p.string() + ": " + e.what());
        }
        auto num = [&](const json& v) { return v.is_number() ? fmt_double(v.get<double>()) : std::string(); };
        std::string B = doc["theory"].is_object() ? std::to_string(doc["theory"]["B"].get<std::uint64_t>()) : "";
        std::string xi = doc["theory"].is_object() ? num(doc["theory"]["xi"]) : "";
        if (!seen.insert({B, xi}).second) {
            result.warnings.push_back("duplicate sweep point B=" + B + " xi=" + xi + " in " + p.string() + " ignored");
            continue;
        }
        hashes.push_back(doc.value("config_hash_x", "") + "+" + doc.value("config_hash_y", ""));
        std::string eps = doc["bounded"].get<bool>() ? num(doc["epsilon_hat"]) : "inf";
        rows.push_back(B + "," + xi + "," + eps + "," + num(doc["epsilon_theory"]) + "," + num(doc["delta_hat"]) +
                       "," + num(doc["delta_theory"]) + "," + num(doc["cost"]["time_ratio"]) + "," +
                       num(doc["cost"]["energy_ratio"]));
    }
    std::string joined;
    for (const auto& h : hashes) joined += h + ";";
    std::ostringstream out;
    out << "# config_hash=" << short_hash(joined) << '\n';
    out << "B,xi,epsilon_hat,epsilon_theory,delta_hat,delta_theory,time_ratio,energy_ratio\n";
    for (const auto& r : rows) out << r << '\n';
    write_file(out_file, out.str());
    result.summary = out_file;
    result.rows = rows.size();
    return result;
}

}  // namespace hidesim
