#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <mutex>
#include <thread>
#include <vector>

#include "pessimlab/algorithms.hpp"
#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/instances.hpp"
#include "pessimlab/oracles.hpp"
#include "pessimlab/serialize.hpp"

namespace pessimlab {

// ---------------------------------------------------------------------------
// Declarative experiment description.
// ---------------------------------------------------------------------------

struct InstanceSpec {
    std::string id;
    Json params = Json::object();
    std::string label;  // defaults to id
};

struct AlgorithmSpec {
    std::string id;
    PenaltyParams penalty;
    bool deterministic_rewards = false;  // episodic_vi_lcb variant
    std::string label;                   // defaults to id
};

struct ExperimentConfig {
    std::vector<InstanceSpec> instances;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replications = 1;
    std::uint64_t root_seed = 0;
    bool record_clean_event = false;
};

inline ExperimentConfig parse_config(const Json& j) {
    ExperimentConfig cfg;
    auto parse_instance = [](const Json& ji) {
        InstanceSpec spec;
        spec.id = ji.at("id").get<std::string>();
        if (ji.contains("params")) spec.params = ji["params"];
        spec.label = ji.contains("label") ? ji["label"].get<std::string>() : spec.id;
        return spec;
    };
    if (j.contains("instances"))
        for (const auto& ji : j["instances"]) cfg.instances.push_back(parse_instance(ji));
    else if (j.contains("instance"))
        cfg.instances.push_back(parse_instance(j["instance"]));
    else
        throw std::invalid_argument("config: missing instance(s)");

    for (const auto& ja : j.at("algorithms")) {
        AlgorithmSpec spec;
        spec.id = ja.at("id").get<std::string>();
        if (ja.contains("delta") && !ja["delta"].is_null())
            spec.penalty.delta = ja["delta"].get<Real>();
        if (ja.contains("override_L") && !ja["override_L"].is_null())
            spec.penalty.override_L = ja["override_L"].get<Real>();
        if (ja.contains("deterministic_rewards"))
            spec.deterministic_rewards = ja["deterministic_rewards"].get<bool>();
        spec.label = ja.contains("label") ? ja["label"].get<std::string>() : spec.id;
        cfg.algorithms.push_back(spec);
    }
    cfg.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw std::invalid_argument("config: n_grid must be strictly increasing");
    cfg.replications = j.at("replications").get<std::uint64_t>();
    if (cfg.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    cfg.root_seed = j.at("root_seed").get<std::uint64_t>();
    if (j.contains("record_clean_event"))
        cfg.record_clean_event = j["record_clean_event"].get<bool>();
    return cfg;
}

// ---------------------------------------------------------------------------
// Instance registry. The string "N" as a parameter value binds to the sweep
// cell's sample size, so per-N families (expert-data constructions) can be
// described declaratively.
// ---------------------------------------------------------------------------

inline std::uint64_t param_count(const Json& params, const std::string& key,
                                 std::uint64_t cell_n, std::optional<std::uint64_t> fallback = {}) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw std::invalid_argument("instance params: missing " + key);
    }
    const auto& v = params[key];
    if (v.is_string() && v.get<std::string>() == "N") return cell_n;
    return v.get<std::uint64_t>();
}

inline Real param_real(const Json& params, const std::string& key,
                       std::optional<Real> fallback = {}) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw std::invalid_argument("instance params: missing " + key);
    }
    return params[key].get<Real>();
}

inline std::vector<std::int8_t> param_signs(const Json& params, const std::string& key) {
    std::vector<std::int8_t> v;
    for (const auto& x : params.at(key)) {
        const int s = x.get<int>();
        if (s != 1 && s != -1) throw std::invalid_argument("instance params: signs must be +-1");
        v.push_back(static_cast<std::int8_t>(s));
    }
    return v;
}

inline std::vector<std::string> instance_ids() {
    return {"prop1",        "lecam_a",      "lecam_b",
            "nonadaptivity_a", "nonadaptivity_b", "cb_fano_member",
            "cb_most_played_failure", "cb_expert", "mdp_hard",
            "imitation_hard_mdp", "episodic_h3"};
}

inline HardInstance build_instance(const InstanceSpec& spec, std::uint64_t cell_n) {
    const Json& p = spec.params;
    HardInstance inst;
    if (spec.id == "prop1") {
        inst = prop1_instance(param_real(p, "epsilon"), param_count(p, "n", cell_n, cell_n));
    } else if (spec.id == "lecam_a" || spec.id == "lecam_b") {
        auto pair = lecam_two_arm(param_real(p, "c_star"), param_real(p, "gap"));
        inst = spec.id == "lecam_a" ? std::move(pair.first) : std::move(pair.second);
    } else if (spec.id == "nonadaptivity_a" || spec.id == "nonadaptivity_b") {
        auto pair = nonadaptivity_pair(param_count(p, "n", cell_n, cell_n), param_real(p, "l"));
        inst = spec.id == "nonadaptivity_a" ? std::move(pair.first) : std::move(pair.second);
    } else if (spec.id == "cb_fano_member") {
        inst = cb_fano_member(param_count(p, "s", cell_n), param_real(p, "c_star"),
                              param_real(p, "gap"), param_signs(p, "v"));
    } else if (spec.id == "cb_most_played_failure") {
        inst = cb_most_played_failure(param_real(p, "c_star"), param_real(p, "epsilon", -1.0));
    } else if (spec.id == "cb_expert") {
        inst = cb_expert(param_count(p, "s", cell_n), param_count(p, "n_design", cell_n, cell_n),
                         param_real(p, "gap", 1.0));
    } else if (spec.id == "mdp_hard") {
        inst = mdp_hard(param_count(p, "s", cell_n), param_real(p, "gamma"),
                        param_real(p, "c_star"), param_real(p, "gap"), param_signs(p, "v"));
    } else if (spec.id == "imitation_hard_mdp") {
        inst = imitation_hard_mdp(param_count(p, "s", cell_n),
                                  param_count(p, "n_design", cell_n, cell_n),
                                  param_real(p, "gamma"),
                                  param_count(p, "num_actions", cell_n, std::uint64_t(2)),
                                  param_count(p, "seed", cell_n, std::uint64_t(7)));
    } else if (spec.id == "episodic_h3") {
        std::vector<Real> rho, gaps;
        for (const auto& x : p.at("rho")) rho.push_back(x.get<Real>());
        for (const auto& x : p.at("gaps")) gaps.push_back(x.get<Real>());
        inst = episodic_h3(rho, gaps, param_real(p, "c_star"));
    } else {
        std::string valid;
        for (const auto& id : instance_ids()) valid += (valid.empty() ? "" : ", ") + id;
        throw std::invalid_argument("unknown instance id '" + spec.id + "' (valid: " + valid + ")");
    }
    inst.id = spec.label.empty() ? spec.id : spec.label;
    return inst;
}

// ---------------------------------------------------------------------------
// Algorithm registry.
// ---------------------------------------------------------------------------

inline std::vector<std::string> algorithm_ids() {
    return {"lcb_mab",  "empirical_best_arm", "most_played_arm", "lcb_cb",
            "behavior_cloning", "vi_lcb", "empirical_vi", "episodic_vi_lcb"};
}

struct AlgorithmOutcome {
    Real achieved_value = 0;
    int clean_event = -1;  // -1 unknown, 0 false, 1 true
    std::string error;
};

inline bool algorithm_supports(const std::string& id, const Environment& env) {
    if (std::holds_alternative<BanditInstance>(env))
        return id == "lcb_mab" || id == "empirical_best_arm" || id == "most_played_arm";
    if (std::holds_alternative<CbInstance>(env))
        return id == "lcb_cb" || id == "behavior_cloning" || id == "most_played_arm";
    if (std::holds_alternative<MdpWithBehavior>(env))
        return id == "vi_lcb" || id == "empirical_vi" || id == "behavior_cloning";
    return id == "episodic_vi_lcb" || id == "behavior_cloning";
}

inline AlgorithmOutcome run_algorithm(const AlgorithmSpec& spec, const HardInstance& inst,
                                      const Dataset& data, bool want_clean) {
    AlgorithmOutcome out;
    try {
        if (const auto* b = std::get_if<BanditInstance>(&inst.env)) {
            std::uint64_t arm;
            if (spec.id == "lcb_mab")
                arm = lcb_mab(data, b->num_actions(), spec.penalty);
            else if (spec.id == "empirical_best_arm")
                arm = empirical_best_arm(data, b->num_actions());
            else if (spec.id == "most_played_arm")
                arm = most_played_arm(data, b->num_actions());
            else
                throw std::invalid_argument("algorithm '" + spec.id + "' does not run on bandits");
            out.achieved_value = b->reward_mean(arm);
            if (want_clean) out.clean_event = clean_event_mab(*b, data, spec.penalty) ? 1 : 0;
        } else if (const auto* cb = std::get_if<CbInstance>(&inst.env)) {
            DeterministicPolicy pi;
            if (spec.id == "lcb_cb")
                pi = lcb_cb(data, cb->num_states, cb->num_actions, spec.penalty);
            else if (spec.id == "behavior_cloning" || spec.id == "most_played_arm")
                pi = behavior_cloning(data, cb->num_states, cb->num_actions);
            else
                throw std::invalid_argument("algorithm '" + spec.id +
                                            "' does not run on contextual bandits");
            out.achieved_value = cb->value_of(pi);
            if (want_clean) out.clean_event = clean_event_cb(*cb, data, spec.penalty) ? 1 : 0;
        } else if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env)) {
            const MdpShape shape{m->mdp.num_states, m->mdp.num_actions, m->mdp.gamma};
            DeterministicPolicy pi;
            if (spec.id == "vi_lcb") {
                if (want_clean) {
                    ViTrace trace;
                    pi = vi_lcb(data, shape, spec.penalty, &trace);
                    out.clean_event = clean_event_mdp(m->mdp, trace) ? 1 : 0;
                } else {
                    pi = vi_lcb(data, shape, spec.penalty);
                }
            } else if (spec.id == "empirical_vi") {
                pi = empirical_vi(data, shape);
            } else if (spec.id == "behavior_cloning") {
                pi = behavior_cloning(data, shape.num_states, shape.num_actions);
            } else {
                throw std::invalid_argument("algorithm '" + spec.id + "' does not run on MDPs");
            }
            out.achieved_value = expected_value(m->mdp, pi);
        } else {
            const auto& e = std::get<EpisodicWithBehavior>(inst.env);
            DeterministicPolicy pi;
            if (spec.id == "episodic_vi_lcb") {
                EpisodicShape shape{e.emdp.level_sizes, e.emdp.num_actions};
                pi = episodic_vi_lcb(data, shape, spec.penalty, spec.deterministic_rewards);
            } else if (spec.id == "behavior_cloning") {
                pi = behavior_cloning(data, e.emdp.num_states(), e.emdp.num_actions);
            } else {
                throw std::invalid_argument("algorithm '" + spec.id +
                                            "' does not run on episodic MDPs");
            }
            out.achieved_value = episodic_expected_value(e.emdp, pi);
        }
    } catch (const InsufficientDataError& e) {
        out.error = e.what();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep execution.
// ---------------------------------------------------------------------------

struct RunRecord {
    std::string instance;
    std::string algorithm;
    Real c_star = 0;
    std::uint64_t n = 0;
    std::uint64_t rep = 0;
    Real sub_optimality = 0;
    std::uint64_t seed = 0;
    int clean_event = -1;
    std::string error;
};

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t instance_idx,
                                 std::uint64_t n, std::uint64_t rep) {
    return mix64(root, instance_idx, n, rep);
}

// Runs the full grid. Replications are independent work items executed by a
// small pool; results land in preassigned slots, so output is a pure
// function of the config regardless of thread count.
inline std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<RunRecord> records;
    records.resize(cfg.instances.size() * cfg.n_grid.size() * cfg.replications *
                   cfg.algorithms.size());
    const std::size_t algs = cfg.algorithms.size();

    std::size_t cell_base = 0;
    for (std::size_t ii = 0; ii < cfg.instances.size(); ++ii) {
        for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
            const std::uint64_t n = cfg.n_grid[ni];
            const HardInstance inst = build_instance(cfg.instances[ii], n);
            for (const AlgorithmSpec& alg : cfg.algorithms)
                if (!algorithm_supports(alg.id, inst.env))
                    throw std::invalid_argument("algorithm '" + alg.id +
                                                "' does not run on instance '" + inst.id + "'");
            const Real j_star = optimal_value(inst);
            std::atomic<std::uint64_t> next_rep{0};
            std::exception_ptr worker_error;
            std::mutex error_mutex;
            auto worker = [&]() {
                try {
                for (;;) {
                    const std::uint64_t rep = next_rep.fetch_add(1);
                    if (rep >= cfg.replications) break;
                    const std::uint64_t seed = derive_seed(cfg.root_seed, ii, n, rep);
                    Dataset data;
                    if (const auto* b = std::get_if<BanditInstance>(&inst.env))
                        data = sample_dataset(*b, n, seed, inst.id);
                    else if (const auto* cb = std::get_if<CbInstance>(&inst.env))
                        data = sample_dataset(*cb, n, seed, inst.id);
                    else if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env))
                        data = sample_dataset(m->mdp, m->mu, n, seed, inst.id);
                    else {
                        const auto& e = std::get<EpisodicWithBehavior>(inst.env);
                        data = sample_dataset(e.emdp, e.mu, n, seed, inst.id);
                    }
                    for (std::size_t ai = 0; ai < algs; ++ai) {
                        const AlgorithmOutcome res =
                            run_algorithm(cfg.algorithms[ai], inst, data, cfg.record_clean_event);
                        RunRecord& rec =
                            records[cell_base + (rep * algs + ai)];
                        rec.instance = inst.id;
                        rec.algorithm = cfg.algorithms[ai].label;
                        rec.c_star = inst.declared_c_star;
                        rec.n = n;
                        rec.rep = rep;
                        rec.seed = seed;
                        rec.clean_event = res.clean_event;
                        rec.error = res.error;
                        rec.sub_optimality = res.error.empty()
                                                 ? j_star - res.achieved_value
                                                 : std::numeric_limits<Real>::quiet_NaN();
                    }
                }
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!worker_error) worker_error = std::current_exception();
                    next_rep.store(cfg.replications);
                }
            };
            std::vector<std::thread> pool;
            for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            if (worker_error) std::rethrow_exception(worker_error);
            cell_base += cfg.replications * algs;
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Aggregation.
// ---------------------------------------------------------------------------

struct SummaryRow {
    std::string instance;
    std::string algorithm;
    Real c_star = 0;
    std::uint64_t n = 0;
    Real mean = 0;
    Real stderr_ = 0;
    std::size_t count = 0;
};

inline std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    struct Key {
        std::string instance, algorithm;
        Real c_star;
        std::uint64_t n;
        bool operator<(const Key& o) const {
            if (instance != o.instance) return instance < o.instance;
            if (algorithm != o.algorithm) return algorithm < o.algorithm;
            if (c_star != o.c_star) return c_star < o.c_star;
            return n < o.n;
        }
    };
    std::vector<std::pair<Key, std::vector<Real>>> groups;
    for (const RunRecord& r : records) {
        if (!r.error.empty()) continue;
        const Key k{r.instance, r.algorithm, r.c_star, r.n};
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return !(g.first < k) && !(k < g.first); });
        if (it == groups.end()) {
            groups.push_back({k, {}});
            it = groups.end() - 1;
        }
        it->second.push_back(r.sub_optimality);
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<SummaryRow> rows;
    for (const auto& [k, vals] : groups) {
        const MeanStderr m = mean_stderr(vals);
        rows.push_back({k.instance, k.algorithm, k.c_star, k.n, m.mean, m.stderr_, m.count});
    }
    return rows;
}

struct RateFit {
    Real slope = 0;
    Real intercept = 0;
    Real slope_stderr = 0;
    std::size_t points_used = 0;
    std::size_t points_dropped = 0;  // nonpositive means
};

// OLS of log(mean) against log(n) over one (instance, algorithm) group.
inline RateFit fit_rate(const std::vector<SummaryRow>& rows) {
    std::vector<Real> x, y;
    std::size_t dropped = 0;
    for (const SummaryRow& r : rows) {
        if (r.mean > 0) {
            x.push_back(std::log(static_cast<Real>(r.n)));
            y.push_back(std::log(r.mean));
        } else {
            ++dropped;
        }
    }
    if (x.size() < 3)
        throw std::invalid_argument("fit_rate: need at least 3 rows with positive means");
    const OlsFit f = ols(x, y);
    return {f.slope, f.intercept, f.slope_stderr, x.size(), dropped};
}

// ---------------------------------------------------------------------------
// CSV formats.
// ---------------------------------------------------------------------------

inline std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "instance,algorithm,c_star,n,rep,subopt,seed,clean_event\n";
    for (const RunRecord& r : records) {
        out << r.instance << ',' << r.algorithm << ',' << real_to_string(r.c_star) << ',' << r.n
            << ',' << r.rep << ',' << real_to_string(r.sub_optimality) << ',' << r.seed << ',';
        if (r.clean_event >= 0) out << r.clean_event;
        out << '\n';
    }
    return out.str();
}

inline std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "instance,algorithm,c_star,n,mean,stderr,count\n";
    for (const SummaryRow& r : rows)
        out << r.instance << ',' << r.algorithm << ',' << real_to_string(r.c_star) << ',' << r.n
            << ',' << real_to_string(r.mean) << ',' << real_to_string(r.stderr_) << ','
            << r.count << '\n';
    return out.str();
}

inline std::vector<SummaryRow> summary_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (line != "instance,algorithm,c_star,n,mean,stderr,count")
        throw std::invalid_argument("summary csv: bad header");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            fields.push_back(comma == std::string::npos ? line.substr(pos)
                                                        : line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 7) throw std::invalid_argument("summary csv: bad row");
        SummaryRow r;
        r.instance = fields[0];
        r.algorithm = fields[1];
        r.c_star = real_from_string(fields[2]);
        r.n = std::stoull(fields[3]);
        r.mean = real_from_string(fields[4]);
        r.stderr_ = real_from_string(fields[5]);
        r.count = std::stoull(fields[6]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace pessimlab
