#pragma once

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/env.hpp"
#include "pessimlab/instances.hpp"

namespace pessimlab {

using Json = nlohmann::json;

// Reals travel as decimal strings with 17 significant digits, which
// round-trips IEEE doubles bit-exactly.
inline std::string real_to_string(Real v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Real real_from_string(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

inline Json reals_to_json(const std::vector<Real>& v) {
    Json arr = Json::array();
    for (Real x : v) arr.push_back(real_to_string(x));
    return arr;
}

inline std::vector<Real> reals_from_json(const Json& arr) {
    std::vector<Real> v;
    v.reserve(arr.size());
    for (const auto& x : arr) v.push_back(real_from_string(x.get<std::string>()));
    return v;
}

inline Json reward_to_json(const RewardDistribution& r) {
    Json j;
    switch (r.kind()) {
        case RewardDistribution::Kind::Deterministic:
            j["kind"] = "deterministic";
            j["value"] = real_to_string(r.support()[0]);
            break;
        case RewardDistribution::Kind::Bernoulli:
            j["kind"] = "bernoulli";
            j["mean"] = real_to_string(r.support()[0]);
            break;
        case RewardDistribution::Kind::Discrete:
            j["kind"] = "discrete";
            j["values"] = reals_to_json(r.support());
            j["probs"] = reals_to_json(r.probabilities());
            break;
    }
    return j;
}

inline RewardDistribution reward_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "deterministic")
        return RewardDistribution::deterministic(real_from_string(j.at("value")));
    if (kind == "bernoulli")
        return RewardDistribution::bernoulli(real_from_string(j.at("mean")));
    if (kind == "discrete")
        return RewardDistribution::discrete(reals_from_json(j.at("values")),
                                            reals_from_json(j.at("probs")));
    throw std::invalid_argument("unknown reward kind: " + kind);
}

// ---------------------------------------------------------------------------
// Environment documents. One JSON object per instance; `kind` selects the
// schema.
// ---------------------------------------------------------------------------

inline Json to_json(const DiscountedMdp& mdp, const std::vector<Real>* mu = nullptr) {
    Json j;
    j["kind"] = "discounted_mdp";
    j["num_states"] = mdp.num_states;
    j["num_actions"] = mdp.num_actions;
    j["gamma"] = real_to_string(mdp.gamma);
    j["transition"] = reals_to_json(mdp.transition);
    Json rewards = Json::array();
    for (const auto& r : mdp.rewards) rewards.push_back(reward_to_json(r));
    j["rewards"] = rewards;
    j["rho"] = reals_to_json(mdp.rho);
    if (mu) j["mu"] = reals_to_json(*mu);
    return j;
}

inline DiscountedMdp discounted_mdp_from_json(const Json& j, std::vector<Real>* mu = nullptr) {
    DiscountedMdp mdp;
    mdp.num_states = j.at("num_states").get<std::size_t>();
    mdp.num_actions = j.at("num_actions").get<std::size_t>();
    mdp.gamma = real_from_string(j.at("gamma"));
    mdp.transition = reals_from_json(j.at("transition"));
    for (const auto& r : j.at("rewards")) mdp.rewards.push_back(reward_from_json(r));
    mdp.rho = reals_from_json(j.at("rho"));
    if (mu && j.contains("mu")) *mu = reals_from_json(j.at("mu"));
    mdp.validate();
    return mdp;
}

inline Json to_json(const EpisodicMdp& emdp, const std::vector<Real>* mu = nullptr) {
    Json j;
    j["kind"] = "episodic_mdp";
    j["horizon"] = emdp.horizon;
    j["num_actions"] = emdp.num_actions;
    j["level_sizes"] = emdp.level_sizes;
    Json trans = Json::array();
    for (const auto& t : emdp.transition) trans.push_back(reals_to_json(t));
    j["transition"] = trans;
    Json rewards = Json::array();
    for (const auto& level : emdp.rewards) {
        Json lr = Json::array();
        for (const auto& r : level) lr.push_back(reward_to_json(r));
        rewards.push_back(lr);
    }
    j["rewards"] = rewards;
    j["rho"] = reals_to_json(emdp.rho);
    if (mu) j["mu"] = reals_to_json(*mu);
    return j;
}

inline EpisodicMdp episodic_mdp_from_json(const Json& j, std::vector<Real>* mu = nullptr) {
    EpisodicMdp emdp;
    emdp.horizon = j.at("horizon").get<std::size_t>();
    emdp.num_actions = j.at("num_actions").get<std::size_t>();
    emdp.level_sizes = j.at("level_sizes").get<std::vector<std::size_t>>();
    for (const auto& t : j.at("transition")) emdp.transition.push_back(reals_from_json(t));
    for (const auto& level : j.at("rewards")) {
        std::vector<RewardDistribution> lr;
        for (const auto& r : level) lr.push_back(reward_from_json(r));
        emdp.rewards.push_back(std::move(lr));
    }
    emdp.rho = reals_from_json(j.at("rho"));
    if (mu && j.contains("mu")) *mu = reals_from_json(j.at("mu"));
    emdp.validate();
    return emdp;
}

inline Json to_json(const BanditInstance& b) {
    Json j;
    j["kind"] = "bandit";
    j["num_actions"] = b.num_actions();
    Json rewards = Json::array();
    for (const auto& r : b.head_rewards) rewards.push_back(reward_to_json(r));
    j["head_rewards"] = rewards;
    j["head_mu"] = reals_to_json(b.head_mu);
    if (b.tail_count > 0) {
        j["tail"] = {{"count", b.tail_count},
                     {"mu_each", real_to_string(b.tail_mu_each)},
                     {"reward", reward_to_json(b.tail_reward)}};
    }
    return j;
}

inline BanditInstance bandit_from_json(const Json& j) {
    BanditInstance b;
    for (const auto& r : j.at("head_rewards")) b.head_rewards.push_back(reward_from_json(r));
    b.head_mu = reals_from_json(j.at("head_mu"));
    if (j.contains("tail")) {
        b.tail_count = j["tail"].at("count").get<std::uint64_t>();
        b.tail_mu_each = real_from_string(j["tail"].at("mu_each"));
        b.tail_reward = reward_from_json(j["tail"].at("reward"));
    }
    b.validate();
    return b;
}

inline Json to_json(const CbInstance& cb) {
    Json j;
    j["kind"] = "cb";
    j["num_states"] = cb.num_states;
    j["num_actions"] = cb.num_actions;
    j["rho"] = reals_to_json(cb.rho);
    Json rewards = Json::array();
    for (const auto& r : cb.rewards) rewards.push_back(reward_to_json(r));
    j["rewards"] = rewards;
    j["mu"] = reals_to_json(cb.mu);
    return j;
}

inline CbInstance cb_from_json(const Json& j) {
    CbInstance cb;
    cb.num_states = j.at("num_states").get<std::size_t>();
    cb.num_actions = j.at("num_actions").get<std::size_t>();
    cb.rho = reals_from_json(j.at("rho"));
    for (const auto& r : j.at("rewards")) cb.rewards.push_back(reward_from_json(r));
    cb.mu = reals_from_json(j.at("mu"));
    cb.validate();
    return cb;
}

inline Json environment_to_json(const Environment& env) {
    if (const auto* b = std::get_if<BanditInstance>(&env)) return to_json(*b);
    if (const auto* cb = std::get_if<CbInstance>(&env)) return to_json(*cb);
    if (const auto* m = std::get_if<MdpWithBehavior>(&env)) return to_json(m->mdp, &m->mu);
    const auto& e = std::get<EpisodicWithBehavior>(env);
    return to_json(e.emdp, &e.mu);
}

inline Environment environment_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bandit") return bandit_from_json(j);
    if (kind == "cb") return cb_from_json(j);
    if (kind == "discounted_mdp") {
        MdpWithBehavior m;
        m.mdp = discounted_mdp_from_json(j, &m.mu);
        return m;
    }
    if (kind == "episodic_mdp") {
        EpisodicWithBehavior e;
        e.emdp = episodic_mdp_from_json(j, &e.mu);
        return e;
    }
    throw std::invalid_argument("unknown environment kind: " + kind);
}

// ---------------------------------------------------------------------------
// Dataset export/import: columnar CSV plus a JSON provenance sidecar.
// ---------------------------------------------------------------------------

inline std::string dataset_to_csv(const Dataset& d) {
    std::ostringstream out;
    out << "s,a,r,s_next\n";
    for (const Transition& t : d.transitions) {
        out << t.s << ',' << t.a << ',' << real_to_string(t.r) << ',';
        if (t.s_next >= 0) out << t.s_next;
        out << '\n';
    }
    return out.str();
}

inline Json provenance_to_json(const Provenance& p) {
    return Json{{"instance_id", p.instance_id}, {"seed", p.seed}, {"n", p.n}};
}

inline Dataset dataset_from_csv(const std::string& csv, const Json& sidecar) {
    Dataset d;
    d.provenance.instance_id = sidecar.at("instance_id").get<std::string>();
    d.provenance.seed = sidecar.at("seed").get<std::uint64_t>();
    d.provenance.n = sidecar.at("n").get<std::uint64_t>();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (line != "s,a,r,s_next") throw MalformedDatasetError("dataset csv: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Transition t;
        std::size_t pos = 0;
        auto next_field = [&]() {
            const std::size_t comma = line.find(',', pos);
            const std::string field = comma == std::string::npos
                                          ? line.substr(pos)
                                          : line.substr(pos, comma - pos);
            pos = comma == std::string::npos ? line.size() : comma + 1;
            return field;
        };
        t.s = static_cast<std::uint32_t>(std::stoull(next_field()));
        t.a = std::stoull(next_field());
        t.r = real_from_string(next_field());
        const std::string tail = next_field();
        t.s_next = tail.empty() ? -1 : std::stoll(tail);
        d.transitions.push_back(t);
    }
    if (d.transitions.size() != d.provenance.n)
        throw MalformedDatasetError("dataset csv: row count disagrees with sidecar");
    return d;
}

// Atomic file write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename into place: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pessimlab
