#include "crowdcheck/config.hpp"

#include <algorithm>
#include <cstring>
#include <set>

namespace crowdcheck {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

const std::set<std::string> kWorldKeys{
    "epochs",          "budget",           "sources_per_epoch",
    "news_prior",      "rounds_per_epoch", "max_rounds",
    "infection_prob_base", "infection_prob_spread", "fake_classes",
    "frequent_spreader_fraction", "population", "prior_notfake",
    "prior_fake",      "history_update",   "fixed_cm_theta",
    "value_noise",     "fixed_sources",    "profile_overrides",
    "known_users"};
const std::set<std::string> kTopKeys{"graph", "out", "seed", "jobs", "policies", "world", "experiment"};
const std::set<std::string> kExperimentKeys{"kind", "policies", "seeds", "grid", "regret_epsilon"};

// Reads typed fields out of one JSON object, collecting problems instead of
// stopping at the first.
class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {}

    bool check_object(const std::set<std::string>& allowed) {
        if (!obj_.is_object()) {
            problems_.push_back(path_ + ": expected an object");
            return false;
        }
        for (const auto& [key, _] : obj_.items())
            if (!allowed.count(key)) problems_.push_back("unknown key '" + qualified(key) + "'");
        return true;
    }

    template <typename T>
    void get(const char* key, T& out) {
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            problems_.push_back("invalid value for '" + qualified(key) + "'");
        }
    }

    template <typename T, typename Parse>
    void get_with(const char* key, T& out, Parse parse) {
        if (!obj_.contains(key)) return;
        try {
            out = parse(obj_.at(key));
        } catch (const std::exception& e) {
            problems_.push_back("invalid value for '" + qualified(key) + "': " + e.what());
        }
    }

    std::string qualified(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& problems_;
};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
}

UserProfile profile_from(const json& j) {
    check_keys(j, {"alpha", "beta", "gamma", "fraction"}, "profile");
    UserProfile p;
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.gamma = j.value("gamma", 0.0);
    return p;
}

json profile_to(const UserProfile& p) { return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}}; }

BetaPrior prior_from(const json& j) {
    check_keys(j, {"a", "b"}, "prior");
    return {j.at("a").get<double>(), j.at("b").get<double>()};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)), problems_(std::move(problems)) {}

json to_json(const WorldConfig& c) {
    json j;
    j["epochs"] = c.epochs;
    j["budget"] = c.budget;
    j["sources_per_epoch"] = c.sources_per_epoch;
    j["news_prior"] = c.news_prior;
    j["rounds_per_epoch"] = c.rounds_per_epoch;
    j["max_rounds"] = c.max_rounds;
    j["infection_prob_base"] = c.infection_prob_base;
    j["infection_prob_spread"] = c.infection_prob_spread;
    j["fake_classes"] = json::array();
    for (const auto& f : c.fake_classes)
        j["fake_classes"].push_back({{"fraction", f.fraction}, {"fake_prob", f.fake_prob}});
    j["frequent_spreader_fraction"] = c.frequent_spreader_fraction;
    j["population"] = json::array();
    for (const auto& e : c.population) {
        json p = profile_to(e.profile);
        p["fraction"] = e.fraction;
        j["population"].push_back(p);
    }
    j["prior_notfake"] = {{"a", c.prior_notfake.a}, {"b", c.prior_notfake.b}};
    j["prior_fake"] = {{"a", c.prior_fake.a}, {"b", c.prior_fake.b}};
    j["history_update"] = to_string(c.history_update);
    j["fixed_cm_theta"] = c.fixed_cm_theta;
    j["value_noise"] = c.value_noise;
    j["fixed_sources"] = c.fixed_sources;
    j["profile_overrides"] = json::array();
    for (const auto& o : c.profile_overrides) {
        json choices = json::array();
        for (const auto& p : o.choices) choices.push_back(profile_to(p));
        j["profile_overrides"].push_back({{"user", o.user}, {"choices", choices}});
    }
    j["known_users"] = json::array();
    for (const auto& k : c.known_users) {
        j["known_users"].push_back({{"user", k.user},
                                    {"theta_notfake", k.params.theta_notfake},
                                    {"theta_fake", k.params.theta_fake},
                                    {"strength", k.strength}});
    }
    return j;
}

namespace {

void read_world(const json& doc, const std::string& path, WorldConfig& c,
                std::vector<std::string>& problems) {
    Reader r(doc, path, problems);
    if (!r.check_object(kWorldKeys)) return;
    r.get("epochs", c.epochs);
    r.get("budget", c.budget);
    r.get("sources_per_epoch", c.sources_per_epoch);
    r.get("news_prior", c.news_prior);
    r.get("rounds_per_epoch", c.rounds_per_epoch);
    r.get("max_rounds", c.max_rounds);
    r.get("infection_prob_base", c.infection_prob_base);
    r.get("infection_prob_spread", c.infection_prob_spread);
    r.get_with("fake_classes", c.fake_classes, [](const json& j) {
        std::vector<FakeClass> out;
        for (const auto& e : j) {
            check_keys(e, {"fraction", "fake_prob"}, "fake class");
            out.push_back({e.at("fraction").get<double>(), e.at("fake_prob").get<double>()});
        }
        return out;
    });
    r.get("frequent_spreader_fraction", c.frequent_spreader_fraction);
    r.get_with("population", c.population, [](const json& j) {
        PopulationSpec out;
        for (const auto& e : j) out.push_back({profile_from(e), e.at("fraction").get<double>()});
        return out;
    });
    r.get_with("prior_notfake", c.prior_notfake, prior_from);
    r.get_with("prior_fake", c.prior_fake, prior_from);
    r.get_with("history_update", c.history_update,
               [](const json& j) { return parse_history_update(j.get<std::string>()); });
    r.get("fixed_cm_theta", c.fixed_cm_theta);
    r.get("value_noise", c.value_noise);
    r.get("fixed_sources", c.fixed_sources);
    r.get_with("profile_overrides", c.profile_overrides, [](const json& j) {
        std::vector<ProfileOverride> out;
        for (const auto& e : j) {
            check_keys(e, {"user", "choices"}, "profile override");
            ProfileOverride o;
            o.user = e.at("user").get<UserId>();
            for (const auto& p : e.at("choices")) o.choices.push_back(profile_from(p));
            out.push_back(o);
        }
        return out;
    });
    r.get_with("known_users", c.known_users, [](const json& j) {
        std::vector<KnownUser> out;
        for (const auto& e : j) {
            check_keys(e, {"user", "theta_notfake", "theta_fake", "strength"}, "known user");
            KnownUser k;
            k.user = e.at("user").get<UserId>();
            k.params = {e.at("theta_notfake").get<double>(), e.at("theta_fake").get<double>()};
            k.strength = e.value("strength", 1e6);
            out.push_back(k);
        }
        return out;
    });
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string(path.empty() ? "" : path + ".") + e.what());
    }
}

std::vector<PolicyKind> parse_policies(const json& j) {
    std::vector<PolicyKind> out;
    for (const auto& name : j) out.push_back(parse_policy_kind(name.get<std::string>()));
    if (out.empty()) throw std::invalid_argument("policy list is empty");
    return out;
}

}  // namespace

WorldConfig world_config_from_json(const json& doc) {
    WorldConfig c;
    std::vector<std::string> problems;
    read_world(doc, "", c, problems);
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

RunConfig run_config_from_json(const json& doc) {
    RunConfig rc;
    std::vector<std::string> problems;
    Reader top(doc, "", problems);
    if (!top.check_object(kTopKeys)) throw ConfigError(problems);

    if (doc.contains("graph")) {
        const json& g = doc.at("graph");
        if (g.is_string()) {
            rc.graph_path = g.get<std::string>();
        } else if (g.is_object()) {
            try {
                check_keys(g, {"kind", "n", "edge_prob", "seed"}, "graph");
                SyntheticGraphSpec s;
                s.kind = parse_synthetic_kind(g.at("kind").get<std::string>());
                s.n = g.at("n").get<std::size_t>();
                s.edge_prob = g.value("edge_prob", 0.0);
                s.seed = g.value("seed", std::uint64_t{0});
                rc.synthetic_graph = s;
            } catch (const std::exception& e) {
                problems.push_back(std::string("invalid value for 'graph': ") + e.what());
            }
        } else {
            problems.push_back("invalid value for 'graph': expected a path or a synthetic spec");
        }
    }
    top.get("out", rc.out);
    top.get("seed", rc.seed);
    top.get("jobs", rc.jobs);
    rc.policies = rc.experiment.policies;
    top.get_with("policies", rc.policies, parse_policies);
    if (doc.contains("world")) read_world(doc.at("world"), "world", rc.world, problems);

    rc.experiment.base = rc.world;
    if (doc.contains("experiment")) {
        const json& e = doc.at("experiment");
        Reader r(e, "experiment", problems);
        if (r.check_object(kExperimentKeys)) {
            r.get_with("kind", rc.experiment.kind,
                       [](const json& j) { return parse_experiment_kind(j.get<std::string>()); });
            r.get_with("policies", rc.experiment.policies, parse_policies);
            r.get("seeds", rc.experiment.seeds);
            r.get("grid", rc.experiment.grid);
            r.get("regret_epsilon", rc.experiment.regret_epsilon);
            if (rc.experiment.seeds.empty()) problems.push_back("experiment.seeds: must not be empty");
        }
    }
    if (rc.jobs == 0) problems.push_back("jobs: must be >= 1");
    if (!problems.empty()) throw ConfigError(problems);

    rc.resolved = doc;
    rc.resolved["world"] = to_json(rc.world);
    // Execution-only: results do not depend on it, so it stays out of the echo.
    rc.resolved.erase("jobs");
    return rc;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError({"override '" + assignment + "' is not KEY=VALUE"});
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    std::vector<std::string> path;
    if (key.find('.') != std::string::npos) {
        std::size_t start = 0;
        while (true) {
            const auto dot = key.find('.', start);
            path.push_back(key.substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
    } else if (kWorldKeys.count(key)) {
        path = {"world", key};
    } else if (kTopKeys.count(key)) {
        path = {key};
    } else if (kExperimentKeys.count(key)) {
        path = {"experiment", key};
    } else {
        throw ConfigError({"unknown override key '" + key + "'"});
    }

    if (!doc.is_object()) doc = json::object();
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        json& child = (*node)[path[i]];
        if (child.is_null()) child = json::object();
        if (!child.is_object()) throw ConfigError({"override path '" + key + "' crosses a non-object"});
        node = &child;
    }
    (*node)[path.back()] = value;
}

std::vector<std::string> env_overrides(char** env) {
    std::vector<std::string> out;
    const std::size_t prefix_len = std::strlen(kEnvOverridePrefix);
    for (char** e = env; e && *e; ++e) {
        std::string entry(*e);
        if (entry.rfind(kEnvOverridePrefix, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(prefix_len, eq - prefix_len);
        std::string lowered;
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key.compare(i, 2, "__") == 0) {
                lowered += '.';
                ++i;
            } else {
                lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(key[i])));
            }
        }
        out.push_back(lowered + "=" + entry.substr(eq + 1));
    }
    std::sort(out.begin(), out.end());
    return out;
}

json to_json(const RunTrace& trace) {
    json epochs = json::array();
    for (const auto& e : trace.epochs) {
        json verdicts = json::array();
        for (Label l : e.verdicts) verdicts.push_back(to_string(l));
        epochs.push_back({{"epoch", e.epoch},
                          {"seeded", e.seeded},
                          {"selected", e.selected},
                          {"verdicts", verdicts},
                          {"vals", e.values},
                          {"utility", e.utility},
                          {"cumulative_utility", e.cumulative_utility}});
    }
    return {{"policy", trace.policy}, {"seed", trace.seed}, {"epochs", epochs}};
}

void write_trace(std::ostream& out, const RunTrace& trace, const json& config) {
    out << json{{"type", "header"}, {"policy", trace.policy}, {"seed", trace.seed}, {"config", config}}.dump()
        << '\n';
    const json body = to_json(trace);
    for (const auto& e : body.at("epochs")) {
        json rec = e;
        rec["type"] = "epoch";
        out << rec.dump() << '\n';
    }
    json histories = json::array();
    for (const auto& h : trace.final_histories)
        histories.push_back({h.notfake_given_notfake, h.notfake_given_fake, h.fake_given_notfake,
                             h.fake_given_fake});
    out << json{{"type", "belief"},
                {"prior_notfake", {{"a", trace.prior_notfake.a}, {"b", trace.prior_notfake.b}}},
                {"prior_fake", {{"a", trace.prior_fake.a}, {"b", trace.prior_fake.b}}},
                {"history_columns",
                 {"notfake_given_notfake", "notfake_given_fake", "fake_given_notfake", "fake_given_fake"}},
                {"histories", histories}}
               .dump()
        << '\n';
}

}  // namespace crowdcheck
