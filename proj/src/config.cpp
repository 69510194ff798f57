#include "platoon/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "platoon/csv_io.hpp"
#include "platoon/errors.hpp"

namespace platoon {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// section -> key -> value, with strict structure checks.
class IniDocument {
public:
    IniDocument(const std::string& text, const std::string& origin) {
        std::istringstream stream(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(stream, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    throw ConfigError(origin + ":" + std::to_string(line_no), "malformed section header");
                }
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty()) {
                    throw ConfigError(origin + ":" + std::to_string(line_no), "empty section name");
                }
                sections_[section];  // materialize even if empty
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(line_no), "expected key = value");
            }
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no), "key outside any section");
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no), "empty key");
            }
            auto [it, inserted] = sections_[section].emplace(key, value);
            (void)it;
            if (!inserted) {
                throw ConfigError(section + "." + key, "duplicate key");
            }
        }
    }

    bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

    bool has(const std::string& section, const std::string& key) const {
        const auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        const auto it = sections_.find(section);
        if (it == sections_.end() || it->second.count(key) == 0) {
            throw ConfigError(section + "." + key, "missing required key");
        }
        return it->second.at(key);
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    /// Reject sections and keys outside the declared schema.
    void enforce_schema(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [section, keys] : sections_) {
            const auto it = schema.find(section);
            if (it == schema.end()) {
                throw ConfigError(section, "unknown section");
            }
            for (const auto& [key, value] : keys) {
                if (it->second.count(key) == 0) {
                    throw ConfigError(section + "." + key, "unknown key");
                }
            }
        }
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

double parse_double(const std::string& location, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(location, "empty numeric value");
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(t, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(location, "malformed number '" + t + "'");
    }
    if (consumed != t.size()) throw ConfigError(location, "malformed number '" + t + "'");
    if (!std::isfinite(value)) throw ConfigError(location, "number must be finite");
    return value;
}

int parse_int(const std::string& location, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(location, "empty integer value");
    std::size_t consumed = 0;
    long value = 0;
    try {
        value = std::stol(t, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(location, "malformed integer '" + t + "'");
    }
    if (consumed != t.size()) throw ConfigError(location, "malformed integer '" + t + "'");
    return static_cast<int>(value);
}

std::vector<double> parse_double_list(const std::string& location, const std::string& text,
                                      std::size_t expected) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string cell;
    while (std::getline(stream, cell, ',')) values.push_back(parse_double(location, cell));
    if (values.size() != expected) {
        throw ConfigError(location, "expected " + std::to_string(expected) + " comma-separated values, got " +
                                        std::to_string(values.size()));
    }
    return values;
}

const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"platoon", {"topology", "n", "matrix"}},
        {"dynamics", {"tau", "ts", "k", "d", "v_init", "discretization", "A", "B"}},
        {"attack",
         {"gamma", "attacker", "onset", "duration", "theta", "type", "d_min", "d_max", "eps_violation"}},
        {"leader", {"profile"}},
        {"run", {"horizon", "output_dir"}},
    };
    return schema;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    const IniDocument ini(text, "<config>");
    ini.enforce_schema(config_schema());

    ScenarioConfig cfg;

    // [platoon]
    const std::string kind_name = ini.get("platoon", "topology");
    TopologyKind kind;
    try {
        kind = topology_kind_from_string(kind_name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("platoon.topology", e.what());
    }
    if (kind == TopologyKind::Custom) {
        if (!ini.has("platoon", "matrix")) {
            throw ConfigError("platoon.matrix", "missing required key (Custom topology needs a matrix)");
        }
        try {
            cfg.scenario.topology = PlatoonTopology::from_matrix_string(ini.get("platoon", "matrix"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("platoon.matrix", e.what());
        }
        if (ini.has("platoon", "n")) {
            const int n = parse_int("platoon.n", ini.get("platoon", "n"));
            if (n != cfg.scenario.topology.follower_count()) {
                throw ConfigError("platoon.n", "does not match the supplied matrix (" +
                                                   std::to_string(cfg.scenario.topology.follower_count()) +
                                                   " followers)");
            }
        }
    } else {
        if (ini.has("platoon", "matrix")) {
            throw ConfigError("platoon.matrix", "only allowed with topology = Custom");
        }
        const int n = parse_int("platoon.n", ini.get("platoon", "n"));
        try {
            cfg.scenario.topology = PlatoonTopology::build(kind, n);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("platoon.n", e.what());
        }
    }
    const int n = cfg.scenario.topology.follower_count();

    // [dynamics]
    const double tau = parse_double("dynamics.tau", ini.get("dynamics", "tau"));
    const double ts = parse_double("dynamics.ts", ini.get("dynamics", "ts"));
    if (!(tau > 0.0)) throw ConfigError("dynamics.tau", "must be > 0");
    if (!(ts > 0.0)) throw ConfigError("dynamics.ts", "must be > 0");
    const std::vector<double> k = parse_double_list("dynamics.k", ini.get("dynamics", "k"), 3);
    const double d = parse_double("dynamics.d", ini.get("dynamics", "d"));
    if (!(d > 0.0)) throw ConfigError("dynamics.d", "must be > 0");
    const double v_init = parse_double("dynamics.v_init", ini.get("dynamics", "v_init"));
    try {
        cfg.discretization =
            discretization_from_string(ini.get_or("dynamics", "discretization", "zoh"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("dynamics.discretization", e.what());
    }
    const Vec3 gain{k[0], k[1], k[2]};
    if (ini.has("dynamics", "A") != ini.has("dynamics", "B")) {
        throw ConfigError("dynamics.A", "A and B must be supplied together");
    }
    if (ini.has("dynamics", "A")) {
        const std::vector<double> a = parse_double_list("dynamics.A", ini.get("dynamics", "A"), 9);
        const std::vector<double> b = parse_double_list("dynamics.B", ini.get("dynamics", "B"), 3);
        const Mat3 A{{{a[0], a[1], a[2]}, {a[3], a[4], a[5]}, {a[6], a[7], a[8]}}};
        const Vec3 B{b[0], b[1], b[2]};
        cfg.scenario.dynamics = VehicleDynamicsSpec::with_matrices(tau, ts, A, B, gain, d, v_init);
        cfg.user_matrices = true;
    } else {
        cfg.scenario.dynamics = VehicleDynamicsSpec::make(tau, ts, gain, d, v_init, cfg.discretization);
    }

    // [attack]
    const std::vector<double> gamma = parse_double_list("attack.gamma", ini.get("attack", "gamma"), 3);
    for (double g : gamma) {
        if (g != 0.0 && g != 1.0) throw ConfigError("attack.gamma", "entries must be 0 or 1");
    }
    cfg.attack.gamma = AttackSurface{{gamma[0] != 0.0, gamma[1] != 0.0, gamma[2] != 0.0}};
    if (!cfg.attack.gamma.any()) throw ConfigError("attack.gamma", "empty attack surface (all zero)");
    cfg.attack.rogue = parse_int("attack.attacker", ini.get("attack", "attacker"));
    if (cfg.attack.rogue < 1 || cfg.attack.rogue > n) {
        throw ConfigError("attack.attacker", "must be in [1, " + std::to_string(n) + "]");
    }
    cfg.attack.onset = parse_int("attack.onset", ini.get("attack", "onset"));
    if (cfg.attack.onset < 0) throw ConfigError("attack.onset", "must be >= 0");
    cfg.attack.duration = parse_int("attack.duration", ini.get("attack", "duration"));
    if (cfg.attack.duration < 1) throw ConfigError("attack.duration", "must be >= 1");
    cfg.attack.theta = parse_double("attack.theta", ini.get("attack", "theta"));
    if (!(cfg.attack.theta >= 0.0)) throw ConfigError("attack.theta", "must be >= 0");
    try {
        cfg.attack.goal = attack_goal_from_string(ini.get("attack", "type"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("attack.type", e.what());
    }
    cfg.attack.d_min = parse_double("attack.d_min", ini.get("attack", "d_min"));
    cfg.attack.d_max = parse_double("attack.d_max", ini.get("attack", "d_max"));
    if (!(cfg.attack.d_min < cfg.attack.d_max)) {
        throw ConfigError("attack.d_min", "must be < d_max");
    }
    cfg.attack.eps_violation =
        parse_double("attack.eps_violation", ini.get_or("attack", "eps_violation", "1e-6"));
    if (!(cfg.attack.eps_violation > 0.0)) throw ConfigError("attack.eps_violation", "must be > 0");

    // [leader]
    if (ini.has("leader", "profile")) {
        std::filesystem::path profile = ini.get("leader", "profile");
        if (profile.is_relative()) profile = base_dir / profile;
        if (!std::filesystem::exists(profile)) {
            throw ConfigError("leader.profile", "file does not exist: " + profile.string());
        }
        try {
            cfg.scenario.leader = read_leader_profile(profile);
        } catch (const IoError& e) {
            throw ConfigError("leader.profile", e.what());
        }
        cfg.leader_profile_path = std::filesystem::weakly_canonical(profile);
    } else {
        cfg.scenario.leader = LeaderProfile::constant(v_init);
    }

    // [run]
    const int default_horizon = cfg.attack.onset + cfg.attack.duration + 200;
    cfg.run.horizon = parse_int("run.horizon",
                                ini.get_or("run", "horizon", std::to_string(default_horizon)));
    if (cfg.run.horizon < 1) throw ConfigError("run.horizon", "must be >= 1");
    if (cfg.run.horizon < cfg.attack.window_end()) {
        throw ConfigError("run.horizon", "must cover the attack window (>= " +
                                             std::to_string(cfg.attack.window_end()) + ")");
    }
    cfg.run.output_dir = ini.get_or("run", "output_dir", ".");

    // Backstop: the composed spec must satisfy every downstream invariant.
    cfg.attack.validate(n);
    cfg.scenario.leader.validate();
    return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_config_text(buffer.str(), path.has_parent_path() ? path.parent_path()
                                                                  : std::filesystem::path("."));
}

std::string ScenarioConfig::normalized_dump() const {
    std::ostringstream out;
    out << "[platoon]\n";
    out << "topology = " << to_string(scenario.topology.kind()) << "\n";
    out << "n = " << scenario.topology.follower_count() << "\n";
    if (scenario.topology.kind() == TopologyKind::Custom) {
        out << "matrix = " << scenario.topology.matrix_string() << "\n";
    }
    out << "\n[dynamics]\n";
    out << "tau = " << format_double(scenario.dynamics.tau) << "\n";
    out << "ts = " << format_double(scenario.dynamics.ts) << "\n";
    out << "k = " << format_double(scenario.dynamics.gain[0]) << ","
        << format_double(scenario.dynamics.gain[1]) << "," << format_double(scenario.dynamics.gain[2])
        << "\n";
    out << "d = " << format_double(scenario.dynamics.spacing) << "\n";
    out << "v_init = " << format_double(scenario.dynamics.v_init) << "\n";
    out << "discretization = " << to_string(discretization) << "\n";
    if (user_matrices) {
        out << "A = ";
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                if (r != 0 || c != 0) out << ",";
                out << format_double(scenario.dynamics.A[r][c]);
            }
        }
        out << "\n";
        out << "B = " << format_double(scenario.dynamics.B[0]) << "," << format_double(scenario.dynamics.B[1])
            << "," << format_double(scenario.dynamics.B[2]) << "\n";
    }
    out << "\n[attack]\n";
    out << "gamma = " << (attack.gamma.gamma[0] ? 1 : 0) << "," << (attack.gamma.gamma[1] ? 1 : 0) << ","
        << (attack.gamma.gamma[2] ? 1 : 0) << "\n";
    out << "attacker = " << attack.rogue << "\n";
    out << "onset = " << attack.onset << "\n";
    out << "duration = " << attack.duration << "\n";
    out << "theta = " << format_double(attack.theta) << "\n";
    out << "type = " << to_string(attack.goal) << "\n";
    out << "d_min = " << format_double(attack.d_min) << "\n";
    out << "d_max = " << format_double(attack.d_max) << "\n";
    out << "eps_violation = " << format_double(attack.eps_violation) << "\n";
    if (leader_profile_path) {
        out << "\n[leader]\n";
        out << "profile = " << leader_profile_path->string() << "\n";
    }
    out << "\n[run]\n";
    out << "horizon = " << run.horizon << "\n";
    out << "output_dir = " << run.output_dir.string() << "\n";
    return out.str();
}

}  // namespace platoon
