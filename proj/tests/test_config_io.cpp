#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "platoon/config.hpp"
#include "platoon/csv_io.hpp"
#include "platoon/errors.hpp"
#include "platoon/svg_plot.hpp"

using namespace platoon;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        root_ = fs::temp_directory_path() /
                ("platoon-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
        fs::create_directories(root_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
    fs::path path(const std::string& name) const { return root_ / name; }
    const fs::path& root() const { return root_; }

private:
    static inline int counter_ = 0;
    fs::path root_;
};

std::string paper_config_text() {
    return "[platoon]\n"
           "topology = PF\n"
           "n = 4\n"
           "\n"
           "[dynamics]\n"
           "tau = 0.5\n"
           "ts = 0.1\n"
           "k = 1,2,1\n"
           "d = 20\n"
           "v_init = 20\n"
           "\n"
           "[attack]\n"
           "gamma = 0,0,1\n"
           "attacker = 2\n"
           "onset = 10\n"
           "duration = 50\n"
           "theta = 50\n"
           "type = safety\n"
           "d_min = 50\n"
           "d_max = 60\n";
}

std::string with_line(std::string text, const std::string& section, const std::string& find,
                      const std::string& replace) {
    (void)section;
    const auto pos = text.find(find);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, find.size(), replace);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream file(path);
    file << content;
}

SimulationTrace tiny_trace(int horizon, int n) {
    ScenarioSpec scenario;
    scenario.topology = PlatoonTopology::build(TopologyKind::PF, n);
    scenario.dynamics = VehicleDynamicsSpec::make(0.5, 0.1, {1, 2, 1}, 20.0, 20.0);
    scenario.leader = LeaderProfile::constant(20.0);
    return simulate(scenario, horizon, 5.0, 60.0);
}

}  // namespace

TEST_CASE("the reference experiment configuration is accepted with defaults applied") {
    const auto cfg = parse_config_text(paper_config_text(), ".");
    CHECK(cfg.scenario.topology.kind() == TopologyKind::PF);
    CHECK(cfg.scenario.topology.follower_count() == 4);
    CHECK(cfg.scenario.dynamics.tau == 0.5);
    CHECK(cfg.scenario.dynamics.gain == Vec3{1.0, 2.0, 1.0});
    CHECK(cfg.discretization == Discretization::Zoh);          // default
    CHECK(cfg.attack.eps_violation == 1e-6);                   // default
    CHECK(cfg.run.horizon == 10 + 50 + 200);                   // default onset+duration+200
    CHECK(cfg.scenario.leader.velocities == std::vector<double>{20.0});  // constant v_init
    CHECK_FALSE(cfg.user_matrices);
}

TEST_CASE("config invariant violations carry section.key locations") {
    SUBCASE("swapped thresholds") {
        const auto text = with_line(paper_config_text(), "attack", "d_min = 50", "d_min = 60");
        const auto bad = with_line(text, "attack", "d_max = 60", "d_max = 50");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("attack.d_min"),
                             ConfigError);
    }
    SUBCASE("empty attack surface") {
        const auto bad = with_line(paper_config_text(), "attack", "gamma = 0,0,1", "gamma = 0,0,0");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("attack.gamma"),
                             ConfigError);
    }
    SUBCASE("unknown key") {
        const auto bad = paper_config_text() + "unknown_key = 3\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("attack.unknown_key"),
                             ConfigError);
    }
    SUBCASE("unknown section") {
        const auto bad = paper_config_text() + "\n[nonsense]\nx = 1\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("nonsense"), ConfigError);
    }
    SUBCASE("missing required key") {
        const auto bad = with_line(paper_config_text(), "dynamics", "ts = 0.1\n", "");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("dynamics.ts"),
                             ConfigError);
    }
    SUBCASE("malformed number") {
        const auto bad = with_line(paper_config_text(), "dynamics", "tau = 0.5", "tau = half");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("dynamics.tau"),
                             ConfigError);
    }
    SUBCASE("duplicate key") {
        const auto bad = paper_config_text() + "theta = 51\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("attack.theta"),
                             ConfigError);
    }
    SUBCASE("attacker out of range") {
        const auto bad = with_line(paper_config_text(), "attack", "attacker = 2", "attacker = 5");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("attack.attacker"),
                             ConfigError);
    }
    SUBCASE("horizon shorter than the attack window") {
        const auto bad = paper_config_text() + "\n[run]\nhorizon = 30\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("run.horizon"),
                             ConfigError);
    }
}

TEST_CASE("custom topologies parse from the matrix key") {
    auto text = with_line(paper_config_text(), "platoon", "topology = PF", "topology = Custom");
    text = with_line(text, "platoon", "n = 4", "n = 2\nmatrix = 0,0,0;1,0,0;1,1,0");
    const auto cfg = parse_config_text(text, ".");
    CHECK(cfg.scenario.topology.kind() == TopologyKind::Custom);
    CHECK(cfg.scenario.topology.receives_from(2, 0));

    SUBCASE("mismatched n is rejected") {
        const auto bad = with_line(text, "platoon", "n = 2", "n = 3");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("platoon.n"), ConfigError);
    }
    SUBCASE("matrix violating an invariant is rejected") {
        const auto bad = with_line(text, "platoon", "matrix = 0,0,0;1,0,0;1,1,0",
                                   "matrix = 0,0,0;1,0,0;1,0,0");
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "."), doctest::Contains("platoon.matrix"),
                             ConfigError);
    }
}

TEST_CASE("user-supplied discrete matrices override the discretization") {
    const auto text = with_line(paper_config_text(), "dynamics", "v_init = 20",
                                "v_init = 20\nA = 1,0.1,0,0,1,0.1,0,0,0.8\nB = 0,0,0.2");
    const auto cfg = parse_config_text(text, ".");
    CHECK(cfg.user_matrices);
    CHECK(cfg.scenario.dynamics.A[2][2] == 0.8);
    CHECK(cfg.scenario.dynamics.B[2] == 0.2);

    const auto missing_b = with_line(paper_config_text(), "dynamics", "v_init = 20",
                                     "v_init = 20\nA = 1,0.1,0,0,1,0.1,0,0,0.8");
    CHECK_THROWS_WITH_AS(parse_config_text(missing_b, "."), doctest::Contains("dynamics.A"),
                         ConfigError);
}

TEST_CASE("normalized dump reparses to the identical dump") {
    TempDir dir;
    write_file(dir.path("leader.csv"), "k,velocity\n0,20\n1,21\n2,22\n");
    const auto text = paper_config_text() + "\n[leader]\nprofile = leader.csv\n";
    const auto cfg = parse_config_text(text, dir.root());
    const std::string dump1 = cfg.normalized_dump();
    const auto reparsed = parse_config_text(dump1, dir.root());
    const std::string dump2 = reparsed.normalized_dump();
    CHECK(dump1 == dump2);
    CHECK(reparsed.scenario.leader.velocities == cfg.scenario.leader.velocities);
    CHECK(reparsed.attack.theta == cfg.attack.theta);
    CHECK(reparsed.run.horizon == cfg.run.horizon);
}

TEST_CASE("leader profiles are read strictly") {
    TempDir dir;
    SUBCASE("well-formed profile") {
        write_file(dir.path("ok.csv"), "k,velocity\n0,20\n1,20\n");
        const auto profile = read_leader_profile(dir.path("ok.csv"));
        CHECK(profile.velocities == std::vector<double>{20.0, 20.0});
    }
    SUBCASE("malformed velocity names the line") {
        write_file(dir.path("bad.csv"), "k,velocity\n0,20\n1,20\n2,abc\n");
        CHECK_THROWS_WITH_AS(read_leader_profile(dir.path("bad.csv")), doctest::Contains(":4"),
                             IoError);
    }
    SUBCASE("empty data section") {
        write_file(dir.path("empty.csv"), "k,velocity\n");
        CHECK_THROWS_AS(read_leader_profile(dir.path("empty.csv")), IoError);
    }
    SUBCASE("gaps in k are rejected") {
        write_file(dir.path("gap.csv"), "k,velocity\n0,20\n2,20\n");
        CHECK_THROWS_WITH_AS(read_leader_profile(dir.path("gap.csv")),
                             doctest::Contains("non-contiguous"), IoError);
    }
    SUBCASE("missing header is rejected") {
        write_file(dir.path("hdr.csv"), "velocity\n20\n");
        CHECK_THROWS_AS(read_leader_profile(dir.path("hdr.csv")), IoError);
    }
    SUBCASE("referenced from a config") {
        write_file(dir.path("leader.csv"), "k,velocity\n0,20\n");
        const auto cfg = parse_config_text(paper_config_text() + "\n[leader]\nprofile = leader.csv\n",
                                           dir.root());
        CHECK(cfg.leader_profile_path.has_value());
        CHECK_THROWS_WITH_AS(
            parse_config_text(paper_config_text() + "\n[leader]\nprofile = nope.csv\n", dir.root()),
            doctest::Contains("leader.profile"), ConfigError);
    }
}

TEST_CASE("attack vectors round-trip losslessly") {
    TempDir dir;
    const AttackVector vector{{1.5, -2.25, 1e300, 3.123456789012345678, -0.0}};
    write_attack_csv(dir.path("attack.csv"), vector);
    const auto back = read_attack_csv(dir.path("attack.csv"), 5);
    REQUIRE(back.deltas.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(back.deltas[i] == vector.deltas[i]);

    SUBCASE("length mismatch is an error") {
        CHECK_THROWS_WITH_AS(read_attack_csv(dir.path("attack.csv"), 50), doctest::Contains("50"),
                             IoError);
    }
    SUBCASE("headers are checked") {
        write_file(dir.path("bad.csv"), "delta\n1\n");
        CHECK_THROWS_AS(read_attack_csv(dir.path("bad.csv"), 1), IoError);
    }
}

TEST_CASE("trace CSV writes every vehicle row and reads back") {
    TempDir dir;
    const auto trace = tiny_trace(5, 2);
    write_trace_csv(dir.path("trace.csv"), trace);

    std::ifstream file(dir.path("trace.csv"));
    std::string header;
    std::getline(file, header);
    CHECK(header == "k,vehicle,position,velocity,acceleration,control,gap");
    std::string first_row;
    std::getline(file, first_row);
    CHECK(first_row.substr(0, 4) == "0,0,");
    CHECK(first_row.back() == ',');  // leader gap field is empty

    const auto back = read_trace_csv(dir.path("trace.csv"));
    CHECK(back.follower_count == 2);
    CHECK(back.horizon == 5);
    for (int k = 0; k <= 5; ++k) {
        for (int i = 0; i <= 2; ++i) {
            const auto& a = trace.records[k][i];
            const auto& b = back.records[k][i];
            CHECK(a.state.s == doctest::Approx(b.state.s).epsilon(1e-11));
            CHECK(a.state.v == doctest::Approx(b.state.v).epsilon(1e-11));
            if (i > 0) CHECK(a.gap == doctest::Approx(b.gap).epsilon(1e-11));
        }
    }
}

TEST_CASE("atomic writes never leave partial files") {
    TempDir dir;
    const auto missing_dir = dir.path("no-such-dir") / "file.csv";
    CHECK_THROWS_AS(atomic_write_text(missing_dir, "data"), IoError);
    CHECK_FALSE(fs::exists(missing_dir));
    CHECK(fs::is_empty(dir.root()));  // no stray temp files either
}

TEST_CASE("plots render standalone SVG documents") {
    TempDir dir;
    const auto trace = tiny_trace(40, 3);
    PlotAnnotations notes;
    notes.attack_window = std::make_pair(10, 30);
    notes.d_min = 5.0;
    notes.d_max = 60.0;
    emit_plots(trace, dir.root(), notes);

    for (const char* name : {"velocity.svg", "position.svg", "gaps.svg"}) {
        const auto path = dir.path(name);
        REQUIRE(fs::exists(path));
        std::ifstream file(path);
        std::stringstream buffer;
        buffer << file.rdbuf();
        const std::string svg = buffer.str();
        CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") == 0);
        CHECK(svg.rfind("</svg>") != std::string::npos);
        CHECK(svg.find("time step k") != std::string::npos);
        CHECK(svg.find("attack window") != std::string::npos);
        int polylines = 0;
        for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
             pos = svg.find("<polyline", pos + 1)) {
            ++polylines;
        }
        CHECK(polylines >= 3);  // one per vehicle (gaps chart: per follower)
    }

    SUBCASE("equilibrium velocity polylines are horizontal") {
        std::ifstream file(dir.path("velocity.svg"));
        std::stringstream buffer;
        buffer << file.rdbuf();
        const std::string svg = buffer.str();
        // every velocity sample equals v_init, so each polyline holds a single y
        const auto points_pos = svg.find("points=\"");
        REQUIRE(points_pos != std::string::npos);
        const auto end = svg.find('"', points_pos + 8);
        std::stringstream points(svg.substr(points_pos + 8, end - points_pos - 8));
        std::string pair;
        double first_y = 0.0;
        bool have_first = false;
        while (points >> pair) {
            const auto comma = pair.find(',');
            const double y = std::stod(pair.substr(comma + 1));
            if (!have_first) {
                first_y = y;
                have_first = true;
            }
            CHECK(y == doctest::Approx(first_y).epsilon(1e-9));
        }
        CHECK(have_first);
    }
}

TEST_CASE("single-step traces still plot without crashing") {
    TempDir dir;
    const auto trace = tiny_trace(1, 1);
    emit_plots(trace, dir.root());
    CHECK(fs::exists(dir.path("velocity.svg")));
    CHECK(fs::exists(dir.path("position.svg")));
    CHECK(fs::exists(dir.path("gaps.svg")));
}
