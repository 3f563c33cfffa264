#include "bellcav/runner.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Outcome {
    int code;
    std::string out;
};

Outcome cli(const std::string& args) {
    const std::string cmd = std::string(BELLCAV_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("cli run prints the metric CSV") {
    const Outcome r = cli("run --state psi+ --gamma 0.2 --tmax 1 --nmax 6");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("omega_t,concurrence,fidelity,entropy\n0,1,1,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 33);
}

TEST_CASE("cli reports configuration errors with exit code 2") {
    CHECK(cli("run --state psi+ --gamma 0.2 --temperature 0.5").code == 2);
    CHECK(cli("run --state ghz").code == 2);
    CHECK(cli("run --gamma 0.2 --method laguerre").code == 2);
    CHECK(cli("run --temperature 0.5 --method rk4").code == 2);
    CHECK(cli("run --nmax 1").code == 2);
    CHECK(cli("figure 7").code == 2);
    CHECK(cli("").code == 2);

    const auto dir = std::filesystem::temp_directory_path() / "bellcav_cli_test_cfg";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"bath_mode": {"kind": "thermal", "temperature": 0.5, "gamma": 0.2}})";
    CHECK(cli("run --config " + (dir / "bad.json").string()).code == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli reports numerical failures with exit code 3") {
    CHECK(cli("run --state phi+ --gamma 0 --nmax 3 --tmax 20").code == 3);
}

TEST_CASE("cli config file and flag overrides") {
    const auto dir = std::filesystem::temp_directory_path() / "bellcav_cli_test_run";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "s.json") << R"({"initial_state": "psi+", "bath_mode": {"kind": "vacuum_leaky", "gamma": 0.4},
                                        "params": {"n_max": 6}, "grid": {"t_max": 1.0}})";
    const Outcome a = cli("run --config " + (dir / "s.json").string() + " --out " + (dir / "a").string());
    CHECK(a.code == 0);
    CHECK(std::filesystem::exists(dir / "a.csv"));
    CHECK(std::filesystem::exists(dir / "a.events.json"));
    const Outcome b = cli("run --state psi+ --gamma 0.4 --nmax 6 --tmax 1");
    CHECK(slurp(dir / "a.csv") == b.out);
    const Outcome c = cli("run --config " + (dir / "s.json").string() + " --state phi+");
    CHECK(c.out != b.out);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli sweep lists one row per value") {
    const Outcome r = cli("sweep --state psi+ --axis gamma --values 0.2,0.8 --tmax 1 --nmax 6");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("gamma,first_esd_time,revival_flag,fidelity_peaks,status\n0.2,none,false,0,ok\n0.8,", 0) == 0);
    CHECK(cli("sweep --axis gamma --values 0.2,x").code == 2);
}

TEST_CASE("cli figure output is byte-identical across runs") {
    const auto dir = std::filesystem::temp_directory_path() / "bellcav_cli_test_fig";
    std::filesystem::remove_all(dir);
    REQUIRE(cli("figure 2 --tmax 2 --out " + (dir / "a").string()).code == 0);
    REQUIRE(cli("figure 2 --tmax 2 --out " + (dir / "b").string()).code == 0);
    for (const char* name : {"fig2_concurrence.csv", "fig2_fidelity.csv", "fig2_events.json"}) {
        CAPTURE(name);
        const std::string a = slurp(dir / "a" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b" / name));
    }
    CHECK(slurp(dir / "a" / "fig2_concurrence.csv").rfind("omega_t,gamma=0,gamma=0.2,gamma=0.4,gamma=0.8\n0,1,1,1,1\n", 0) == 0);
    std::filesystem::remove_all(dir);
}
