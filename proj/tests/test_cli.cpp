#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PEELAB_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("cli constants") {
    const auto r2 = run_cli("constants --model type2");
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.find("1.74716") != std::string::npos); // h* = (16/3)^{1/3}
    CHECK(r2.out.find("c1 = 4") != std::string::npos);

    const auto rq = run_cli("constants --model quad");
    CHECK(rq.exit_code == 0);
    CHECK(rq.out.find("b  = 9/2 = 4.5") != std::string::npos);

    const auto bad = run_cli("constants --model heptagon");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("cli simulate determinism and formats") {
    const fs::path base = fs::temp_directory_path() / "peelab_cli_test";
    fs::remove_all(base);
    const auto a = run_cli("simulate --algo fpp --steps 1000 --seed 1 --out " +
                           (base / "a").string());
    const auto b = run_cli("simulate --algo fpp --steps 1000 --seed 1 --out " +
                           (base / "b").string());
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(slurp(base / "a" / "trace_r000.csv") == slurp(base / "b" / "trace_r000.csv"));
    CHECK(slurp(base / "a" / "summary.json") == slurp(base / "b" / "summary.json"));
    CHECK(slurp(base / "a" / "trace_r000.csv").substr(0, 11) == "k,tau,P,V\n1");

    const auto q = run_cli("simulate --algo pv --model quad --steps 1000 --seed 2 --out " +
                           (base / "q").string());
    CHECK(q.exit_code == 0);
    const std::string qtrace = slurp(base / "q" / "trace_r000.csv");
    CHECK(qtrace.substr(0, 6) == "n,P,V\n");
    const std::string sum = slurp(base / "q" / "summary.json");
    CHECK(sum.find("\"schema\": 1") != std::string::npos);
    CHECK(sum.find("\"model\": \"quad\"") != std::string::npos);

    const auto lay = run_cli(
        "simulate --algo layers --steps 2000 --replicas 3 --seed 7 --record-every 100 --out " +
        (base / "l").string());
    CHECK(lay.exit_code == 0);
    CHECK(fs::exists(base / "l" / "trace_r002.csv"));
    CHECK(slurp(base / "l" / "trace_r000.csv").substr(0, 14) == "n,P,V,H,A,U,G\n");

    const auto ml = run_cli("simulate --algo map-layers --rmax 4 --seed 3 --out " +
                            (base / "m").string());
    CHECK(ml.exit_code == 0);
    CHECK(fs::exists(base / "m" / "map_r000.txt"));

    const auto bad = run_cli("simulate --algo warp --steps 10 --out " + (base / "x").string());
    CHECK(bad.exit_code == 2);
    fs::remove_all(base);
}

TEST_CASE("cli verify usage errors") {
    const auto bad = run_cli("verify --suite imaginary");
    CHECK(bad.exit_code == 2);
}
