#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HCFS_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& file) const { return (path / file).string(); }
};

}  // namespace

TEST_CASE("synth-profile writes the expected grid and is seed-stable") {
    TempDir dir("cli_synth");
    const std::string out = dir / "profile.csv";
    REQUIRE(run_cli("synth-profile --seed 5 --duration 1200 --out.profile " + out) == 0);
    const std::string first = slurp(out);
    CHECK(count_lines(first) == 6002);  // header + 6001 samples
    CHECK(first.rfind("t,v\n", 0) == 0);

    REQUIRE(run_cli("synth-profile --seed 5 --duration 1200 --out.profile " + out) == 0);
    CHECK(slurp(out) == first);

    REQUIRE(run_cli("synth-profile --seed 6 --duration 1200 --out.profile " + out) == 0);
    CHECK(slurp(out) != first);

    // degenerate parameters give a constant column
    const std::string flat = dir / "flat.csv";
    REQUIRE(run_cli("synth-profile --amp 0 --noise_sigma 0 --v_mean 7 --duration 2 --out.profile " +
                    flat) == 0);
    std::istringstream in(slurp(flat));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(line.substr(line.find(',') + 1) == "7");
}

TEST_CASE("synth-profile rejects amp above v_mean with a config error") {
    TempDir dir("cli_synth_bad");
    CHECK(run_cli("synth-profile --amp 9 --v_mean 4 --out.profile " + (dir / "x.csv")) == 2);
}

TEST_CASE("train with zero episodes writes an initialized model and empty curve") {
    TempDir dir("cli_train0");
    const std::string model = dir / "model.txt";
    const std::string curve = dir / "curve.csv";
    REQUIRE(run_cli("train --episodes 0 --out.model " + model + " --out.curve " + curve) == 0);
    const std::string m = slurp(model);
    CHECK(m.rfind("hcfs-model v1\n", 0) == 0);
    CHECK(slurp(curve) == "episode,return,critic_loss\n");
}

TEST_CASE("train is byte-reproducible per seed") {
    TempDir dir("cli_train_det");
    const std::string args =
        " --episodes 2 --ddpg.episode_seconds 6 --ddpg.warmup 32 --platoon.n_followers 2 "
        "--profile.duration 100 --out.curve " +
        (dir / "curve.csv");
    REQUIRE(run_cli("train --seed 7 --out.model " + (dir / "a.txt") + args) == 0);
    REQUIRE(run_cli("train --seed 7 --out.model " + (dir / "b.txt") + args) == 0);
    REQUIRE(run_cli("train --seed 8 --out.model " + (dir / "c.txt") + args) == 0);
    CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
    CHECK(slurp(dir / "a.txt") != slurp(dir / "c.txt"));
}

TEST_CASE("config validation failures exit with code 2") {
    TempDir dir("cli_badcfg");
    CHECK(run_cli("train --tau 1.5 --out.model " + (dir / "m.txt")) == 2);
    CHECK(run_cli("train --set nonsense=1 --out.model " + (dir / "m.txt")) == 2);
    CHECK(run_cli("definitely-not-a-command") == 2);
}

TEST_CASE("compare runs model-free with CACC only, refuses HCFS without a model") {
    TempDir dir("cli_compare");
    const std::string base = " --profile.duration 300 --eval.cases '10:20:2;30:40:2' "
                             "--out.report " + (dir / "report.csv") +
                             " --out.traj_dir " + (dir / "traj");
    CHECK(run_cli("compare --strategies CACC --in.model " + (dir / "missing.txt") + base) == 0);
    CHECK(fs::exists(dir.path / "traj" / "case1_CACC.csv"));
    CHECK(fs::exists(dir.path / "traj" / "case2_CACC.csv"));
    CHECK(run_cli("compare --strategies HCFS --in.model " + (dir / "missing.txt") + base) == 3);

    // corrupt model header names the line
    {
        std::ofstream out(dir / "corrupt.txt", std::ios::binary);
        out << "wrong header\n";
    }
    CHECK(run_cli("compare --strategies HCFS --in.model " + (dir / "corrupt.txt") + base) == 3);
    CHECK(slurp("cli_stderr.txt").find("line 1") != std::string::npos);
}

TEST_CASE("compare emits one trajectory per case and strategy plus a report") {
    TempDir dir("cli_compare_full");
    const std::string model = dir / "model.txt";
    REQUIRE(run_cli("train --episodes 0 --out.model " + model + " --out.curve " +
                    (dir / "curve.csv")) == 0);

    const std::string base = " --in.model " + model +
                             " --profile.duration 300 --eval.cases '10:30:2;50:70:3;100:120:2' "
                             "--out.report " + (dir / "report.csv") +
                             " --out.traj_dir " + (dir / "traj");
    REQUIRE(run_cli("compare" + base) == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir.path / "traj")) {
        (void)entry;
        ++files;
    }
    CHECK(files == 9);
    const std::string report = slurp(dir / "report.csv");
    CHECK(count_lines(report) == 10);  // header + 3 cases x 3 strategies
    CHECK(report.rfind("case,strategy,", 0) == 0);
}

TEST_CASE("compare output is byte-identical across invocations with a fixed seed") {
    TempDir dir("cli_compare_det");
    const std::string model = dir / "model.txt";
    REQUIRE(run_cli("train --episodes 0 --seed 3 --out.model " + model + " --out.curve " +
                    (dir / "curve.csv")) == 0);
    const std::string base = " --seed 3 --in.model " + model +
                             " --profile.duration 200 --eval.cases 20:40:3 --out.traj_dir ";
    REQUIRE(run_cli("compare" + base + (dir / "t1") + " --out.report " + (dir / "r1.csv")) == 0);
    REQUIRE(run_cli("compare" + base + (dir / "t2") + " --out.report " + (dir / "r2.csv")) == 0);
    CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));
    for (const char* name : {"case1_CACC.csv", "case1_DDPG.csv", "case1_HCFS.csv"})
        CHECK(slurp((dir.path / "t1" / name).string()) ==
              slurp((dir.path / "t2" / name).string()));
}

TEST_CASE("eval prints a one-row report for a single case") {
    TempDir dir("cli_eval");
    REQUIRE(run_cli("eval --strategy CACC --case 10:20:2 --profile.duration 60 --out.traj_dir " +
                    (dir / "traj")) == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.rfind("case,strategy,", 0) == 0);
    CHECK(out.find("CACC") != std::string::npos);
    CHECK(count_lines(out) == 2);
}

TEST_CASE("dumped config reloads into an identical run") {
    TempDir dir("cli_dump");
    const std::string dump = dir / "effective.cfg";
    REQUIRE(run_cli("synth-profile --seed 11 --duration 40 --noise_sigma 0.4 --out.profile " +
                    (dir / "p1.csv") + " --dump-config " + dump) == 0);
    REQUIRE(run_cli("synth-profile --config " + dump + " --out.profile " + (dir / "p2.csv")) == 0);
    CHECK(slurp(dir / "p1.csv") == slurp(dir / "p2.csv"));
}
