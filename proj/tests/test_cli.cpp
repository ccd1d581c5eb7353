#include <doctest.h>

#include "wban/csv.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace wban;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "wban_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(WBAN_CLI) + " " + args + " >" +
                            (kScratch / "stdout.txt").string() + " 2>" +
                            (kScratch / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write(const std::string& name, const std::string& text) {
    fs::create_directories(kScratch);
    const auto path = kScratch / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
    fs::create_directories(kScratch);
    const std::string good = write("good.ini", "[scenario]\nnodes_per_up = 1\n");
    CHECK(run("solve --config " + good) == 0);
    CHECK(slurp(kScratch / "stdout.txt").find("UP") != std::string::npos);

    CHECK(run("solve --bogus") == 2);
    CHECK(run("solve --config " + write("parse.ini", "[scenario]\nber = x\n")) == 2);
    CHECK(slurp(kScratch / "stderr.txt").find("line 2") != std::string::npos);
    CHECK(run("solve --config " + write("invalid.ini", "[scenario]\nber = 3\n")) == 3);
    CHECK(run("sweep --config " + good) == 3);  // no [sweep] section
    CHECK(run("solve --max-iterations 3") == 4);
}

TEST_CASE("sweep writes CSV") {
    const std::string cfg = write("sweep.ini",
                                  "[scenario]\ntraffic = nonsaturated\n"
                                  "[sweep]\nparameter = arrival_rate\nvalues = 1, 2\n");
    const std::string out = (kScratch / "sweep.csv").string();
    REQUIRE(run("sweep --config " + cfg + " --out " + out + " --plot " +
                (kScratch / "sweep").string()) == 0);
    std::ifstream in(out);
    CHECK(read_csv(in).size() == 16);
    CHECK(fs::exists(kScratch / "sweep_throughput.svg"));
}

TEST_CASE("compare from CSV files") {
    const std::string a = (kScratch / "a.csv").string();
    REQUIRE(run("solve --out " + a) == 0);
    std::ifstream in(a);
    auto table = read_csv(in);
    for (auto& r : table) {
        r.sim_reliability = r.model_reliability;
        r.sim_throughput = r.model_throughput;
        r.sim_energy = r.model_energy;
        r.sim_delay = r.model_delay;
    }
    const std::string same = write("same.csv", to_csv(table));
    CHECK(run("compare --analytical " + a + " --simulated " + same) == 0);

    for (auto& r : table) *r.sim_delay *= 2.0;
    const std::string off = write("off.csv", to_csv(table));
    CHECK(run("compare --analytical " + a + " --simulated " + off) == 5);
    CHECK(run("compare --analytical " + a + " --simulated " + a) == 5);  // no sim columns
    CHECK(run("compare --analytical " + write("junk.csv", "x\n") + " --simulated " + off) == 2);
}

TEST_CASE("simulate with trace") {
    const std::string trace = (kScratch / "trace.txt").string();
    CHECK(run("simulate --replications 1 --horizon 10 --trace " + trace) == 0);
    CHECK(fs::file_size(trace) > 0);
    CHECK(run("simulate --replications 2 --horizon 10 --trace " + trace) == 3);
}
