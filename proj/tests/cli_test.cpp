#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run sift(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + SIFT_CLI_PATH + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    while (auto n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("sift_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("generate, learn and verify") {
    auto dir = scratch("flow");
    auto full = sift("generate -b blocks3 --kind full --seed 0 -o " + (dir / "full").string());
    REQUIRE(full.code == 0);
    CHECK(contains(full.out, "nodes 4051  edges 21300"));

    auto tr = sift("generate -b gripper --kind traces --n 5 --L 250 --seed 7 -o " + (dir / "tr").string());
    REQUIRE(tr.code == 0);
    CHECK(contains(tr.out, "edges 1250  traces 5"));

    auto learn = sift("learn -i " + (dir / "tr" / "tracegraph.json").string() + " -o " + (dir / "model").string());
    REQUIRE(learn.code == 0);
    CHECK(contains(learn.out, "#F 43  #F_a 6"));
    CHECK(fs::exists(dir / "model" / "domain.pddl"));
    CHECK(fs::exists(dir / "model" / "learned.json"));
    CHECK(fs::exists(dir / "model" / "instance.pddl"));

    auto narrow = sift("learn --max-arity 0 -i " + (dir / "tr" / "tracegraph.json").string() + " -o " +
                       (dir / "narrow").string());
    REQUIRE(narrow.code == 0);
    CHECK(contains(narrow.out, "#F 7 "));

    auto verify = sift("verify -b gripper -m " + (dir / "model").string() + " --seed 3 -o " + (dir / "v").string());
    CHECK(verify.code == 0);
    CHECK(contains(verify.out, "passed"));
    CHECK(fs::exists(dir / "v" / "report.json"));
}

TEST_CASE("exit codes") {
    auto dir = scratch("codes");
    CHECK(sift("learn -i /nonexistent/tracegraph.json -o " + dir.string()).code == 2);
    CHECK(sift("frobnicate").code == 2);
    CHECK(sift("generate -b chess --seed 1 -o " + dir.string()).code == 2);

    {
        std::ofstream f(dir / "empty.json");
        f << R"({"format":"tracegraph","version":1,"nodes":0,"edges":[],"traces":[]})";
    }
    CHECK(sift("learn -i " + (dir / "empty.json").string() + " -o " + (dir / "m").string()).code == 4);

    CHECK(sift("pipeline -b hanoi --runs 1 --seed 1 -o " + (dir / "p").string(), "SIFT_WORKERS=zero").code == 2);

    REQUIRE(sift("generate -b sokoban --kind traces --seed 1 -o " + (dir / "sk").string()).code == 0);
    REQUIRE(sift("learn -i " + (dir / "sk" / "tracegraph.json").string() + " -o " + (dir / "skm").string()).code == 0);
    auto strict = sift("verify -b sokoban -m " + (dir / "skm").string() + " --seed 2 --threshold 1 -o " +
                       (dir / "v1").string());
    CHECK(strict.code == 5);
    CHECK(contains(strict.out, "failed"));
    auto lax = sift("verify -b sokoban -m " + (dir / "skm").string() + " --seed 2 --threshold 0 -o " +
                    (dir / "v0").string());
    CHECK(lax.code == 0);
}

TEST_CASE("pipeline command") {
    auto dir = scratch("pipe");
    auto r = sift("pipeline -b gripper --runs 1 --seed 4 -j 2 -o " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "#F_a 6.0"));
    CHECK(contains(r.out, "Verif 100%"));
    CHECK(fs::exists(dir / "row.json"));
}
