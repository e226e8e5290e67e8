#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

std::string bin = DERHAM_CLI_PATH;

int run(const std::string& args, const std::string& out_file) {
    std::string cmd = bin + " " + args + " > " + out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("homotopy-check passes and the corrupted fixture fails") {
    CHECK(run("homotopy-check --seed 3", "/tmp/cli_h.json") == 0);
    CHECK(slurp("/tmp/cli_h.json").find("\"ok\"") != std::string::npos);

    write("/tmp/cli_h0.json", "{\"count\": 0}");
    CHECK(run("homotopy-check --scene /tmp/cli_h0.json", "/tmp/cli_h0_out.json") == 0);

    write("/tmp/cli_corrupt.json", "{\"count\": 3, \"corrupt\": true}");
    CHECK(run("homotopy-check --scene /tmp/cli_corrupt.json", "/tmp/cli_c.json") == 3);
    std::string out = slurp("/tmp/cli_c.json");
    CHECK(out.find("witness") != std::string::npos);
    CHECK(out.find("form") != std::string::npos);
}

TEST_CASE("schema violations exit with 2") {
    write("/tmp/cli_bad.json", "{\"space\": \"disk\", \"form\": \"winding\", \"bogus\": 1}");
    CHECK(run("periods --scene /tmp/cli_bad.json", "/tmp/cli_bad_out.json") == 2);
    CHECK(slurp("/tmp/cli_bad_out.json").find("schema") != std::string::npos);

    // non-cycle chain
    write("/tmp/cli_chain.json",
          "{\"space\": \"circle\", \"form\": \"winding\", \"cycle\": [[[0, 1], 1]]}");
    CHECK(run("periods --scene /tmp/cli_chain.json", "/tmp/cli_chain_out.json") == 2);

    // empty p grid
    CHECK(run("cone-threshold --alpha 1 --m 1 --k 1 --p-min 3 --p-max 1", "/tmp/cli_grid.json") ==
          2);
}

TEST_CASE("periods reports the winding number and refuses a primitive") {
    write("/tmp/cli_p.json", "{\"space\": \"square_annulus\", \"form\": \"winding\"}");
    CHECK(run("periods --scene /tmp/cli_p.json", "/tmp/cli_p_out.json") == 0);
    std::string out = slurp("/tmp/cli_p_out.json");
    CHECK(out.find("6.28318530717") != std::string::npos);

    write("/tmp/cli_p3.json", "{\"space\": \"square_annulus\", \"form\": \"winding\", \"p\": 2.0}");
    CHECK(run("periods --scene /tmp/cli_p3.json", "/tmp/cli_p3_out.json") == 3);
    CHECK(slurp("/tmp/cli_p3_out.json").find("cycle") != std::string::npos);
}

TEST_CASE("cone-threshold brackets and deterministic output") {
    std::string flags = "cone-threshold --alpha 1 --m 1 --k 1 --p-min 1 --p-max 3 --p-step 0.05";
    CHECK(run(flags, "/tmp/cli_t1.json") == 0);
    CHECK(run(flags, "/tmp/cli_t2.json") == 0);
    std::string a = slurp("/tmp/cli_t1.json");
    CHECK(a == slurp("/tmp/cli_t2.json"));  // byte-identical
    CHECK(a.find("p_star_bracket") != std::string::npos);
    CHECK(a.find("\"2\"") != std::string::npos);  // exact threshold

    CHECK(run(flags + " --format csv", "/tmp/cli_t3.csv") == 0);
    std::string csv = slurp("/tmp/cli_t3.csv");
    CHECK(csv.rfind("p,slope,verdict", 0) == 0);
    CHECK(csv.find("diverges") != std::string::npos);
    CHECK(csv.find("converges") != std::string::npos);
}

TEST_CASE("lift-analyze and flatten round trips") {
    write("/tmp/cli_l.json", R"({
      "base": {"weights": [1, 1]},
      "criterion": {
        "theta2": {"op": "abs", "arg": {"op": "poly", "arity": 2, "lipschitz": 4.0,
                   "terms": [{"exps": [2, 0], "num": 1}, {"exps": [0, 1], "num": -1}]}},
        "theta3": {"op": "const", "value": 0.0, "arity": 2},
        "curves": [[{"op": "coord", "index": 0, "arity": 1},
                    {"op": "poly", "arity": 1, "lipschitz": 10,
                     "terms": [{"exps": [2], "num": 1}, {"exps": [5], "num": 1}]}]],
        "t_grid": [0.01],
        "bound": 1000
      }})");
    CHECK(run("lift-analyze --scene /tmp/cli_l.json", "/tmp/cli_l_out.json") == 0);
    CHECK(slurp("/tmp/cli_l_out.json").find("unbounded") != std::string::npos);

    write("/tmp/cli_f.json", R"({
      "ambient": 3,
      "last": {"lambda": [0, 0, 1], "xi": {"op": "const", "value": 0.0, "arity": 3}},
      "checks": {"round_trip": {"samples": 200, "box": [[-2, 2], [-2, 2], [-2, 2]]},
                 "bilipschitz": {"pairs": 200, "box": [[-2, 2], [-2, 2], [-2, 2]]}}})");
    CHECK(run("flatten --scene /tmp/cli_f.json", "/tmp/cli_f_out.json") == 0);

    // declared Lipschitz constant false: math failure with a witness
    write("/tmp/cli_fv.json", R"({
      "ambient": 3,
      "last": {"lambda": [0, 0, 1], "xi": {"op": "const", "value": 0.0, "arity": 3}},
      "checks": {"graph_lemma": [{"xi": {"op": "poly", "arity": 2, "lipschitz": 0.02,
                                          "terms": [{"exps": [0, 1], "num": 1}]},
                                   "cone": {"lambda": [1, 0], "M": 0.8},
                                   "samples": 20000}]}})");
    CHECK(run("flatten --scene /tmp/cli_fv.json", "/tmp/cli_fv_out.json") == 3);
    CHECK(slurp("/tmp/cli_fv_out.json").find("witness") != std::string::npos);
}
