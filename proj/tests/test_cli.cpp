#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <cxorder/cli.hpp>

using cxorder::run_cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("cxorder_cli_" + name);
}

}  // namespace

TEST_CASE("check-st") {
    CHECK(run({"check-st", "binom(5,1/4)", "binom(5,3/4)"}).code == 0);
    CHECK(run({"check-st", "poiss(2)", "poiss(1)"}).code == 1);
    const auto same = run({"check-st", "binom(5,1/2)", "binom(5,1/2)"});
    CHECK(same.code == 0);
    const auto j = nlohmann::json::parse(same.out);
    CHECK(j["holds"] == true);
    CHECK(j["margin"] == "0");
}

TEST_CASE("check-cx") {
    CHECK(run({"check-cx", "binom(2,1/2)", "binom(2,1/2)"}).code == 0);
    CHECK(run({"check-cx", "binom(1,1/2)", "binom(2,1/4)"}).code == 0);
    CHECK(run({"check-cx", "binom(2,1/4)", "binom(1,1/2)"}).code == 1);
    CHECK(run({"check-cx", "norm(0,1)", "norm(0,2)"}).code == 0);
    CHECK(run({"check-cx", "norm(0,2)", "norm(0,1)"}).code == 1);
}

TEST_CASE("input errors exit 2") {
    CHECK(run({"check-st", "binom(5,2)", "binom(5,1/2)"}).code == 2);
    CHECK(run({"check-st", "cauchy(0)", "binom(5,1/2)"}).code == 2);
    CHECK(run({"check-st", "binom(5,1/2)"}).code == 2);
    CHECK(run({"check-st", "@/nonexistent.json", "binom(1,1/2)"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--tol", "-1", "check-st", "poiss(1)", "poiss(2)"}).code == 2);
    CHECK(run({"--format", "xml", "check-st", "poiss(1)", "poiss(2)"}).code == 2);
    CHECK(run({"rasa-sweep", "binomial", "--grid", "0:1"}).code == 2);
    CHECK(run({"rasa-sweep", "cauchy", "--grid", "0:1:2"}).code == 2);
}

TEST_CASE("measures from json files") {
    const auto path = temp_path("measure.json");
    std::ofstream(path) << R"({"atoms": [{"x": "-3", "w": "1/2"}, {"x": "1", "w": "1/2"}]})";
    CHECK(run({"check-st", "@" + path.string(), "binom(1,1/2)"}).code == 0);
    CHECK(run({"check-st", "binom(1,1/2)", "@" + path.string()}).code == 1);
    std::filesystem::remove(path);
}

TEST_CASE("rasa-sweep") {
    const auto r = run({"rasa-sweep", "binomial", "--n", "4", "--grid", "0:1:11", "--battery", "9"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "family,params,phi_kind,phi_param,scale,gap,regime");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == "exact");
        CHECK(line.find(",-") == std::string::npos);
    }
    CHECK(rows == 121 * 11);
    const auto summary = nlohmann::json::parse(r.err);
    CHECK(summary["min_gap"] == "0");
    CHECK(summary["passed"] == true);
}

TEST_CASE("rasa-sweep degenerate grid") {
    const auto r = run({"--format", "json", "rasa-sweep", "binomial", "--grid", "1/3", "--n", "3"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const auto& row : j["rows"]) {
        CHECK(row["gap"] == "0");
    }
}

TEST_CASE("rasa-sweep warns on nb hypothesis violations") {
    const auto r = run({"rasa-sweep", "nb", "--grid", "1,2", "--grid2", "0.2,0.5", "--battery", "1"});
    CHECK(r.code == 0);
    std::istringstream lines(r.err);
    std::string line;
    int warnings = 0;
    while (std::getline(lines, line)) {
        warnings += line.rfind("warning:", 0) == 0;
    }
    CHECK(warnings == 2);
}

TEST_CASE("muirhead") {
    CHECK(run({"muirhead", "binom(3,1/4)", "binom(3,3/4)", "--p", "1,1", "--q", "2,0"}).code == 0);
    CHECK(run({"muirhead", "poiss(1)", "poiss(2)", "poiss(3)", "--p", "1,1,1", "--q", "2,1,0"}).code == 0);
    const auto bad = run({"muirhead", "binom(3,1/4)", "binom(3,3/4)", "--p", "2,0", "--q", "1,1"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("not majorized") != std::string::npos);
}

TEST_CASE("muirhead on incomparable measures") {
    const auto path = temp_path("spread.json");
    std::ofstream(path) << R"({"atoms": [{"x": "0", "w": "1/2"}, {"x": "4", "w": "1/2"}]})";
    const std::vector<std::string> base{"muirhead", "@" + path.string(), "binom(2,1/2)", "--p", "1,1", "--q", "2,0"};
    CHECK(run(base).code == 3);
    auto unconditional = base;
    unconditional.push_back("--unconditional");
    CHECK(run(unconditional).code != 3);
    std::filesystem::remove(path);
}

TEST_CASE("chain") {
    const auto r = run({"chain", "--p", "1,1,1", "--q", "3,0,0"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["chain"] == nlohmann::json{"(1,1,1)", "(2,1,0)", "(3,0,0)"});
    CHECK(j["steps"][0]["l1"] == 1);
    CHECK(j["steps"][0]["l2"] == 3);
    CHECK(run({"chain", "--p", "3,0,0", "--q", "1,1,1"}).code == 2);
}

TEST_CASE("counterexample") {
    CHECK(run({"counterexample", "ex2.4"}).code == 0);
    const auto r = run({"counterexample", "ex3.9"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["passed"] == true);
    CHECK(run({"counterexample", "ex9.9"}).code == 2);
}

TEST_CASE("couple") {
    const auto poisson = run({"couple", "poisson", "1", "2", "--n", "100000", "--seed", "7"});
    CHECK(poisson.code == 0);
    CHECK(nlohmann::json::parse(poisson.out)["dominance_violations"] == 0);
    const auto gamma = run({"couple", "gamma", "1", "2", "2", "1", "--n", "100000"});
    CHECK(gamma.code == 0);
    CHECK(nlohmann::json::parse(gamma.out)["dominance_violations"] == 0);
    CHECK(run({"couple", "poisson", "2", "1"}).code == 2);
    CHECK(run({"couple", "poisson", "1"}).code == 2);
    CHECK(run({"couple", "poisson", "1", "2", "--n", "0"}).code == 2);
}

TEST_CASE("couple normal rows are shifted by one") {
    const auto r = run({"--format", "csv", "couple", "normal", "0", "1", "1", "--n", "10"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,y");
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        const double x = std::stod(line.substr(0, comma));
        const double y = std::stod(line.substr(comma + 1));
        CHECK(y - x == doctest::Approx(1.0).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("eval-op and eval-poly") {
    const auto op = run({"eval-op", "bernstein", "--order", "4", "--x", "1/2", "--phi", "square"});
    CHECK(op.code == 0);
    // x^2 + x(1-x)/n at x = 1/2, n = 4
    CHECK(nlohmann::json::parse(op.out)["value"] == "5/16");

    const std::string v = R"({"arity": 2, "terms": [{"c": "1/2", "e": [3, 1]}, {"c": "1/2", "e": [1, 3]}]})";
    const auto poly = run({"eval-poly", v, "binom(1,1/4)", "binom(1,1/2)"});
    CHECK(poly.code == 0);
    const auto j = nlohmann::json::parse(poly.out);
    CHECK(j["atoms"].size() == 5);
    CHECK(run({"eval-poly", R"({"arity": 1, "terms": [{"c": "1/2", "e": [1]}]})", "binom(1,1/2)"}).code == 2);
}

TEST_CASE("property: --out files are byte-identical across runs") {
    const auto a = temp_path("a.csv");
    const auto b = temp_path("b.csv");
    const std::vector<std::vector<std::string>> commands{
        {"rasa-sweep", "poisson", "--grid", "0:2:3"},
        {"couple", "nb", "1", "0.2", "2", "0.5", "--n", "2000"},
        {"muirhead", "poiss(1)", "poiss(2)", "--p", "1,1", "--q", "2,0"},
        {"check-cx", "gamma(2,1)", "gamma(1,1/2)"},
    };
    for (const auto& command : commands) {
        CAPTURE(command.front());
        for (const auto& path : {a, b}) {
            std::vector<std::string> args{"--seed", "11", "--out", path.string()};
            args.insert(args.end(), command.begin(), command.end());
            const auto r = run(args);
            CHECK(r.code <= 1);
            CHECK(r.out.find("family,params") == std::string::npos);
        }
        CHECK(!slurp(a).empty());
        CHECK(slurp(a) == slurp(b));
    }
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}
