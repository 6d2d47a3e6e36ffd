#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hypangle/hypangle.hpp"

using json = nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const char* tag) {
    static int serial = 0;
    return "/tmp/hypangle_cli_" + std::to_string(getpid()) + "_" + tag + "_" +
           std::to_string(serial++);
}

RunResult run(const std::string& args) {
    const char* bin = std::getenv("HYPANGLE_BIN");
    REQUIRE(bin != nullptr);
    const std::string out = temp_path("out");
    const std::string err = temp_path("err");
    const std::string cmd =
        std::string(bin) + " " + args + " >" + out + " 2>" + err;
    const int raw = std::system(cmd.c_str());
    RunResult res;
    res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return res;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

TEST_CASE("count emits the reference row") {
    const auto res = run("count --level 1 --norm-sq 4");
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "radius,norm_sq,count,main,rel_error");
    const auto cells = split_csv(rows[1]);
    REQUIRE(cells.size() == 5);
    CHECK(cells[1] == "4");
    CHECK(cells[2] == "20");
    CHECK(cells[3] == "24");
    CHECK(cells[4] == "0.166666666667");
    CHECK(std::strtod(cells[0].c_str(), nullptr) ==
          Catch::Approx(std::acosh(2.0)).margin(1e-11));
}

TEST_CASE("count json carries the same numbers") {
    const auto res = run("count --level 1 --norm-sq 4 --format json");
    REQUIRE(res.code == 0);
    const auto table = json::parse(res.out);
    REQUIRE(table.is_array());
    REQUIRE(table.size() == 1);
    CHECK(table[0]["count"] == 20);
    CHECK(table[0]["main"] == 24);
    CHECK(table[0]["rel_error"].get<double>() ==
          Catch::Approx(1.0 / 6.0).margin(1e-11));
}

TEST_CASE("count summary reflects the reparsed table") {
    const std::string sf = temp_path("summary");
    const auto res =
        run("count --level 2 --norm-sq 10,20 --summary " + sf);
    REQUIRE(res.code == 0);
    const auto summary = json::parse(slurp(sf));
    std::remove(sf.c_str());
    CHECK(summary["command"] == "count");
    CHECK(summary["level"] == 2);
    CHECK(summary["rows"] == 2);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 3);
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const auto cells = split_csv(rows[static_cast<std::size_t>(i)]);
        worst = std::max(worst, std::strtod(cells[4].c_str(), nullptr));
    }
    CHECK(summary["max_rel_error"].get<double>() == worst);
}

TEST_CASE("angles stream is sorted and self-consistent") {
    const auto res = run("angles --level 1 --z1 0,2 --norm-sq 4");
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == "a,b,c,d,theta,dist");
    CHECK(rows[1] == "-1,0,-1,-1,0.519146114247,0.962423650119");
    CHECK(rows[2] == "-1,1,-1,0,1.10714871779,0.962423650119");
    long long pc = -100, pa = -100, pd = -100, pb = -100;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv(rows[i]);
        REQUIRE(cells.size() == 6);
        const long long a = std::atoll(cells[0].c_str());
        const long long b = std::atoll(cells[1].c_str());
        const long long c = std::atoll(cells[2].c_str());
        const long long d = std::atoll(cells[3].c_str());
        const bool ascending = std::tie(pc, pa, pd, pb) < std::tie(c, a, d, b);
        CHECK(ascending);
        pc = c, pa = a, pd = d, pb = b;
    }
}

TEST_CASE("angles summary ks can be rebuilt from the emitted table") {
    const std::string sf = temp_path("aks");
    const auto res =
        run("angles --level 2 --z1 1,2 --radius 5 --summary " + sf);
    REQUIRE(res.code == 0);
    const auto summary = json::parse(slurp(sf));
    std::remove(sf.c_str());

    std::vector<double> thetas;
    const auto rows = lines_of(res.out);
    for (std::size_t i = 1; i < rows.size(); ++i)
        thetas.push_back(std::strtod(split_csv(rows[i])[4].c_str(), nullptr));
    REQUIRE_FALSE(thetas.empty());
    CHECK(summary["count"].get<long long>() ==
          static_cast<long long>(thetas.size()));

    const auto ctx = hypangle::make_context(2, {0.0, 1.0}, {1.0, 2.0});
    const hypangle::Ecdf emp(std::move(thetas));
    const double ks = hypangle::ks_distance(
        emp, [&](double w) { return hypangle::xi(ctx.target, w); });
    CHECK(summary["ks"].get<double>() == Catch::Approx(ks).margin(1e-13));
}

TEST_CASE("degenerate angle run keeps the table empty and flags the summary") {
    const std::string sf = temp_path("deg");
    const auto res = run("angles --level 1 --z1 0,1 --norm-sq 2 --summary " + sf);
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 1);
    const auto summary = json::parse(slurp(sf));
    std::remove(sf.c_str());
    CHECK(summary["count"] == 0);
    CHECK(summary["undefined_count"] == 4);
    CHECK(summary["ks"] == "nan");
}

TEST_CASE("cdf table against the uniform law") {
    const auto res = run("cdf --level 1 --z1 0,1 --radius 6 --omega -1:1:4");
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "omega,ecdf,xi,abs_err");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv(rows[i]);
        const double omega = std::strtod(cells[0].c_str(), nullptr);
        const double xi_col = std::strtod(cells[2].c_str(), nullptr);
        CHECK(xi_col ==
              Catch::Approx(omega / hypangle::pi + 0.5).margin(1e-10));
        const double gap = std::abs(std::strtod(cells[1].c_str(), nullptr) - xi_col);
        CHECK(std::strtod(cells[3].c_str(), nullptr) ==
              Catch::Approx(gap).margin(1e-10));
    }
}

TEST_CASE("density grid ties the cdf derivative to the closed form") {
    const std::string sf = temp_path("rho");
    const auto res = run("density --z1 0,2 --grid -1:1:8 --summary " + sf);
    REQUIRE(res.code == 0);
    const auto summary = json::parse(slurp(sf));
    std::remove(sf.c_str());
    CHECK(summary["max_derivative_gap"].get<double>() < 1e-8);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "t,rho,xi_prime_fd");
    bool saw_center = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv(rows[i]);
        if (cells[0] == "0") {
            saw_center = true;
            CHECK(cells[1] == "1.25");
        }
    }
    CHECK(saw_center);
}

TEST_CASE("sector run against the slope main terms") {
    const std::string sf = temp_path("sec");
    const auto res =
        run("sector --level 1 --norm-sq 1000000 --beta -inf,0,inf --summary " + sf);
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "beta,count,main,rel");
    CHECK(split_csv(rows[1])[1] == "0");
    CHECK(split_csv(rows[1])[3] == "nan");
    const auto summary = json::parse(slurp(sf));
    std::remove(sf.c_str());
    CHECK(summary["max_rel_error"].get<double>() < 0.05);
    const auto full = split_csv(rows[3]);
    CHECK(std::strtod(full[2].c_str(), nullptr) == 6000000.0);
}

TEST_CASE("kloosterman table with the interval columns") {
    const auto res = run("kloosterman --m 1 --n 1 --q 5 --interval 0,999");
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "m,n,q,re,im,weil_ratio,interval_re,interval_im,interval_ratio");
    const auto cells = split_csv(rows[1]);
    CHECK(cells[3] == "0.38196601125");
    CHECK(std::strtod(cells[5].c_str(), nullptr) <= 1.0);
    // the interval clamps to the full period, so the two sums coincide
    CHECK(cells[6] == cells[3]);
}

TEST_CASE("verify subcommand round trip") {
    CHECK(run("verify --suite tables,stats --seed 3").code == 0);
    CHECK(run("verify --suite xi --inject-fault xi-zero-branch").code == 1);
    const auto listing = run("verify --list");
    CHECK(listing.code == 0);
    CHECK(listing.out.find("geometry") != std::string::npos);
    CHECK(listing.out.find("kloosterman") != std::string::npos);
}

TEST_CASE("usage errors exit with the configuration code") {
    CHECK(run("bogus").code == 2);
    CHECK(run("count --level 1").code == 2);
    CHECK(run("count --level 1 --radius 2 --norm-sq 9").code == 2);
    CHECK(run("count --level 1 --norm-sq 1").code == 2);
    CHECK(run("verify --suite nosuch").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("count --help").code == 0);
}

TEST_CASE("config file supplies defaults that flags can override") {
    const std::string cfg = temp_path("cfg");
    {
        std::ofstream out(cfg);
        out << "level=2\nnorm-sq=10\n";
    }
    const auto from_cfg = run("count --config " + cfg);
    const auto from_flags = run("count --level 2 --norm-sq 10");
    REQUIRE(from_cfg.code == 0);
    CHECK(from_cfg.out == from_flags.out);
    const auto overridden = run("count --config " + cfg + " --level 1");
    REQUIRE(overridden.code == 0);
    CHECK(overridden.out == run("count --level 1 --norm-sq 10").out);
    std::remove(cfg.c_str());

    const std::string bad = temp_path("badcfg");
    {
        std::ofstream out(bad);
        out << "no-such-key=1\n";
    }
    CHECK(run("count --config " + bad + " --norm-sq 4").code == 2);
    std::remove(bad.c_str());
    CHECK(run("count --config /nonexistent.cfg --norm-sq 4").code == 2);
}

TEST_CASE("table output lands in a file when asked") {
    const std::string tf = temp_path("table");
    const auto res = run("count --level 1 --norm-sq 4 --output " + tf);
    REQUIRE(res.code == 0);
    CHECK(res.out.empty());
    const auto direct = run("count --level 1 --norm-sq 4");
    CHECK(slurp(tf) == direct.out);
    std::remove(tf.c_str());
}
