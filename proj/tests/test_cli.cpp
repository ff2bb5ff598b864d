#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config(const std::string& name) { return std::string(RADIALCAP_CONFIG_DIR) + "/" + name; }

Run cli(const std::string& args) {
    const fs::path err = fs::temp_directory_path() / "radialcap_cli_test.err";
    const std::string cmd = std::string("\"") + RADIALCAP_CLI + "\" " + args + " 2>\"" + err.string() + "\"";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::vector<std::string> crlf_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find("\r\n", pos);
        REQUIRE(end != std::string::npos);
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 2;
    }
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

// Structural equality with a relative tolerance on numbers.
void compare(const json& got, const json& want, const std::string& path) {
    CAPTURE(path);
    if (want.is_number()) {
        REQUIRE(got.is_number());
        const double a = got.get<double>(), b = want.get<double>();
        CHECK(std::fabs(a - b) <= 1e-9 * (1 + std::fabs(b)));
        return;
    }
    REQUIRE(got.type() == want.type());
    if (want.is_object()) {
        CHECK(got.size() == want.size());
        for (const auto& [k, v] : want.items()) {
            REQUIRE(got.contains(k));
            compare(got[k], v, path + "/" + k);
        }
    } else if (want.is_array()) {
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) compare(got[i], want[i], path + "/" + std::to_string(i));
    } else {
        CHECK(got == want);
    }
}

} // namespace

TEST_CASE("classify exit codes and headlines") {
    const Run p3 = cli("classify " + config("euclid3.json") + " --p 3");
    CHECK(p3.code == 0);
    CHECK(p3.out.rfind("PParabolic (Theorem 1)", 0) == 0);

    const Run p2 = cli("classify " + config("euclid3.json") + " --p 2");
    CHECK(p2.code == 10);
    CHECK(p2.out.rfind("Inconclusive (tail convergent)", 0) == 0);

    // M_p = (4 - p) coth(r) for this constellation.
    const Run up = cli("classify " + config("horosphere_upper.json") + " --p 5");
    CHECK(up.code == 0);
    CHECK(up.out.rfind("PParabolic (Theorem 2)", 0) == 0);
    const Run fails = cli("classify " + config("horosphere_upper.json") + " --p 2");
    CHECK(fails.code == 10);
    CHECK(fails.out.rfind("Inconclusive (balance fails)", 0) == 0);

    const Run bw = cli("classify " + config("cylinder_upper.json") + " --p 4 --mode bounded_w --r0 1 --lower-const 0.5");
    CHECK(bw.code == 0);
}

TEST_CASE("input errors exit 2") {
    const Run bad = cli("classify " + config("malformed.json") + " --p 2");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("syntax error at position 3") != std::string::npos);

    const Run typo = cli("classify " + config("typo.json") + " --p 2");
    CHECK(typo.code == 2);
    CHECK(typo.err.find("field 'lamda': unknown field") != std::string::npos);

    CHECK(cli("classify /nonexistent/config.json --p 2").code == 2);
    CHECK(cli("classify " + config("euclid3.json") + " --p two").code == 2);
    CHECK(cli("classify " + config("euclid3.json") + " --p 2 --k-max 1").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("numeric failures exit 3") {
    const fs::path tmp = fs::temp_directory_path() / "radialcap_log_warp.json";
    std::ofstream(tmp) << R"j({"n": 2, "m": 2, "w": "log(r)", "g": "1", "lambda": "0", "h": "0", "tangency": "lower"})j";
    const Run r = cli("classify " + tmp.string() + " --p 2");
    CHECK(r.code == 3);
    CHECK(r.err.find("domain_error") != std::string::npos);
    fs::remove(tmp);
}

TEST_CASE("sweep CSV") {
    const Run r = cli("sweep " + config("euclid3.json") + " --p-from 2 --p-to 5 --p-step 0.5");
    CHECK(r.code == 0);
    const auto lines = crlf_lines(r.out);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0] == "p,outcome,alpha_hat,cap_at_horizon");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        REQUIRE(cells.size() == 4);
        const double p = std::stod(cells[0]);
        CHECK(cells[1] == (p >= 3 ? "p_parabolic" : "inconclusive"));
    }

    const Run h = cli("sweep " + config("hyperbolic3.json") + " --p-from 2 --p-to 8 --p-step 1");
    CHECK(h.code == 0);
    const auto hl = crlf_lines(h.out);
    REQUIRE(hl.size() == 8);
    for (std::size_t i = 1; i < hl.size(); ++i) CHECK(split(hl[i])[1] == "inconclusive");

    CHECK(cli("sweep " + config("euclid3.json") + " --p-from 5 --p-to 2").code == 2);

    const fs::path out = fs::temp_directory_path() / "radialcap_sweep.csv";
    CHECK(cli("sweep " + config("euclid2.json") + " --p-from 2 --p-to 3 --out " + out.string()).code == 0);
    CHECK(slurp(out).rfind("p,outcome,alpha_hat,cap_at_horizon\r\n", 0) == 0);
    fs::remove(out);
}

TEST_CASE("capacity") {
    const Run r = cli("capacity " + config("euclid3.json") + " --p 2 --rho 1 --R 2 --json");
    CHECK(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["outcome"]["drifted_capacity"].get<double>() == doctest::Approx(8 * std::numbers::pi).epsilon(1e-10));
    const Run far = cli("capacity " + config("euclid3.json") + " --p 2 --rho 1 --R 1e4 --json");
    CHECK(json::parse(far.out)["outcome"]["drifted_capacity"].get<double>() ==
          doctest::Approx(4 * std::numbers::pi / (1 - 1e-4)).epsilon(1e-10));
    CHECK(cli("capacity " + config("euclid3.json") + " --flux 0").code == 2);
}

TEST_CASE("solve CSV") {
    const Run r = cli("solve " + config("euclid3.json") + " --p 2 --rho 1 --R 2 --samples 11");
    CHECK(r.code == 0);
    const auto lines = crlf_lines(r.out);
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "r,psi_closed,psi_ode,residual");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split(lines[i]);
        const double rr = std::stod(c[0]);
        CHECK(std::stod(c[1]) == doctest::Approx(2 * (1 - 1 / rr)).epsilon(1e-10));
        CHECK(std::fabs(std::stod(c[2]) - std::stod(c[1])) <= 1e-6);
        CHECK(std::stod(c[3]) <= 1e-6);
    }
}

TEST_CASE("simulate") {
    const Run r = cli("simulate " + config("euclid3.json") + " --r0 1 --rin 0.5 --rout 8 --paths 300 --dt 1e-3 --json");
    CHECK(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["outcome"]["inner_hits"].get<int>() + doc["outcome"]["outer_hits"].get<int>() + doc["outcome"]["censored"].get<int>() == 300);
    CHECK(doc["evidence"]["exact_p_inner"].get<double>() == doctest::Approx(7.0 / 15));
    const Run again = cli("simulate " + config("euclid3.json") + " --r0 1 --rin 0.5 --rout 8 --paths 300 --dt 1e-3 --json");
    CHECK(json::parse(again.out)["outcome"]["inner_hits"] == doc["outcome"]["inner_hits"]);
    CHECK(cli("simulate " + config("euclid3.json") + " --r0 9").code == 2);
}

TEST_CASE("JSON output matches the golden file") {
    const Run r = cli("classify " + config("euclid3.json") + " --p 2 --json");
    CHECK(r.code == 10);
    json got = json::parse(r.out);
    for (const char* key : {"command", "inputs", "outcome", "evidence", "timings"}) CHECK(got.contains(key));
    CHECK(got["timings"]["total_ms"].is_number());
    json want = json::parse(slurp(fs::path(RADIALCAP_GOLDEN_DIR) / "classify_euclid3_p2.json"));
    for (json* doc : {&got, &want}) {
        doc->erase("timings");
        (*doc)["inputs"].erase("config");
    }
    compare(got, want, "");
}
