// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/output.hpp"
#include "vf/cli.hpp"
#include "vf/error.hpp"

using namespace vf;
using namespace vf::cli;
namespace fs = std::filesystem;

namespace {

struct Sandbox
{
    fs::path dir;
    explicit Sandbox(const std::string& name) : dir(fs::current_path() / ("cli_tmp_" + name))
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name, std::ios::binary) << text;
        return (dir / name).string();
    }
    std::string out(const std::string& name) const { return (dir / name).string(); }
};

struct Result
{
    int code;
    std::string out, err;
};

Result vf_run(std::vector<std::string> args)
{
    std::ostringstream o, e;
    int code = run(args, o, e);
    return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

const char* kDisk = "domain = {shape=\"disk\", center=[0,0], radius=1}\n";

const char* kCertBody = R"(kernel = {preset="noncutoff", dim=2, nu=0}
[bounds]
E_f = 2
Eprime_f = 2
W_f = 1
M = 1
E = 1
R_X = 1
[certificate]
tau = 1
)";

}  // namespace

TEST_CASE("trace on the disk diameter orbit gives three rebounds")
{
    Sandbox sb("trace");
    auto cfg = sb.write("t.toml", std::string(kDisk) + "[trace]\nx = [0, 0]\nv = [1, 0]\nhorizon = 6\n");
    Result r = vf_run({"trace", cfg, "--output", sb.out("o")});
    REQUIRE(r.code == exit_ok);
    auto rows = lines(slurp(sb.dir / "o" / "trace.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "k,t_k,x_k0,x_k1,v_k0,v_k1,class\r");
    CHECK(rows[1] == "1,1,-1,0,-1,0,rebounds\r");
    CHECK(rows[2] == "2,3,1,0,1,0,rebounds\r");
    CHECK(rows[3] == "3,5,-1,0,-1,0,rebounds\r");
    validate_artifact(slurp(sb.dir / "o" / "trace.json"));
}

TEST_CASE("empty config is a configuration error with a location")
{
    Sandbox sb("empty");
    auto cfg = sb.write("empty.toml", "");
    Result r = vf_run({"trace", cfg, "--output", sb.out("o")});
    CHECK(r.code == exit_config);
    CHECK(r.err.find("empty.toml:1:") != std::string::npos);
    CHECK(r.err.find("domain") != std::string::npos);
    CHECK(!fs::exists(sb.dir / "o"));
}

TEST_CASE("config diagnostics name the line and key")
{
    try
    {
        parse_config("seed = 1\n[trace]\nx = [0, 0]\nbogus = 3\nv = [1, 0]\nhorizon = 2\n", "c.toml");
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::config_error);
        CHECK(std::string(e.what()).find("c.toml:4:") != std::string::npos);
        CHECK(std::string(e.what()).find("trace.bogus") != std::string::npos);
    }
    try
    {
        parse_config("seed = 1\nradius = \n", "c.toml");
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()).find("c.toml:2:") != std::string::npos);
    }
    try
    {
        parse_config("[transport]\nnx = \"many\"\n", "c.toml");
        CHECK(false);
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()).find("c.toml:2: transport.nx must be an integer")
              != std::string::npos);
    }
    RunConfig ok = parse_config("domain = {shape=\"ellipse\", center=[0,0], axes=[2,1]}\n");
    REQUIRE(ok.domain);
    CHECK(make_domain(*ok.domain).name() == "ellipse");
    CHECK(ok.hash.size() == 64);

    RunConfig missing = parse_config("[trace]\nx = [0, 0]\nv = [1, 0]\nhorizon = 1\n");
    CHECK_THROWS_AS(validate_for(missing, "trace"), Error);
}

TEST_CASE("usage errors exit with the configuration code")
{
    CHECK(vf_run({}).code == exit_config);
    CHECK(vf_run({"nonsense", "x.toml"}).code == exit_config);
    CHECK(vf_run({"trace"}).code == exit_config);
    CHECK(vf_run({"trace", "/nonexistent/config.toml"}).code == exit_config);
    CHECK(vf_run({"--help"}).code == exit_ok);
}

TEST_CASE("certificate with nu = 0 reports K = 2 and reproduces bit for bit")
{
    Sandbox sb("cert");
    auto cfg = sb.write("c.toml", std::string("seed = 5\n") + kDisk + kCertBody);
    Result a = vf_run({"certificate", cfg, "--output", sb.out("a")});
    Result b = vf_run({"certificate", cfg, "--output", sb.out("b")});
    REQUIRE(a.code == exit_ok);
    REQUIRE(b.code == exit_ok);
    CHECK(a.err.find("parameterize") != std::string::npos);
    std::string ja = slurp(sb.dir / "a" / "certificate.json");
    CHECK(ja.find("\"K\": 2,") != std::string::npos);
    CHECK(ja == slurp(sb.dir / "b" / "certificate.json"));
    CHECK(slurp(sb.dir / "a" / "certificate_audit.csv") == slurp(sb.dir / "b" / "certificate_audit.csv"));
    validate_artifact(ja);
    auto j = nlohmann::json::parse(ja);
    CHECK(j["result"]["kind"] == "exponential");
    CHECK(j["result"]["K_threshold"] == 2);
    CHECK(j["calibration"]["source"] == "defaults");
    CHECK(j["calibration"]["defaulted"].size() == 5);
}

TEST_CASE("compute failures exit 3 and remove partial outputs")
{
    Sandbox sb("fail");
    std::string body = kCertBody;
    body.replace(body.find("nu=0"), 4, "nu=0.5");
    auto cfg = sb.write("c.toml", std::string(kDisk) + body);
    Result r = vf_run({"certificate", cfg, "--output", sb.out("o")});
    CHECK(r.code == exit_compute);
    CHECK(r.err.find("NonConvergence") != std::string::npos);
    CHECK(!fs::exists(sb.dir / "o"));
}

TEST_CASE("calibration provenance flows into artifacts")
{
    Sandbox sb("cal");
    auto cal = sb.write("cal.toml", "cst_Q = 2.5\ncst_L = 0.75\n");
    (void)cal;
    auto cfg = sb.write("c.toml", std::string("calibration = \"cal.toml\"\n") + kDisk + kCertBody);
    Result r = vf_run({"certificate", cfg, "--output", sb.out("o")});
    REQUIRE(r.code == exit_ok);
    auto j = nlohmann::json::parse(slurp(sb.dir / "o" / "certificate.json"));
    CHECK(j["calibration"]["calibrated"] == nlohmann::json::array({"cst_Q", "cst_L"}));
    CHECK(j["result"]["constants"]["cst_Q"] == 2.5);

    sb.write("bad.toml", "cst_Q = -1\n");
    auto cfg2 = sb.write("c2.toml", std::string("calibration = \"bad.toml\"\n") + kDisk + kCertBody);
    CHECK(vf_run({"certificate", cfg2, "--output", sb.out("o2")}).code == exit_config);
}

TEST_CASE("every subcommand writes artifacts that re-validate")
{
    Sandbox sb("all");
    auto cfg = sb.write("c.toml", R"(seed = 9
domain = {shape="disk", center=[0,0], radius=1}
kernel = {preset="hard_spheres", dim=2}
[classify]
pairs = [[1,0,-1,0],[1,0,0,1],[1,0,1,0]]
random = 4
[transport]
u0 = "gaussian"
x0 = [0.2, 0.1]
times = [0, 0.5]
nx = 12
nv = 8
[grazing]
eps = 0.1
samples = 512
trials = 200
[simulate]
T = 0.05
dt = 0.01
nv = 12
center = [1.5, 0]
lb_rho = 0.1
lb_theta = 1
snapshot_every = 2
)");
    struct Case
    {
        const char* sub;
        const char* json;
        const char* csv;
    };
    for (Case c : {Case{"classify", "classify.json", "classify.csv"},
                   Case{"transport", "transport.json", "transport.csv"},
                   Case{"grazing", "grazing.json", "grazing.csv"},
                   Case{"simulate", "simulate.json", "simulate.csv"}})
    {
        CAPTURE(c.sub);
        fs::path o = sb.dir / c.sub;
        Result r = vf_run({c.sub, cfg, "--output", o.string()});
        REQUIRE(r.code == exit_ok);
        std::string text = slurp(o / c.json);
        validate_artifact(text);
        CHECK(lines(slurp(o / c.csv)).size() >= 2);
        Result again = vf_run({c.sub, cfg, "--output", (o.string() + "_2")});
        CHECK(slurp(fs::path(o.string() + "_2") / c.json) == text);
    }
    auto rows = lines(slurp(sb.dir / "classify" / "classify.csv"));
    CHECK(rows[1].find(",rebounds,") != std::string::npos);
    CHECK(rows[2].find(",stop,") != std::string::npos);
    CHECK(rows[3].find(",line,") != std::string::npos);
    auto sim = nlohmann::json::parse(slurp(sb.dir / "simulate" / "simulate.json"));
    CHECK(sim["result"]["snapshots"].size() >= 2);
    CHECK(fs::exists(sb.dir / "simulate" / "snapshot_0000.bin"));
    auto gz = nlohmann::json::parse(slurp(sb.dir / "grazing" / "grazing.json"));
    CHECK(gz["result"]["falsification"]["counterexamples"] == 0);
}

TEST_CASE("artifact validation rejects damaged envelopes")
{
    CHECK_THROWS_AS(validate_artifact("not json"), Error);
    CHECK_THROWS_AS(validate_artifact("{}"), Error);
    nlohmann::ordered_json j;
    j["tool"] = "vf";
    j["subcommand"] = "trace";
    j["config_sha256"] = std::string(64, 'a');
    j["seed"] = 1;
    j["calibration"] = {{"source", "defaults"}, {"calibrated", nlohmann::json::array()},
                        {"defaulted", nlohmann::json::array()}};
    j["result"] = nlohmann::json::object();
    validate_artifact(j.dump());
    j["config_sha256"] = "xyz";
    CHECK_THROWS_AS(validate_artifact(j.dump()), Error);
}

TEST_CASE("csv quoting and number format")
{
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(fmt_num(0.1) == "0.1");
    CHECK(std::stod(fmt_num(1.0 / 3)) == 1.0 / 3);
    CHECK(fmt_num(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
