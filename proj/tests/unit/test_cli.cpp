#include "cli/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "markup");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = markup::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) {
        v.push_back(l);
    }
    return v;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("markup_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] const fs::path& path() const { return path_; }
    [[nodiscard]] std::string write(const std::string& name, const std::string& body) const {
        const auto p = path_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, GuaranteeDefaultBattery) {
    const auto r = invoke({"guarantee", "--eta", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_GT(ls.size(), 1u);
    EXPECT_EQ(ls[0], "eta,distribution,S,Pi,U,pi_ratio,u_ratio,pi_bound,u_bound,pass");
    EXPECT_NE(r.err.find("checks passed"), std::string::npos);
}

TEST(Cli, OutputIsDeterministic) {
    const auto a = invoke({"frontier", "--eta", "3", "--grid", "7"});
    const auto b = invoke({"frontier", "--eta", "3", "--grid", "7"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto sa = invoke({"frontier", "--eta", "3", "--grid", "7", "--format", "svg"});
    const auto sb = invoke({"frontier", "--eta", "3", "--grid", "7", "--format", "svg"});
    EXPECT_EQ(sa.out, sb.out);
}

TEST(Cli, FrontierEndpoints) {
    const auto r = invoke({"frontier", "--eta", "3", "--grid", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 6u);
    EXPECT_EQ(ls[0], "eta,alpha,beta,u_over_s,branch");
    EXPECT_NE(ls[1].find("0.19245"), std::string::npos) << ls[1];
    EXPECT_NE(ls[1].find("0.57735"), std::string::npos) << ls[1];
}

TEST(Cli, SvgIsWellFormed) {
    const auto r = invoke({"frontier", "--eta", "2", "--grid", "1", "--format", "svg"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("<?xml", 0), 0u);
    EXPECT_NE(r.out.find("<svg"), std::string::npos);
    EXPECT_NE(r.out.find("</svg>"), std::string::npos);
}

TEST(Cli, JsonLinesCertificates) {
    const auto r = invoke({"verify", "--eta", "2", "--format", "json"});
    EXPECT_EQ(r.code, 0) << r.err;
    for (const auto& l : lines(r.out)) {
        EXPECT_EQ(l.front(), '{');
        EXPECT_NE(l.find("\"claim_id\""), std::string::npos);
    }
}

TEST(Cli, ProcurementQuality) {
    const auto r = invoke({"procure", "--side", "quality", "--eta", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_GT(ls.size(), 1u);
    EXPECT_EQ(ls[0].rfind("theta,p,share", 0), 0u);
    EXPECT_NE(ls[1].find(",0.5,0.5,"), std::string::npos) << ls[1];
}

TEST(Cli, OracleTwoTypes) {
    const auto r = invoke({"oracle", "--eta", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("metric,value"), std::string::npos);
}

TEST(Cli, SweepWritesAllArtifacts) {
    TempDir dir;
    const auto r = invoke({"sweep", "--out", dir.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir.path() / "sweep.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "sweep_limits.csv"));
    const auto limits = slurp(dir.path() / "sweep_limits.csv");
    EXPECT_EQ(limits.rfind("quantity,limit_point,estimate,last_step,expected", 0), 0u);
}

TEST(Cli, ConfigDrivenGuarantee) {
    TempDir dir;
    const auto cfg = dir.write("c.json", R"({"version": 1, "command": "guarantee", "eta": [2, 3],
        "distributions": [{"kind": "uniform", "a": 0, "b": 1}, {"kind": "binary", "v_lo": 1, "v_hi": 2, "p_hi": 0.3}]})");
    const auto r = invoke({"guarantee", "--config", cfg});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 5u);
}

TEST(Cli, ConfigErrorsExitTwo) {
    TempDir dir;
    EXPECT_EQ(invoke({"guarantee", "--config", dir.write("a.json", R"({"version": 1, "bogus": 3})")}).code, 2);
    EXPECT_EQ(invoke({"guarantee", "--config", dir.write("b.json", R"({"distributions": []})")}).code, 2);
    EXPECT_EQ(invoke({"guarantee", "--config", dir.write("c.json", R"({"version": 1, "distributions": []})")}).code,
              2);
    EXPECT_EQ(invoke({"guarantee", "--config", dir.write("d.json", "{not json")}).code, 2);
    EXPECT_EQ(invoke({"frontier", "--config", dir.write("e.json", R"({"version": 1, "command": "sweep"})")}).code, 2);
    EXPECT_EQ(invoke({"guarantee", "--config",
                      dir.write("f.json", R"({"version": 1, "distributions": [{"kind": "pareto", "alpha": 2, "x": 1}]})")})
                  .code,
              2);
}

TEST(Cli, CommandLineErrorsExitTwo) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"nonsense"}).code, 2);
    EXPECT_EQ(invoke({"frontier", "--format", "xml"}).code, 2);
    EXPECT_EQ(invoke({"guarantee", "--config", "/nonexistent/file.json"}).code, 2);
    EXPECT_EQ(invoke({"guarantee", "--eta", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, InfiniteSurplusExitsThree) {
    TempDir dir;
    const auto cfg = dir.write("p.json", R"({"version": 1, "distributions": [{"kind": "pareto", "alpha": 2}]})");
    const auto r = invoke({"guarantee", "--eta", "2", "--config", cfg});
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, FailedCertificateExitsOne) {
    // A holder check at an absurd negative tolerance cannot pass.
    const auto r = invoke({"verify", "--eta", "2", "--tol", "-1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("first failure"), std::string::npos);
}
