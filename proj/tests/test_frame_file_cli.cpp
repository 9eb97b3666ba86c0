#include <gtest/gtest.h>

#include <cstar_frames/cli.hpp>

#include <filesystem>
#include <sstream>

using namespace cstar_frames;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("cstar_frames_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        io::write_text(path(name), text);
        return path(name);
    }

    fs::path dir_;
};

json json_without_timing(const std::string& text) {
    json j = json::parse(text);
    j.erase("timing");
    return j;
}

// "key=value" lines of the text report.
std::string field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    return "<missing " + key + ">";
}

const std::string kOnb2 = R"({
 "schema": "cstar-frames/frame",
 "version": 1,
 "algebra": {"d": 1},
 "module": {"n": 2},
 "vectors": [
  [[[[1, 0]]], [[[0, 0]]]],
  [[[[0, 0]]], [[[1, 0]]]]
 ]
})";

} // namespace

TEST(FrameFile, RoundTripIsBitExact) {
    Rng rng(5);
    std::vector<std::pair<FrameSystem, std::optional<CompactTightCert>>> cases;
    const auto g = scaled_basis_frame(ScalarProfile::gaussian(1.0, 1.0), ModuleShape(1, 8), 8);
    cases.emplace_back(g.frame, g.cert);
    const auto geo = scaled_basis_frame(ScalarProfile::geometric(0.7, 3.0, 0.3), ModuleShape(2, 3), 3);
    cases.emplace_back(geo.frame, geo.cert);
    const auto rep = repetition_frame(ModuleShape(2, 5), {{0, 3}, {3, 2}});
    cases.emplace_back(rep.frame, rep.cert);
    const auto sc = unweavable_scenario(4, ScalarProfile::gaussian(0.0, 1.0), ScalarProfile::power(0.0, 1.0, 2.0));
    cases.emplace_back(sc.f, sc.cert_f);
    cases.emplace_back(sc.g, sc.cert_g);
    std::vector<ModuleVector> rv;
    for (int k = 0; k < 4; ++k) rv.push_back(ModuleVector::random(ModuleShape(3, 2), rng).scaled(1.0 / 3.0));
    cases.emplace_back(FrameSystem(rv), std::nullopt);

    for (const auto& [frame, cert] : cases) {
        const std::string text = io::serialize_frame(frame, cert);
        const io::FrameFile back = io::parse_frame(text);
        ASSERT_EQ(back.frame.size(), frame.size());
        for (std::size_t k = 0; k < frame.size(); ++k) EXPECT_EQ(back.frame[k].rep(), frame[k].rep());
        EXPECT_EQ(io::serialize_frame(back.frame, back.cert), text);
        ASSERT_EQ(back.cert.has_value(), cert.has_value());
        if (cert) {
            EXPECT_EQ(back.cert->xi, cert->xi);
            EXPECT_EQ(back.cert->permutation, cert->permutation);
            EXPECT_EQ(back.cert->profile, cert->profile);
            EXPECT_LE(frobenius_distance(back.cert->k.mat(), cert->k.mat()), 1e-15);
        }
        const auto a = optimal_bounds(frame), b = optimal_bounds(back.frame);
        EXPECT_EQ(cli::fmt_double(a.lower), cli::fmt_double(b.lower));
        EXPECT_EQ(cli::fmt_double(a.upper), cli::fmt_double(b.upper));
    }
}

TEST(FrameFile, ParseErrorsCarryPosition) {
    try {
        io::parse_frame("{\n \"algebra\": {\"d\": 1},\n \"module\": {\"n\": 1\n \"vectors\": []}");
        FAIL();
    } catch (const io::ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_GT(e.column(), 0u);
    }

    std::string bad = kOnb2;
    bad.replace(bad.find("[[[[0, 0]]], [[[1, 0]]]]"), 24, "[[[[0, 0]]], [[[\"x\", 0]]]]");
    try {
        io::parse_frame(bad);
        FAIL();
    } catch (const io::ParseError& e) {
        EXPECT_EQ(e.line(), 8u);
        EXPECT_EQ(e.column(), 19u);
        EXPECT_NE(std::string(e.what()).find("/vectors/1/1/0/0/0"), std::string::npos) << e.what();
    }

    std::string pair3 = kOnb2;
    pair3.replace(pair3.find("[[[[1, 0]]]"), 11, "[[[[1, 0, 0]]]");
    EXPECT_THROW(io::parse_frame(pair3), io::ParseError);
    EXPECT_THROW(io::parse_frame("[]"), io::ParseError);
    EXPECT_THROW(io::parse_frame(R"({"algebra":{"d":0},"module":{"n":1},"vectors":[]})"), io::ParseError);
    EXPECT_THROW(io::parse_frame(R"({"algebra":{"d":1},"module":{"n":1},"vectors":[[[[[1e999,0]]]]]})"),
                 io::ParseError);
}

TEST(FrameFile, DimensionErrors) {
    EXPECT_THROW(io::parse_frame(R"({"algebra":{"d":1},"module":{"n":3},"vectors":[[[[[1,0]]],[[[0,0]]]]]})"),
                 io::DimensionError);
    EXPECT_THROW(io::parse_frame(R"({"algebra":{"d":2},"module":{"n":1},"vectors":[[[[[1,0]]]]]})"),
                 io::DimensionError);
}

TEST(FrameFile, CertificateIsValidated) {
    const auto g = scaled_basis_frame(ScalarProfile::gaussian(1.0, 1.0), ModuleShape(1, 4), 4);
    json j = io::frame_to_json(g.frame, g.cert);
    j["certificate"]["profile"]["c"] = 2.0;
    EXPECT_THROW(io::parse_frame(j.dump()), io::ParseError);

    // Moving ξ alone is still a valid identity S = K + ξI; K just stops being compact.
    json shifted = io::frame_to_json(g.frame, g.cert);
    shifted["certificate"]["xi"] = 1.5;
    const auto back = io::parse_frame(shifted.dump());
    EXPECT_NEAR(back.cert->k_limit(), -0.5, 1e-15);

    json k = io::frame_to_json(g.frame, g.cert);
    k["certificate"]["profile"]["kind"] = "cubic";
    EXPECT_THROW(io::parse_frame(k.dump()), io::ParseError);
}

TEST(FrameFile, PartitionRoundTrip) {
    const Partition p{{1, 0, 1, 0}};
    EXPECT_EQ(io::parse_partition(io::serialize_partition(p, {0, 2})), p);
    EXPECT_THROW(io::parse_partition(R"({"assignment":[0,-1]})"), io::ParseError);
}

TEST_F(CliTest, AnalyzeOrthonormalBasis) {
    const auto r = run({"analyze", write("onb.json", kOnb2)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(field(r.out, "bounds.lower"), "1");
    EXPECT_EQ(field(r.out, "bounds.upper"), "1");
    EXPECT_EQ(field(r.out, "bounds.tight"), "true");
}

TEST_F(CliTest, ConstructScaledBasisAndAnalyze) {
    const std::string f = path("g8.json");
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "gaussian", "--xi", "1", "--c", "1", "--n", "8", "--out", f})
                  .code,
              0);
    const auto r = run({"analyze", f, "--xi", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["bounds"]["lower"].get<double>(), 1.0 + std::exp(-32.0), 1e-12);
    EXPECT_NEAR(j["bounds"]["upper"].get<double>(), 1.0 + std::exp(-0.5), 1e-12);
    EXPECT_NEAR(j["besselBound"].get<double>(), 1.0 + std::exp(-0.5), 1e-12);
    for (const char* part : {"part1", "part2", "part3"}) EXPECT_TRUE(j["decomposition"][part]["holds"].get<bool>());
    EXPECT_TRUE(j["certificate"]["compact"].get<bool>());
    EXPECT_DOUBLE_EQ(j["certificate"]["asymptoticLower"].get<double>(), 1.0);

    // the short alias builds the same file
    const std::string f2 = path("g8b.json");
    ASSERT_EQ(run({"construct", "t4", "--kind", "gaussian", "--xi", "1", "--c", "1", "--n", "8", "--out", f2}).code, 0);
    EXPECT_EQ(io::read_text(f), io::read_text(f2));
}

TEST_F(CliTest, AnalyzeOutputIsReproducible) {
    const std::string f = path("rep.json");
    ASSERT_EQ(run({"construct", "repetition", "--n", "4", "--d", "2", "--repeat", "2:3", "--out", f}).code, 0);
    const std::vector<std::string> args{"analyze", f, "--xi", "0.5", "--eta", "1", "--alpha", "1", "--format", "json"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(json_without_timing(a.out).dump(), json_without_timing(b.out).dump());
    EXPECT_TRUE(json::parse(a.out)["decomposition"].contains("deviation"));
}

TEST_F(CliTest, RepetitionBounds) {
    const std::string f = path("rep3.json");
    ASSERT_EQ(run({"construct", "repetition", "--n", "3", "--repeat", "1:3", "--out", f}).code, 0);
    const auto r = run({"analyze", f});
    EXPECT_EQ(field(r.out, "bounds.lower"), "1");
    EXPECT_EQ(field(r.out, "bounds.upper"), "3");
    EXPECT_EQ(field(r.out, "certificate.kRank"), "1");
}

TEST_F(CliTest, ExitCodes) {
    // parse error with position
    const auto p = run({"analyze", write("bad.json", "{\n \"algebra\": [}\n")});
    EXPECT_EQ(p.code, 2);
    EXPECT_NE(p.err.find("line 2"), std::string::npos) << p.err;
    EXPECT_EQ(run({"analyze", path("missing.json")}).code, 2);

    // dimension mismatch
    const auto d = run({"analyze", write(
                                       "dim.json",
                                       R"({"algebra":{"d":1},"module":{"n":3},"vectors":[[[[[1,0]]],[[[0,0]]]]]})")});
    EXPECT_EQ(d.code, 3);

    // flags
    EXPECT_EQ(run({"analyze"}).code, 4);
    EXPECT_EQ(run({"analyze", path("x.json"), "--bogus"}).code, 4);
    EXPECT_EQ(run({"analyze", write("onb.json", kOnb2), "--format", "xml"}).code, 4);
    EXPECT_EQ(run({"construct", "scaled-basis", "--kind", "cubic", "--n", "3", "--out", path("o.json")}).code, 4);
    EXPECT_EQ(run({"construct", "scaled-basis", "--kind", "gaussian", "--xi", "0", "--n", "3", "--out", path("o.json")})
                  .code,
              4);
    EXPECT_EQ(run({"construct", "repetition", "--n", "3", "--repeat", "4:2", "--out", path("o.json")}).code, 4);
    EXPECT_EQ(run({"construct", "repetition", "--n", "3", "--repeat", "x:2", "--out", path("o.json")}).code, 4);
    EXPECT_EQ(run({"construct", "unweavable", "--n", "3", "--profile1", "gaussian:1", "--profile2", "gaussian:1",
                   "--out", path("u")})
                  .code,
              4);

    // cap
    const std::string onb3 = path("onb3.json"), big3 = path("big3.json");
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "constant", "--xi", "1", "--n", "3", "--out", onb3}).code, 0);
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "constant", "--xi", "2", "--n", "3", "--out", big3}).code, 0);
    EXPECT_EQ(run({"weave", onb3, big3, "--max-partitions", "4"}).code, 5);

    // not a frame
    const std::string trunc = path("trunc.json");
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "gaussian", "--xi", "1", "--c", "1", "--n", "4", "--count",
                   "2", "--out", trunc})
                  .code,
              0);
    EXPECT_EQ(run({"dual", trunc, "--out", path("d.json")}).code, 6);

    // shape mismatch between files
    EXPECT_EQ(run({"perturb", onb3, write("onb.json", kOnb2)}).code, 3);
}

TEST_F(CliTest, WeaveOrthonormalVersusScaled) {
    const std::string onb3 = path("onb3.json"), big3 = path("big3.json");
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "constant", "--xi", "1", "--n", "3", "--out", onb3}).code, 0);
    ASSERT_EQ(run({"construct", "scaled-basis", "--kind", "constant", "--xi", "2", "--n", "3", "--out", big3}).code, 0);
    const auto r = run({"weave", onb3, big3, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["universalLower"].get<double>(), 1.0, 1e-10);
    EXPECT_NEAR(j["universalUpper"].get<double>(), 2.0, 1e-10);
    EXPECT_EQ(j["partitionsChecked"].get<int>(), 8);
    EXPECT_TRUE(j["isWoven"].get<bool>());

    const auto same = run({"weave", onb3, onb3});
    EXPECT_EQ(field(same.out, "universalLower"), "1");
    EXPECT_EQ(field(same.out, "universalUpper"), "1");
}

TEST_F(CliTest, UnweavableScenarioFilesAndSweep) {
    const std::string base = path("u8");
    const auto c = run({"construct", "t49", "--n", "8", "--profile1", "gaussian:1", "--profile2", "gaussian:1", "--out",
                        base});
    ASSERT_EQ(c.code, 0) << c.err;
    for (const char* suffix : {"_F.json", "_G.json", "_partition.json"}) EXPECT_TRUE(fs::exists(base + suffix));

    const auto f = run({"analyze", base + "_F.json", "--format", "json"});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_GE(json::parse(f.out)["bounds"]["lower"].get<double>(), 1.0 - 1e-9);

    // 2^16 partitions; sweep reports the adversarial decay.
    const auto w = run({"weave", base + "_F.json", base + "_G.json", "--partition", base + "_partition.json", "--sweep",
                        "4,8,12", "--tol", "1e-6", "--format", "json"});
    ASSERT_EQ(w.code, 0) << w.err;
    const json j = json::parse(w.out);
    EXPECT_EQ(j["partitionsChecked"].get<int>(), 1 << 16);
    EXPECT_LE(j["universalLower"].get<double>(), j["partition"]["lower"].get<double>());
    EXPECT_NEAR(j["partition"]["lower"].get<double>(), 2.0 * std::exp(-32.0), 1e-20);
    ASSERT_EQ(j["decay"].size(), 3u);
    double prev = 1e300;
    for (const auto& row : j["decay"]) {
        const double lm = row["lambdaMin"].get<double>();
        EXPECT_LT(lm, prev);
        EXPECT_LE(lm, row["envelope"].get<double>());
        EXPECT_LE(row["identityResidual"].get<double>(), 1e-12);
        prev = lm;
    }
    EXPECT_FALSE(j["decay"][2]["woven"].get<bool>());
}

TEST_F(CliTest, Perturb) {
    const std::string onb = write("onb.json", kOnb2);
    const auto same = run({"perturb", onb, onb, "--format", "json"});
    ASSERT_EQ(same.code, 0) << same.err;
    const json s = json::parse(same.out);
    EXPECT_EQ(s["mu"].get<double>(), 0.0);
    EXPECT_EQ(s["prediction"]["status"], "Applicable");
    EXPECT_DOUBLE_EQ(s["prediction"]["low"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(s["prediction"]["high"].get<double>(), 1.0);

    const auto e = standard_basis(ModuleShape(1, 2));
    const std::string g = write("g.json", io::serialize_frame(FrameSystem({e[0].scaled(1.1), e[1]})));
    const json p = json::parse(run({"perturb", onb, g, "--format", "json"}).out);
    EXPECT_NEAR(p["mu"].get<double>(), 0.1, 1e-12);
    EXPECT_TRUE(p["prediction"]["sandwich"].get<bool>());

    const std::string far = write("far.json", io::serialize_frame(FrameSystem({e[0].scaled(2.5), e[1]})));
    const auto na = run({"perturb", onb, far});
    EXPECT_EQ(na.code, 0);
    EXPECT_EQ(field(na.out, "prediction.status"), "NotApplicable");
}

TEST_F(CliTest, Dual) {
    const std::string onb = write("onb.json", kOnb2);
    ASSERT_EQ(run({"dual", onb, "--out", path("onb_dual.json")}).code, 0);
    const auto od = io::load_frame(path("onb_dual.json"));
    const auto orig = io::load_frame(onb);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(od.frame[k].rep(), orig.frame[k].rep());

    const auto e = standard_basis(ModuleShape(1, 2));
    const std::string f = write("f.json", io::serialize_frame(FrameSystem({e[0].scaled(std::sqrt(2.0)), e[1]})));
    ASSERT_EQ(run({"dual", f, "--out", path("f_dual.json")}).code, 0);
    const auto fd = io::load_frame(path("f_dual.json"));
    EXPECT_NEAR(fd.frame[0].rep()(0, 0).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(fd.frame[1].rep()(0, 1).real(), 1.0, 1e-15);

    const std::string g = path("g8.json");
    ASSERT_EQ(run({"construct", "t4", "--kind", "gaussian", "--xi", "1", "--c", "1", "--n", "8", "--out", g}).code, 0);
    ASSERT_EQ(run({"dual", g, "--out", path("g8_dual.json")}).code, 0);
    const auto gd = io::load_frame(path("g8_dual.json"));
    ASSERT_TRUE(gd.cert.has_value());
    EXPECT_DOUBLE_EQ(gd.cert->xi, 1.0);
    ASSERT_TRUE(gd.cert->profile.has_value());
    EXPECT_TRUE(gd.cert->profile->reciprocal);
    const auto before = optimal_bounds(io::load_frame(g).frame), after = optimal_bounds(gd.frame);
    EXPECT_NEAR(after.lower, 1.0 / before.upper, 1e-9);
    EXPECT_NEAR(after.upper, 1.0 / before.lower, 1e-9);
}

TEST_F(CliTest, HelpExitsCleanly) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("analyze"), std::string::npos);
}
