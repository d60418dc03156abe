#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ampforge/devices.hpp"
#include "oracles.hpp"

using namespace ampforge;

namespace {

const char* kMinimal = "h_fe_typ=100\nh_fe_max=300\nh_ie=1100\nh_re=2e-4\nh_oe=25e-6\n";

std::string message_of(const std::string& text) {
    try {
        parse_params(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Params, ShippedFileMatchesDefaults) {
    const auto d = load_devices(oracle::data_path("2n2222.params"));
    EXPECT_EQ(d.bjt, BjtParams{});
    EXPECT_EQ(d.opamp, OpAmpModel{});
    EXPECT_EQ(load_params(oracle::data_path("2n2222.params")), BjtParams{});
}

TEST(Params, MinimalFileIsValid) {
    const auto d = parse_params(kMinimal);
    EXPECT_EQ(d.bjt.h_fe_typ, 100);
    EXPECT_EQ(d.bjt.h_fe_max, 300);
    EXPECT_EQ(d.bjt.h_ie, 1100);
    EXPECT_EQ(d.bjt.h_re, 2e-4);
    EXPECT_EQ(d.bjt.h_oe, 25e-6);
    EXPECT_EQ(d.bjt.h_fe_min, 100);  // defaults to typical
    EXPECT_EQ(d.bjt.v_be_on, 0.7);
}

TEST(Params, MissingKeyIsNamed) {
    EXPECT_EQ(message_of("h_fe_typ=100\nh_fe_max=300\nh_re=2e-4\nh_oe=25e-6\n"), "h_ie required");
}

TEST(Params, OrderingViolation) {
    EXPECT_NE(message_of(std::string(kMinimal) + "h_fe_min=400\n").find("h_fe_min"), std::string::npos);
    EXPECT_FALSE(message_of("h_fe_typ=400\nh_fe_max=300\nh_ie=1100\nh_re=2e-4\nh_oe=25e-6\n").empty());
}

TEST(Params, MalformedInput) {
    EXPECT_NE(message_of(std::string(kMinimal) + "bogus=1\n").find("bogus"), std::string::npos);
    EXPECT_NE(message_of(std::string(kMinimal) + "h_ie=1k\n").find("twice"), std::string::npos);
    EXPECT_NE(message_of(std::string(kMinimal) + "no equals\n").find("line 6"), std::string::npos);
    EXPECT_NE(message_of(std::string(kMinimal) + "v_be_on=abc\n").find("v_be_on"), std::string::npos);
    EXPECT_NE(message_of(std::string(kMinimal) + "open_loop_gain=1000\n").find("open_loop_gain"), std::string::npos);
    EXPECT_NE(message_of(std::string(kMinimal) + "h_oe=-1\n").find("twice"), std::string::npos);
}

TEST(Params, SuffixesAndComments) {
    const auto d = parse_params("# comment\nh_fe_typ = 100 # inline\nh_fe_max=300\nh_ie=1.1k\nh_re=200u\nh_oe=25u\n");
    EXPECT_EQ(d.bjt.h_ie, 1100);
    EXPECT_EQ(d.bjt.h_re, 2e-4);
    EXPECT_EQ(d.bjt.h_oe, 25e-6);
}

TEST(Params, CompositeMustStayBelowOne) {
    EXPECT_FALSE(message_of("h_fe_typ=100\nh_fe_max=300\nh_ie=1100\nh_re=0\nh_oe=1e-3\n").empty());
}

TEST(Params, TextRoundTrip) {
    DeviceSet d;
    d.bjt.name = "BC547";
    d.bjt.h_fe_typ = 290.5;
    d.bjt.h_fe_max = 800;
    d.bjt.h_ie = 4.7e3 / 3.0;
    d.opamp.open_loop_gain = 2e6;
    EXPECT_EQ(parse_params(to_param_text(d)).bjt, d.bjt);
    EXPECT_EQ(parse_params(to_param_text(d)).opamp, d.opamp);
}

TEST(Params, MissingFile) { EXPECT_THROW(load_devices("/nonexistent/x.params"), ConfigError); }

TEST(HComposite, Examples) {
    BjtParams p;
    EXPECT_NEAR(h_composite(p), 0.0075, 1e-15);
    p.h_re = 0;
    p.h_oe = 0;
    EXPECT_EQ(h_composite(p), 0.0);
    BjtParams q;
    q.h_ie = 1000;
    q.h_oe = 1e-5;
    q.h_fe_typ = 0;
    q.h_re = 123.0;
    EXPECT_NEAR(h_composite(q), 0.01, 1e-15);
}
