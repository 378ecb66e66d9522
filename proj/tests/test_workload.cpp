#include <gtest/gtest.h>

#include <mapforge/platform.hpp>
#include <mapforge/workload.hpp>

using namespace mapforge;

namespace {

bool mentions(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

std::string error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Workload, ConvLayerParses)
{
    auto m = parse_model(R"({"name":"r","layers":[
        {"name":"conv1","type":"conv","K":64,"C":3,"Y":112,"X":112,"R":7,"S":7,"stride":2}]})");
    ASSERT_EQ(m.layers.size(), 1u);
    const auto& l = m.layers[0];
    EXPECT_EQ(l.K, 64);
    EXPECT_EQ(l.C, 3);
    EXPECT_EQ(l.Y, 112);
    EXPECT_EQ(l.R, 7);
    EXPECT_EQ(l.stride, 2);
    EXPECT_EQ(l.input_rows(), 111 * 2 + 7);
}

TEST(Workload, GemmEntryLowersToConv)
{
    auto m = parse_model(R"({"name":"g","layers":[{"name":"fc","type":"gemm","M":8,"N":4,"K":16}]})");
    ASSERT_EQ(m.layers.size(), 1u);
    EXPECT_EQ(m.layers[0], (LayerShape{"fc", 8, 16, 4, 1, 1, 1, 1}));
    EXPECT_EQ(total_macs(m.layers[0]), 8 * 4 * 16);
}

TEST(Workload, ZeroDimensionRejected)
{
    auto msg = error_of([] {
        parse_model(R"({"name":"bad","layers":[{"name":"c","type":"conv","K":0,"C":1,"Y":1,"X":1,"R":1,"S":1,"stride":1}]})");
    });
    EXPECT_TRUE(mentions(msg, "'c'")) << msg;
    EXPECT_TRUE(mentions(msg, "K")) << msg;
}

TEST(Workload, ValidateLayer)
{
    EXPECT_TRUE(validate_layer({"u", 1, 1, 1, 1, 1, 1, 1}).empty());
    EXPECT_TRUE(validate_layer({"e", 8, 8, 8, 8, 8, 8, 8}).empty());
    EXPECT_FALSE(validate_layer({"s", 1, 1, 1, 1, 3, 1, 0}).empty());
}

TEST(Workload, GemmToConv)
{
    EXPECT_EQ(gemm_to_conv(2, 3, 4), (LayerShape{"gemm", 2, 4, 3, 1, 1, 1, 1}));
    EXPECT_EQ(gemm_to_conv(1, 1, 1), (LayerShape{"gemm", 1, 1, 1, 1, 1, 1, 1}));
    EXPECT_EQ(total_macs(gemm_to_conv(8, 8, 8)), 512);
}

TEST(Workload, MacsMatchLoopCount)
{
    LayerShape l{"t", 4, 2, 2, 2, 1, 1, 1};
    count_t n = 0;
    for (count_t k = 0; k < l.K; ++k)
        for (count_t c = 0; c < l.C; ++c)
            for (count_t y = 0; y < l.Y; ++y)
                for (count_t x = 0; x < l.X; ++x) ++n;
    EXPECT_EQ(total_macs(l), n);
    EXPECT_EQ(n, 32);
    EXPECT_EQ(total_macs({"u", 1, 1, 1, 1, 1, 1, 1}), 1);
}

TEST(Workload, ResnetFirstLayerMacs)
{
    // Brute-force count on a 4x4 output slice, scaled by the slice ratio.
    LayerShape full{"conv1", 64, 3, 112, 112, 7, 7, 2};
    LayerShape slice = full;
    slice.Y = slice.X = 4;
    count_t n = 0;
    for (count_t k = 0; k < slice.K; ++k)
        for (count_t c = 0; c < slice.C; ++c)
            for (count_t y = 0; y < slice.Y; ++y)
                for (count_t x = 0; x < slice.X; ++x)
                    for (count_t r = 0; r < slice.R; ++r)
                        for (count_t s = 0; s < slice.S; ++s) ++n;
    EXPECT_EQ(n * (112 / 4) * (112 / 4), 118'013'952);
    EXPECT_EQ(total_macs(full), 118'013'952);
}

TEST(Workload, ParseIsPureFunctionOfText)
{
    const std::string text = R"({"name":"g","layers":[{"name":"a","type":"gemm","M":3,"N":5,"K":7}]})";
    EXPECT_EQ(parse_model(text), parse_model(text));
}

TEST(Workload, SchemaErrors)
{
    EXPECT_TRUE(mentions(error_of([] { parse_model("{"); }), "parse"));
    EXPECT_TRUE(mentions(error_of([] { parse_model(R"({"name":"m","layers":[]})"); }), "layer"));
    EXPECT_TRUE(mentions(error_of([] {
        parse_model(R"({"name":"m","layers":[{"name":"a","type":"gemm","M":1,"N":1,"K":1,"bogus":1}]})");
    }), "bogus"));
    EXPECT_TRUE(mentions(error_of([] {
        parse_model(R"({"name":"m","layers":[{"name":"a","type":"gemm","M":1,"N":1,"K":1},
                                              {"name":"a","type":"gemm","M":1,"N":1,"K":1}]})");
    }), "'a'"));
    EXPECT_FALSE(error_of([] {
        parse_model(R"({"name":"m","layers":[{"name":"a","type":"pool","K":1}]})");
    }).empty());
}

TEST(Workload, BundledModelsLoad)
{
    for (const char* f : {"w1_conv.json", "w2_gemm.json", "w3_mixed.json"}) {
        auto m = load_model(std::string(MAPFORGE_SOURCE_DIR) + "/models/" + f);
        EXPECT_EQ(m.layers.size(), 3u) << f;
    }
    EXPECT_THROW(load_model("/nonexistent/model.json"), InputError);
}

TEST(Platform, BuiltinProfiles)
{
    auto edge = load_platform("edge");
    EXPECT_DOUBLE_EQ(edge.area_budget, 0.2);
    EXPECT_EQ(edge.max_pes, 4096);
    auto cloud = load_platform("cloud");
    EXPECT_DOUBLE_EQ(cloud.area_budget, 7.0);
    EXPECT_EQ(cloud.max_pes, 65536);
}

TEST(Platform, TomlFilesMatchBuiltins)
{
    const std::string dir = std::string(MAPFORGE_SOURCE_DIR) + "/platforms/";
    EXPECT_EQ(load_platform(dir + "edge.toml"), edge_platform());
    EXPECT_EQ(load_platform(dir + "cloud.toml"), cloud_platform());
}

TEST(Platform, TomlParsing)
{
    auto p = parse_platform("# c\narea_budget = 1.5\nmax_pes = 64 # trailing\nmax_pi = 4\n");
    EXPECT_DOUBLE_EQ(p.area_budget, 1.5);
    EXPECT_EQ(p.max_pes, 64);
    EXPECT_EQ(p.allowed_pi(), (std::vector<count_t>{1, 2, 4}));
    EXPECT_EQ(p.a_pe, Platform{}.a_pe);

    EXPECT_TRUE(mentions(error_of([] { parse_platform("speed = 3\n"); }), "speed"));
    EXPECT_TRUE(mentions(error_of([] { parse_platform("max_pes = 1.5\n"); }), "max_pes"));
    EXPECT_TRUE(mentions(error_of([] { parse_platform("area_budget = -1\n"); }), "area_budget"));
    EXPECT_TRUE(mentions(error_of([] { parse_platform("area_budget\n"); }), "="));
}

TEST(Platform, AllowedPiArePowersOfTwo)
{
    auto p = edge_platform();
    auto v = p.allowed_pi();
    ASSERT_EQ(v.front(), 1);
    ASSERT_EQ(v.back(), 4096);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_EQ(v[i], 2 * v[i - 1]);
}
