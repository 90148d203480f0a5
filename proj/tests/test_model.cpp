#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "rfreg/model.hpp"
#include "test_support.hpp"

using namespace rfreg;

TEST_CASE("width scaling ratios bracket the quadratic reduction") {
    ArchSpec s128, s64, s32;
    s64.base_channels = 64;
    s32.base_channels = 32;
    long p128 = summarize(build(s128)).total_params;
    long p64 = summarize(build(s64)).total_params;
    long p32 = summarize(build(s32)).total_params;
    double r64 = static_cast<double>(p64) / p128;
    double r32 = static_cast<double>(p32) / p128;
    CHECK(r64 >= 0.24);
    CHECK(r64 <= 0.28);
    CHECK(r32 >= 0.055);
    CHECK(r32 <= 0.075);
}

TEST_CASE("network rf agrees with the geometry prediction") {
    ArchSpec spec;
    spec.base_channels = 8;
    spec.rho = 5;
    Network net = build(spec);
    auto s = summarize(net);
    auto r = max_rf(net.geometry());
    CHECK(s.rf.rf_t == r.rf_t);
    CHECK(s.rf.rf_f == r.rf_f);
}

TEST_CASE("invalid specs list every violation") {
    ArchSpec bad;
    bad.base_channels = 0;
    bad.rho = 99;
    bad.num_classes = 0;
    try {
        build(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("base_channels") != std::string::npos);
        CHECK(msg.find("rho") != std::string::npos);
        CHECK(msg.find("num_classes") != std::string::npos);
    }
}

TEST_CASE("freshly built and initialized network counts every weight as nonzero") {
    ArchSpec spec;
    spec.base_channels = 16;
    Network net = build(spec);
    init_weights(net, 3);
    auto s = summarize(net);
    CHECK(s.nonzero_params == s.total_params);
}

TEST_CASE("decomposed Z=4 model has strictly fewer parameters than Z=1") {
    ArchSpec z4, z1;
    z4.base_channels = z1.base_channels = 64;
    z4.decomp.enabled = z1.decomp.enabled = true;
    z4.decomp.Z = 4;
    z1.decomp.Z = 1;
    long p4 = summarize(build(z4)).total_params;
    long p1 = summarize(build(z1)).total_params;
    CHECK(p4 < p1);
}

TEST_CASE("rf is invariant across the four complexity variants") {
    ArchSpec plain;
    plain.base_channels = 16;
    plain.rho = 6;
    ArchSpec damped = plain;
    damped.damping.enabled = true;
    ArchSpec dec = plain;
    dec.decomp.enabled = true;
    dec.decomp.Z = 4;
    ArchSpec narrow = plain;
    narrow.base_channels = 8;

    auto r0 = summarize(build(plain)).rf;
    for (const ArchSpec& v : {damped, dec, narrow}) {
        auto r = summarize(build(v)).rf;
        CHECK(r.rf_t == r0.rf_t);
        CHECK(r.rf_f == r0.rf_f);
    }
}

TEST_CASE("init_weights is seed-deterministic and seed-sensitive") {
    ArchSpec spec;
    spec.base_channels = 8;
    Network a = build(spec), b = build(spec), c = build(spec);
    init_weights(a, 11);
    init_weights(b, 11);
    init_weights(c, 12);
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.params.size(); ++i)
        for (std::size_t j = 0; j < a.params[i].tensor->numel(); ++j) {
            if (a.params[i].tensor->at(j) != b.params[i].tensor->at(j)) same = false;
            if (a.params[i].tensor->at(j) != c.params[i].tensor->at(j)) diff = true;
        }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("per-layer init scale is near the fan-in target") {
    ArchSpec spec;
    Network net = build(spec);  // base 128
    init_weights(net, 5);
    for (const auto& p : net.params) {
        if (!p.name.ends_with(".weight") || p.tensor->ndim() != 4) continue;
        if (p.tensor->numel() < 10000) continue;
        int fan_in = p.tensor->dim(1) * p.tensor->dim(2) * p.tensor->dim(3);
        double target = std::sqrt(2.0 / fan_in);
        double ss = 0.0;
        for (std::size_t i = 0; i < p.tensor->numel(); ++i)
            ss += static_cast<double>(p.tensor->at(i)) * p.tensor->at(i);
        double stddev = std::sqrt(ss / p.tensor->numel());
        CHECK(stddev >= 0.8 * target);
        CHECK(stddev <= 1.2 * target);
    }
}

TEST_CASE("forward pass yields finite [batch, classes] logits on 2-channel input") {
    ArchSpec spec;
    spec.base_channels = 8;
    spec.num_classes = 10;
    Network net = build(spec);
    init_weights(net, 7);
    std::mt19937_64 rng(8);
    auto x = make_tensor({2, 2, 64, 64});
    testsup::fill_normal(*x, rng);
    auto logits = net.forward(nullptr, x, false);
    CHECK(logits->shape() == std::vector<int>{2, 10});
    CHECK(logits->all_finite());
}

TEST_CASE("same-seed forward passes are bitwise identical") {
    ArchSpec spec;
    spec.base_channels = 8;
    auto once = [&]() {
        Network net = build(spec);
        init_weights(net, 21);
        auto x = make_tensor({1, 2, 48, 48});
        std::mt19937_64 rng(22);
        testsup::fill_normal(*x, rng);
        return net.forward(nullptr, x, false);
    };
    auto a = once();
    auto b = once();
    for (std::size_t i = 0; i < a->numel(); ++i) CHECK(a->at(i) == b->at(i));
}

TEST_CASE("stage split is front-loaded") {
    ArchSpec s;
    s.num_blocks = 7;
    CHECK(s.stage_blocks() == std::vector<int>{4, 2, 1});
    s.num_blocks = 1;
    CHECK(s.stage_blocks() == std::vector<int>{1, 0, 0});
    s.num_blocks = 4;
    CHECK(s.stage_blocks() == std::vector<int>{2, 1, 1});
}
