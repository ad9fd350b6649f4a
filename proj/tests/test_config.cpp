#include "doctest.h"

#include <filesystem>

#include "glyphforge/bytes.hpp"
#include "glyphforge/config.hpp"
#include "glyphforge/error.hpp"

using namespace glyphforge;

TEST_CASE("defaults survive an empty config and a serialize round trip") {
    RunConfig def = parse_config("");
    CHECK(def.seed == 1);
    CHECK(def.arch == "net1");
    CHECK(def.batch_size == 64);

    RunConfig back = parse_config(serialize_config(def));
    CHECK(serialize_config(back) == serialize_config(def));
}

TEST_CASE("values, comments and blank lines parse") {
    RunConfig cfg = parse_config("# run setup\n"
                                 "\n"
                                 "seed = 99\n"
                                 "  learning_rate=0.125\n"
                                 "arch = net5\n"
                                 "homogeneity_pairs = 123456789012\n"
                                 "momentum=0\n");
    CHECK(cfg.seed == 99);
    CHECK(cfg.learning_rate == 0.125);
    CHECK(cfg.arch == "net5");
    CHECK(cfg.homogeneity_pairs == 123456789012LL);
    CHECK(cfg.momentum == 0.0);
}

TEST_CASE("per-network learning rate falls back to the shared one") {
    RunConfig cfg = parse_config("learning_rate = 0.1\nlearning_rate_net3 = 0.25\n");
    CHECK(cfg.net_lr(3) == 0.25);
    CHECK(cfg.net_lr(1) == 0.1);
    CHECK(cfg.net_lr(2) == 0.1);
    // shipped defaults: conv nets run cooler than the fc nets
    RunConfig def = parse_config("");
    CHECK(def.net_lr(1) == def.learning_rate);
    CHECK(def.net_lr(5) == 0.02);
    CHECK(def.net_lr(6) == 0.02);
    CHECK(def.net_lr(7) == 0.005);

    RunConfig rt = parse_config(serialize_config(cfg));
    CHECK(rt.net_lr(3) == 0.25);
    CHECK(rt.net_lr(4) == 0.1);
}

TEST_CASE("unknown, duplicate and malformed keys are rejected") {
    CHECK_THROWS_AS(parse_config("seeed = 4\n"), Error);
    CHECK_THROWS_AS(parse_config("seed = 4\nseed = 5\n"), Error);
    CHECK_THROWS_AS(parse_config("seed\n"), Error);
    CHECK_THROWS_AS(parse_config("= 4\n"), Error);
    CHECK_THROWS_AS(parse_config("seed = twelve\n"), Error);
    CHECK_THROWS_AS(parse_config("batch_size = 1.5\n"), Error);
    CHECK_THROWS_AS(parse_config("seed = 4 extra\n"), Error);
}

TEST_CASE("validation catches out-of-range settings") {
    CHECK_THROWS_AS(parse_config("batch_size = 0\n"), Error);
    CHECK_THROWS_AS(parse_config("momentum = 1\n"), Error);
    CHECK_THROWS_AS(parse_config("momentum = -0.1\n"), Error);
    CHECK_THROWS_AS(parse_config("learning_rate = -2\n"), Error);
    CHECK_THROWS_AS(parse_config("arch = net9\n"), Error);
    CHECK_THROWS_AS(parse_config("max_epochs = -3\n"), Error);
    // a raw descriptor is a valid arch value
    RunConfig cfg = parse_config("arch = towers=fc(4),relu;agg=fc(4),relu;out=fc(1),logistic\n");
    CHECK(cfg.arch.rfind("towers=", 0) == 0);
}

TEST_CASE("load_config reads from disk") {
    auto p = std::filesystem::temp_directory_path() / "gf_cfg.txt";
    write_text_file(p, "seed = 321\n");
    CHECK(load_config(p.string()).seed == 321);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(load_config(p.string()), Error);
}
