#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dira/config.hpp"

using namespace dira;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p) : path(p) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("defaults survive a save/load round trip") {
    ExperimentConfig cfg;
    cfg.subsystems = 7;
    cfg.learning_rate = 1.0 / 3.0;
    cfg.plant.coupling_scale = 0.125;
    cfg.epsilon_decay = 0.999950000000000017;
    cfg.plant_seed = 18446744073709551615ull;
    TempFile tmp("cfg_roundtrip.ini");
    save_config(cfg, tmp.path);
    const ExperimentConfig back = load_config(tmp.path);
    CHECK(back.subsystems == 7);
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.plant.coupling_scale == 0.125);
    CHECK(back.epsilon_decay == cfg.epsilon_decay);
    CHECK(back.plant_seed == cfg.plant_seed);
    CHECK(back.channels == cfg.channels);
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.parallel_kernels == cfg.parallel_kernels);

    TempFile tmp2("cfg_roundtrip2.ini");
    save_config(back, tmp2.path);
    CHECK(slurp(tmp.path) == slurp(tmp2.path));
}

TEST_CASE("parser reads sections, comments and whitespace") {
    std::istringstream in(
        "# experiment shape\n"
        "[system]\n"
        "subsystems = 8   # eight plants\n"
        "channels=6\n"
        "\n"
        "[dqn]\n"
        "  hidden_units   =  2048\n"
        "learning_rate = 1e-6\n"
        "parallel_kernels = false\n"
        "[seeds]\n"
        "plant = 42\n");
    const ExperimentConfig cfg = parse_config(in, "inline");
    CHECK(cfg.subsystems == 8);
    CHECK(cfg.channels == 6);
    CHECK(cfg.hidden_units == 2048);
    CHECK(cfg.learning_rate == 1e-6);
    CHECK(cfg.parallel_kernels == false);
    CHECK(cfg.plant_seed == 42);
    CHECK(cfg.gamma == 0.95);  // untouched default
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in, "inline");
    };
    CHECK_THROWS(parse("[system]\nsubsystem = 4\n"));
    CHECK_THROWS(parse("[systems]\nsubsystems = 4\n"));
    CHECK_THROWS(parse("subsystems = 4\n"));
    CHECK_THROWS(parse("[system]\nsubsystems 4\n"));
    CHECK_THROWS(parse("[system\nsubsystems = 4\n"));
    CHECK_THROWS(parse("[system]\nsubsystems = four\n"));
    CHECK_THROWS(parse("[dqn]\nparallel_kernels = maybe\n"));
    CHECK_THROWS(load_config("no_such_config_file.ini"));
}

TEST_CASE("zero placeholders resolve against the horizon and topology") {
    ExperimentConfig cfg;
    cfg.subsystems = 6;
    cfg.horizon = 250;
    cfg.k_refresh_period = 0;
    cfg.estimator_window = 0;
    cfg.reward_scale = 0.0;
    cfg.resolve_defaults();
    CHECK(cfg.k_refresh_period == 250);
    CHECK(cfg.estimator_window == 1000);
    CHECK(cfg.reward_scale == 6.0);
    CHECK(cfg.plant.num_subsystems == 6);

    // Explicit values are left alone.
    ExperimentConfig cfg2;
    cfg2.k_refresh_period = 17;
    cfg2.estimator_window = 99;
    cfg2.reward_scale = 2.5;
    cfg2.resolve_defaults();
    CHECK(cfg2.k_refresh_period == 17);
    CHECK(cfg2.estimator_window == 99);
    CHECK(cfg2.reward_scale == 2.5);
}

TEST_CASE("validation rejects out-of-range settings") {
    auto resolved = [] {
        ExperimentConfig cfg;
        cfg.resolve_defaults();
        return cfg;
    };
    CHECK_NOTHROW(resolved().validate());

    ExperimentConfig bad = resolved();
    bad.gamma = 1.5;
    CHECK_THROWS(bad.validate());
    bad = resolved();
    bad.tau = 0.0;
    CHECK_THROWS(bad.validate());
    bad = resolved();
    bad.epsilon_init = -0.1;
    CHECK_THROWS(bad.validate());
    bad = resolved();
    bad.k_refresh_period = static_cast<long>(bad.epochs) * bad.horizon + 1;
    CHECK_THROWS(bad.validate());
    bad = resolved();
    bad.reliable_success = 1.0;
    CHECK_THROWS(bad.validate());
    bad = resolved();
    bad.batch_size = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("scale presets carry the published hyper-parameter triples") {
    const ExperimentConfig small = small_preset();
    CHECK(small.subsystems == 8);
    CHECK(small.channels == 6);
    CHECK(small.hidden_units == 2048);
    CHECK(small.epsilon_decay == 0.99995);
    CHECK(small.replay_capacity == 75000);

    const ExperimentConfig medium = medium_preset();
    CHECK(medium.subsystems == 12);
    CHECK(medium.channels == 9);
    CHECK(medium.hidden_units == 4096);
    CHECK(medium.epsilon_decay == 0.99997);
    CHECK(medium.replay_capacity == 100000);

    const ExperimentConfig large = large_preset();
    CHECK(large.subsystems == 16);
    CHECK(large.channels == 12);
    CHECK(large.hidden_units == 6144);
    CHECK(large.epsilon_decay == 0.99999);
    CHECK(large.replay_capacity == 125000);

    for (const auto& cfg : {small, medium, large}) {
        CHECK(cfg.learning_rate == 1e-6);
        CHECK(cfg.gamma == 0.95);
        CHECK(cfg.batch_size == 40);
        CHECK(cfg.tau == 0.005);
        CHECK(cfg.epochs == 75);
        CHECK(cfg.horizon == 500);
        ExperimentConfig resolved = cfg;
        resolved.resolve_defaults();
        CHECK_NOTHROW(resolved.validate());
        CHECK(resolved.k_refresh_period == 500);
        CHECK(resolved.estimator_window == 2000);
    }

    const ExperimentConfig desk = desk_preset();
    CHECK(desk.subsystems == 4);
    CHECK(desk.channels == 3);
    CHECK(desk.epochs == 15);
    CHECK(desk.runs == 5);

    CHECK(preset_by_name("desk").subsystems == 4);
    CHECK(preset_by_name("small").subsystems == 8);
    CHECK(preset_by_name("medium").subsystems == 12);
    CHECK(preset_by_name("large").subsystems == 16);
    CHECK_THROWS(preset_by_name("huge"));
}
