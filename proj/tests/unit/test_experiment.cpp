#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "sincmux/errors.hpp"
#include "sincmux/experiment.hpp"

using namespace sincmux;

namespace {

// small, fast variant of a preset for unit-level checks
ExperimentConfig shrink(ExperimentConfig cfg, std::uint64_t periods, int segments) {
    cfg.tx.periods_per_segment = periods;
    cfg.tx.segments = segments;
    return cfg;
}

} // namespace

TEST_CASE("presets exist and validate") {
    for (const auto& name : preset_names()) {
        const ExperimentConfig cfg = preset(name);
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.name == name);
    }
    CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
}

TEST_CASE("config serialization round-trips losslessly") {
    for (const auto& name : preset_names()) {
        const ExperimentConfig cfg = preset(name);
        const std::string once = serialize_experiment_config(cfg);
        const ExperimentConfig parsed = parse_experiment_config(once);
        const std::string twice = serialize_experiment_config(parsed);
        CHECK(once == twice);
    }
}

TEST_CASE("config files may carry comments") {
    const std::string text = R"({
        // three channels on an 8 GHz spacing
        "name": "commented",
        "seed": 7,
        "tx": {
            "n_channels": 3,
            "line_spacing_hz": 8e9,
            "payloads": [
                {"kind": "bpsk", "symbol_rate": 4e9, "prbs_seed": 90},
                {"kind": "ook", "symbol_rate": 4e9, "prbs_seed": 51},
                {"kind": "analog", "analog_frequency_hz": 2e9}
            ]
        }
    })";
    const ExperimentConfig cfg = parse_experiment_config(text);
    CHECK(cfg.name == "commented");
    CHECK(cfg.tx.payloads.size() == 3);
    CHECK(cfg.tx.payloads[2].kind == PayloadKind::Analog);
}

TEST_CASE("invalid configs are rejected with a diagnostic") {
    ExperimentConfig cfg = preset("theorem-check");
    cfg.tx.payloads.pop_back();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    ExperimentConfig cfg2 = preset("theorem-check");
    cfg2.tx.plan.n_channels = 4;
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);

    CHECK_THROWS_AS(parse_experiment_config("{\"tx\": {\"architecture\": \"bogus\"}}"),
                    ConfigError);
}

TEST_CASE("theorem-check: ideal chain reconstructs every channel") {
    ExperimentConfig cfg = shrink(preset("theorem-check"), 512, 1);
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.channels.size() == 3);
    for (const auto& ch : res.channels) {
        if (ch.kind == PayloadKind::Analog) {
            REQUIRE(ch.metrics.reconstruction_error.has_value());
            CHECK(*ch.metrics.reconstruction_error <= 1e-6);
        } else {
            REQUIRE(ch.metrics.ber_ratio.has_value());
            CHECK(*ch.metrics.ber_ratio == 0.0);
        }
    }
}

TEST_CASE("identical seeds give byte-identical reports") {
    const ExperimentConfig cfg = shrink(preset("bpsk-ook-5km"), 512, 2);
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    CHECK(a.report_json == b.report_json);
}

TEST_CASE("different seeds give different noise outcomes") {
    ExperimentConfig cfg = shrink(preset("bpsk-ook-5km"), 512, 1);
    cfg.channel.amp.noise_power = 0.3;  // strong enough to show
    ExperimentConfig cfg2 = cfg;
    cfg2.seed.value ^= 0xdeadbeef;
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg2);
    CHECK(a.report_json != b.report_json);
}

TEST_CASE("artifact files appear in the output directory") {
    const auto dir = std::filesystem::temp_directory_path() / "sincmux_run_artifacts";
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg = shrink(preset("mixed-analog-5km"), 512, 1);
    cfg.metrics.psd = true;
    cfg.output_dir = dir.string();
    run_experiment(cfg);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "config.json"));
    CHECK(std::filesystem::exists(dir / "tx_field.bin"));
    CHECK(std::filesystem::exists(dir / "ch0_demux.csv"));
    CHECK(std::filesystem::exists(dir / "ch0_eye.pgm"));
    CHECK(std::filesystem::exists(dir / "ch2_psd.csv"));
    // the stored config reproduces the run
    const ExperimentConfig echo = load_experiment_config(dir / "config.json");
    CHECK(echo.tx.plan.n_channels == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep over noise power is monotone and deterministic") {
    ExperimentConfig cfg = shrink(preset("bpsk-ook-5km"), 512, 2);
    cfg.channel.amp.noise_power = 0.0;
    SweepSpec sweep;
    sweep.variable = SweepVariable::NoisePower;
    sweep.values = {0.0, 2.0, 8.0};
    sweep.workers = 2;
    const SweepResult a = run_sweep(cfg, sweep);
    const SweepResult b = run_sweep(cfg, sweep);
    CHECK(a.table_csv == b.table_csv);
    REQUIRE(a.points.size() == 3);
    // zero-noise point is error free; errors grow with the noise power
    for (const auto& ch : a.points[0].channels)
        if (ch.metrics.ber_ratio) CHECK(*ch.metrics.ber_ratio == 0.0);
    const auto errors_at = [&](std::size_t p) {
        std::uint64_t total = 0;
        for (const auto& ch : a.points[p].channels) total += ch.metrics.bit_errors;
        return total;
    };
    CHECK(errors_at(0) <= errors_at(1));
    CHECK(errors_at(1) <= errors_at(2));
    CHECK(errors_at(2) > 0);
}

TEST_CASE("sweep rejects empty value lists") {
    SweepSpec sweep;
    sweep.values = {};
    CHECK_THROWS_AS(sweep.validate(), ConfigError);
}

TEST_CASE("clock phase error sweep degrades evm smoothly") {
    ExperimentConfig cfg = shrink(preset("theorem-check"), 512, 1);
    SweepSpec sweep;
    sweep.variable = SweepVariable::ClockPhaseError;
    sweep.values = {0.0, 0.1, 0.2};
    const SweepResult res = run_sweep(cfg, sweep);
    // channel 0 is digital bpsk in this preset
    std::vector<double> evm;
    for (const auto& p : res.points)
        for (const auto& ch : p.channels)
            if (ch.metrics.evm_percent) evm.push_back(*ch.metrics.evm_percent);
    REQUIRE(evm.size() == 3);
    CHECK(evm[0] < evm[1]);
    CHECK(evm[1] < evm[2]);
}

TEST_CASE("four-level channels behave near-identically") {
    ExperimentConfig cfg = shrink(preset("four-level-5km"), 1024, 4);
    const ExperimentResult res = run_experiment(cfg);
    std::vector<double> evm;
    for (const auto& ch : res.channels) {
        REQUIRE(ch.metrics.evm_percent.has_value());
        evm.push_back(*ch.metrics.evm_percent);
        REQUIRE(ch.metrics.ber_ratio.has_value());
        CHECK(*ch.metrics.ber_ratio == 0.0);
    }
    const double mean = (evm[0] + evm[1] + evm[2]) / 3.0;
    const double spread = *std::max_element(evm.begin(), evm.end()) -
                          *std::min_element(evm.begin(), evm.end());
    CHECK(spread / mean < 0.10);
}

TEST_CASE("sweep variable names round-trip") {
    for (SweepVariable v : {SweepVariable::VoaAttenuation, SweepVariable::FiberLength,
                            SweepVariable::NoisePower, SweepVariable::ClockPhaseError}) {
        CHECK(sweep_variable_from_name(sweep_variable_name(v)) == v);
    }
    CHECK_THROWS_AS(sweep_variable_from_name("frequency"), ConfigError);
}
