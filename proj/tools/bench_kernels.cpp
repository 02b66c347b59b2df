// Compares the OpenMP kernels against their serial references: panel scoring
// (parallel over time steps) and model training (parallel over clusters).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "sicams/detection.hpp"
#include "sicams/synthgen.hpp"
#include "sicams/training.hpp"

using namespace sicams;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t horizon = argc > 1 ? static_cast<std::size_t>(std::atol(argv[1])) : 20000;

    synth::Scenario sc;
    sc.rows = 8;
    sc.cols = 8;
    sc.daily_pattern = synth::default_daily_pattern();
    for (int r = 0; r < 8; r += 2)
        for (int c = 0; c < 8; c += 2)
            sc.sensor_nodes.push_back("n" + std::to_string(r) + "_" + std::to_string(c));
    auto gen = synth::generate(sc, 7, horizon);

    auto t0 = std::chrono::steady_clock::now();
    auto model = train::train(gen.panel, train::parse_scheme("hour-of-day"),
                              train::TrainingStrategy{});
    double t_train = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto serial = detect::score_serial(model, gen.panel, 12);
    double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = detect::score(model, gen.panel, 12);
    double t_parallel = seconds_since(t0);

    double max_diff = 0.0;
    for (std::size_t t = 0; t < serial.size(); ++t)
        max_diff = std::max(max_diff, std::fabs(serial.t2[t] - parallel.t2[t]));

    std::printf("steps=%zu sensors=%zu\n", gen.panel.steps(), gen.panel.dim());
    std::printf("train (parallel over clusters): %.3f s\n", t_train);
    std::printf("score serial:                   %.3f s\n", t_serial);
    std::printf("score parallel:                 %.3f s  (speedup %.2fx)\n", t_parallel,
                t_serial / t_parallel);
    std::printf("max |t2_serial - t2_parallel| = %.3e\n", max_diff);
    return max_diff == 0.0 ? 0 : 1;
}
