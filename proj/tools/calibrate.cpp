// Fits the preset time scale so that the active-active preset averages the
// target response time over a fixed set of replications.
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hacsim/report.hpp"
#include "hacsim/scenario.hpp"
#include "hacsim/simulation.hpp"

namespace {

double mean_response(double scale, unsigned replications) {
    hacsim::ScenarioSpec spec = hacsim::preset(hacsim::Preset::ActiveActive);
    spec.workload = hacsim::preset_workload(scale);
    double sum = 0.0;
    for (unsigned i = 0; i < replications; ++i) {
        spec.seed = hacsim::preset(hacsim::Preset::ActiveActive).seed + i;
        sum += hacsim::build_report(hacsim::run_scenario(spec)).response_all->mean;
    }
    return sum / replications;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit the preset workload time scale"};
    double target = 5.0;
    unsigned replications = 5;
    double lo = 1.0;
    double hi = 6.0;
    unsigned iterations = 40;
    app.add_option("--target", target, "Target mean response of active-active (s)");
    app.add_option("--replications", replications, "Replications per evaluation")->check(CLI::PositiveNumber);
    app.add_option("--lo", lo, "Lower bracket for the scale");
    app.add_option("--hi", hi, "Upper bracket for the scale");
    app.add_option("--iterations", iterations, "Bisection steps");
    CLI11_PARSE(app, argc, argv);

    fmt::print("shipped scale {} -> mean response {:.4f} s\n", hacsim::preset_time_scale(),
               mean_response(hacsim::preset_time_scale(), replications));
    double f_lo = mean_response(lo, replications) - target;
    const double f_hi = mean_response(hi, replications) - target;
    if (f_lo * f_hi > 0.0) {
        std::cerr << "target not bracketed by [lo, hi]\n";
        return 1;
    }
    for (unsigned k = 0; k < iterations && hi - lo > 1e-4; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = mean_response(mid, replications) - target;
        fmt::print("scale {:.5f} -> {:.4f} s\n", mid, f_mid + target);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double scale = 0.5 * (lo + hi);
    fmt::print("fitted scale {:.4f} -> mean response {:.4f} s\n", scale, mean_response(scale, replications));
    return 0;
}
