// Copyright 2026 The StrokeForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// strokeforge command line: restore, overlay, profile, bench, serve.
// Exit codes: 0 success, 2 input error, 3 numeric failure.

#include <strokeforge/band_profile.hpp>
#include <strokeforge/error.hpp>
#include <strokeforge/image.hpp>
#include <strokeforge/restore.hpp>
#include <strokeforge/service.hpp>
#include <strokeforge/synth.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace sf = strokeforge;
namespace fs = std::filesystem;

namespace {

void writeText(const std::string& path, const std::string& text) {
    sf::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string readText(const std::string& path) {
    const sf::Bytes b = sf::read_file(path);
    return std::string(b.begin(), b.end());
}

std::pair<double, double> parseStretch(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        sf::throwInput("--stretch expects lo,hi");
    }
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        sf::throwInput("--stretch expects two numbers, got \"" + s + "\"");
    }
}

struct RestoreArgs {
    std::string image;
    bool invert = false;
    std::string stretch = "1,99";
    bool noStretch = false;
    std::string points;
    sf::RestoreOptions options;
    std::string outSpline;
    std::string outMask;
    std::string outTrace;
};

void addRestore(CLI::App& app, RestoreArgs& a) {
    auto* cmd = app.add_subcommand("restore", "Restore one stroke from sample points");
    auto& e = a.options.energy;
    auto& d = a.options.descent;
    cmd->add_option("--image", a.image, "Grayscale PNG or binary PGM, ink dark")->required();
    cmd->add_flag("--invert", a.invert, "Input has light ink on dark ground");
    cmd->add_option("--stretch", a.stretch, "Histogram stretch percentiles lo,hi")->capture_default_str();
    cmd->add_flag("--no-stretch", a.noStretch, "Skip histogram stretching");
    cmd->add_option("--points", a.points, "Points JSON file")->required();
    cmd->add_option("--c1", e.c1, "Image coverage weight")->capture_default_str();
    cmd->add_option("--c2", e.c2, "Radius growth weight")->capture_default_str();
    cmd->add_option("--c3", e.c3, "Bending weight")->capture_default_str();
    cmd->add_option("--alpha", e.alpha, "Radius growth exponent")->capture_default_str();
    cmd->add_option("--eps", e.epsilon, "Bending exemption half-width around samples")->capture_default_str();
    cmd->add_option("--rmin", d.rMin, "Minimum radius, px")->capture_default_str();
    cmd->add_option("--rmax", d.rMax, "Maximum radius, px")->capture_default_str();
    cmd->add_option("--iters", d.maxIterations, "Descent iterations")->capture_default_str();
    cmd->add_option("--step", d.initialStep, "Initial step for position directions")->capture_default_str();
    cmd->add_option("--radius-step", d.initialRadiusStep, "Initial step for radius directions")
        ->capture_default_str();
    cmd->add_option("--decay", d.decay, "Step decay T on derivative sign change")->capture_default_str();
    cmd->add_option("--fd-h", d.fdStep, "Finite-difference step, px")->capture_default_str();
    cmd->add_option("--early-stop", d.earlyStopRel, "Relative energy drop that stops early; 0 disables")
        ->capture_default_str();
    cmd->add_option("--quad-samples", e.quadSamples, "Quadrature points per node interval")->capture_default_str();
    cmd->add_option("--threads", d.threads, "Derivative workers; 0 uses all cores")->capture_default_str();
    cmd->add_option("--out-spline", a.outSpline, "Write the final spline JSON here");
    cmd->add_option("--out-mask", a.outMask, "Write the stroke mask PNG here");
    cmd->add_option("--out-trace", a.outTrace, "Write the energy trace CSV here");
}

int runRestore(RestoreArgs& a) {
    a.options.energy.rMin = a.options.descent.rMin;
    a.options.energy.rMax = a.options.descent.rMax;
    sf::GrayImage img = sf::load_gray(a.image, a.invert);
    if (!a.noStretch) {
        const auto [lo, hi] = parseStretch(a.stretch);
        img = sf::histogram_stretch(img, lo, hi);
    }
    const sf::SamplePointSet points = sf::points_from_json(readText(a.points));
    const sf::RestorationResult result = sf::restore(img, points, a.options);
    if (!a.outSpline.empty()) {
        writeText(a.outSpline, sf::spline_to_json(result.curve));
    }
    if (!a.outMask.empty()) {
        sf::save_mask(result.mask, a.outMask);
    }
    if (!a.outTrace.empty()) {
        writeText(a.outTrace, sf::trace_to_csv(result.trace));
    }
    const auto& first = result.trace.front();
    const auto& last = result.trace.back();
    std::printf("iterations %zu  f_total %.6g -> %.6g  mask pixels %zu\n", result.trace.size() - 1, first.total,
                last.total, result.mask.count());
    return 0;
}

struct OverlayArgs {
    std::vector<std::string> masks;
    std::string out;
};

int runOverlay(const OverlayArgs& a) {
    std::vector<sf::BinaryMask> masks;
    for (const auto& m : a.masks) {
        masks.push_back(sf::load_mask(m));
    }
    sf::save_mask(sf::overlay_strokes(masks), a.out);
    return 0;
}

struct ProfileArgs {
    sf::BandModel model;
    double lo = 0.0;
    double hi = 0.0;
    int samples = 1000;
    std::string out;
};

int runProfile(ProfileArgs& a) {
    a.model.validate();
    const double lo = a.lo > 0.0 ? a.lo : 0.5 * a.model.R;
    const double hi = a.hi > 0.0 ? a.hi : 5.0 * a.model.R;
    if (!(hi > lo) || a.samples < 2) {
        sf::throwInput("profile needs hi > lo and at least 2 samples");
    }
    std::ostringstream os;
    os << "r,F_E,dF_E_dr\n";
    for (int k = 0; k < a.samples; ++k) {
        const double r = lo + (hi - lo) * k / (a.samples - 1);
        os << sf::detail::formatReal(r) << ',' << sf::detail::formatReal(sf::energy_profile(a.model, r)) << ','
           << sf::detail::formatReal(sf::profile_derivative(a.model, r)) << '\n';
    }
    writeText(a.out, os.str());
    const double rStar = sf::grid_minimizer(a.model);
    std::printf("grid minimizer r* = %.9g\n", rStar);
    if (a.model.alpha == 1.0 && 4.0 * a.model.c1 * a.model.R > a.model.c2) {
        std::printf("closed form    r* = %.9g\n", sf::closed_form_minimizer_alpha1(a.model));
    }
    return 0;
}

struct BenchArgs {
    std::string suite = "default";
    std::string out = "results.csv";
    std::string artifacts;
    std::string timing;
    int threads = 0;
};

int runBench(const BenchArgs& a) {
    if (a.suite != "default") {
        sf::throwInput("unknown suite \"" + a.suite + "\"");
    }
    const auto cases = sf::default_suite();
    const fs::path outPath(a.out);
    const fs::path artDir = a.artifacts.empty() ? fs::path(outPath).replace_extension("").concat("_cases")
                                                : fs::path(a.artifacts);
    const fs::path timingPath =
        a.timing.empty() ? fs::path(outPath).replace_extension("").concat("_timing.csv") : fs::path(a.timing);

    const sf::SuiteRun run = sf::run_suite(cases, {}, a.threads);
    sf::write_suite(run, outPath, artDir, timingPath);
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& o = run.outcomes[k];
        std::printf("%-14s IoU %.4f  Hausdorff %.2f  %.2fs\n", cases[k].name.c_str(), o.score.iou, o.score.hausdorff,
                    run.seconds[k]);
    }
    return 0;
}

int runServe(const std::string& addr) {
    sf::service::ServiceConfig config = sf::service::ServiceConfig::from_env();
    if (!addr.empty()) {
        const auto colon = addr.rfind(':');
        if (colon == std::string::npos) {
            sf::throwInput("--addr must be host:port");
        }
        config.host = addr.substr(0, colon);
        config.port = std::stoi(addr.substr(colon + 1));
    }
    sf::service::Service service(config);
    std::printf("listening on %s:%d\n", config.host.c_str(), config.port);
    std::fflush(stdout);
    if (!service.listen()) {
        sf::throwInput("cannot listen on " + config.host + ":" + std::to_string(config.port));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"StrokeForge: variational stroke restoration"};
    app.require_subcommand(1);

    RestoreArgs restoreArgs;
    addRestore(app, restoreArgs);

    OverlayArgs overlayArgs;
    auto* overlay = app.add_subcommand("overlay", "Union of stroke masks");
    overlay->add_option("masks", overlayArgs.masks, "Mask PNGs")->required();
    overlay->add_option("-o,--out", overlayArgs.out, "Output PNG")->required();

    ProfileArgs profileArgs;
    auto* profile = app.add_subcommand("profile", "Energy of a disc on a straight band versus its radius");
    profile->add_option("--R", profileArgs.model.R, "Band half-width")->capture_default_str();
    profile->add_option("--c1", profileArgs.model.c1)->capture_default_str();
    profile->add_option("--c2", profileArgs.model.c2)->capture_default_str();
    profile->add_option("--alpha", profileArgs.model.alpha)->capture_default_str();
    profile->add_option("--lo", profileArgs.lo, "Smallest r; default R/2");
    profile->add_option("--hi", profileArgs.hi, "Largest r; default 5R");
    profile->add_option("--samples", profileArgs.samples)->capture_default_str();
    profile->add_option("-o,--out", profileArgs.out, "Output CSV")->required();

    BenchArgs benchArgs;
    auto* bench = app.add_subcommand("bench", "Synthetic benchmark");
    bench->require_subcommand(1);
    auto* benchRun = bench->add_subcommand("run", "Run a benchmark suite");
    benchRun->add_option("--suite", benchArgs.suite)->capture_default_str();
    benchRun->add_option("--out", benchArgs.out, "Scores CSV")->capture_default_str();
    benchRun->add_option("--artifacts", benchArgs.artifacts, "Per-case output directory; default <out>_cases");
    benchRun->add_option("--timing", benchArgs.timing, "Runtime CSV; default <out>_timing.csv");
    benchRun->add_option("--threads", benchArgs.threads, "Cases run concurrently; 0 uses all cores");

    std::string serveAddr;
    auto* serve = app.add_subcommand("serve", "HTTP service (STROKEFORGE_ADDR, STROKEFORGE_DATA_DIR)");
    serve->add_option("--addr", serveAddr, "host:port, overrides STROKEFORGE_ADDR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("restore")) return runRestore(restoreArgs);
        if (app.got_subcommand("overlay")) return runOverlay(overlayArgs);
        if (app.got_subcommand("profile")) return runProfile(profileArgs);
        if (app.got_subcommand("bench")) return runBench(benchArgs);
        if (app.got_subcommand("serve")) return runServe(serveAddr);
    } catch (const sf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == sf::ErrorKind::Numeric ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
