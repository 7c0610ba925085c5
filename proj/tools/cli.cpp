#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>

#include "bmprior/analysis.hpp"
#include "bmprior/error.hpp"
#include "bmprior/gibbs.hpp"
#include "bmprior/imageio.hpp"
#include "bmprior/invising.hpp"
#include "bmprior/parallel.hpp"
#include "bmprior/patchset.hpp"
#include "bmprior/priormodel.hpp"
#include "report.hpp"

namespace bmprior::cli {
namespace {

using report::json;

struct Options {
    std::string input;
    std::vector<std::string> inputs;
    std::string output;
    unsigned threads = 0;

    // binarize
    std::string dither = "riemersma";
    double threshold = 0.5;
    // patchify, generate
    int size = 8;
    // infer
    std::string method = "ba";
    std::optional<double> ridge;
    double grad_tol = 1e-3;
    int max_iters = 100;
    // Monte Carlo
    std::uint64_t sweeps = 10000;
    std::uint64_t burn_in = 1000;
    unsigned chains = 4;
    std::uint64_t seed = 0;
    // analyze
    std::string fit_range = "2:6";
    double frustration_threshold = 0.05;
    double bin_width = 0.02;
    std::string moments_path;
    std::string patches_path;
    std::string profile_csv;
    // heat
    double tmin = 0.5;
    double tmax = 5.0;
    int steps = 10;
    // export-prior
    std::optional<double> h0;
    double r_cut = kDefaultTailCutoff;
    // generate
    std::string params_path;
    std::size_t count = 0;
};

json provenance(const std::string& command, const std::vector<std::string>& args, const std::vector<std::string>& inputs,
                json flags) {
    return {{"tool", "bmprior"},      {"version", report::kToolVersion}, {"schema", report::kSchemaVersion},
            {"command", command},     {"argv", args},                    {"inputs", inputs},
            {"flags", std::move(flags)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

McConfig mc_config(const Options& o) {
    McConfig cfg;
    cfg.sweeps = o.sweeps;
    cfg.burn_in = o.burn_in;
    cfg.chains = o.chains;
    cfg.seed = o.seed;
    return cfg;
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    int lo = 0, hi = 0;
    char tail = 0;
    if (colon == std::string::npos ||
        std::sscanf(text.c_str(), "%d:%d%c", &lo, &hi, &tail) != 2 || lo < 1 || hi < lo + 2)
        throw CLI::ValidationError("--fit-range", "expected LO:HI with 1 <= LO and HI >= LO + 2, got '" + text + "'");
    return {lo, hi};
}

bool is_patch_file(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && std::memcmp(bytes.data(), "BMPATCH1", 8) == 0;
}

void cmd_binarize(const Options& o, std::ostream& err) {
    const GrayImage img = read_pgm_file(o.input);
    const Dither d = parse_dither(o.dither);
    const BinaryImage bin = binarize(img, d, o.threshold);
    write_file(o.output, write_pbm(bin));
    std::size_t black = 0;
    for (auto s : bin.spins) black += s > 0;
    err << "binarized " << img.width << "x" << img.height << " with " << to_string(d) << ": " << black
        << " black pixels\n";
}

void cmd_patchify(const Options& o, std::ostream& err) {
    PatchSet all(o.size);
    for (const auto& path : o.inputs) all.append(patchify(read_pbm_file(path), o.size));
    save_patchset(o.output, all);
    err << "wrote " << all.size() << " patches of side " << o.size << "\n";
}

void cmd_moments(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    const EmpiricalMoments m = compute_moments(load_patchset(o.input));
    json j = report::moments_to_json(m);
    j["provenance"] = provenance("moments", args, {o.input}, json::object());
    report::write_text(o.output, dump(j), out);
}

void cmd_infer(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const EmpiricalMoments m = report::moments_from_json(report::read_json_file(o.input));
    json flags = {{"method", o.method}, {"ridge", o.ridge ? json(*o.ridge) : json(nullptr)}};
    json learning;
    IsingModel model;
    if (o.method == "nmf") {
        model = infer_nmf(m, o.ridge);
    } else if (o.method == "ba") {
        model = infer_ba(m, o.ridge);
    } else {
        LearnConfig cfg;
        cfg.grad_tol = o.grad_tol;
        cfg.max_iters = o.max_iters;
        cfg.mc = mc_config(o);
        cfg.on_iteration = [&err](const LearnIteration& it) {
            err << "iter " << it.iter << " " << it.step_type << " |grad|=" << it.grad_inf_norm << "\n";
        };
        const LearnResult r = learn_mc(m, cfg);
        model = r.model;
        json log = json::array();
        for (const auto& it : r.log)
            log.push_back({{"iter", it.iter}, {"grad_inf_norm", it.grad_inf_norm}, {"step", it.step_type}});
        learning = {{"converged", r.converged}, {"iterations", r.iterations},
                    {"grad_inf_norm", r.grad_inf_norm}, {"log", log}};
        flags.update({{"grad_tol", o.grad_tol}, {"max_iters", o.max_iters}, {"sweeps", o.sweeps},
                      {"burn_in", o.burn_in}, {"chains", o.chains}, {"seed", o.seed}});
        if (!r.converged) err << "warning: learning stopped at |grad| = " << r.grad_inf_norm << "\n";
    }
    json j = report::model_to_json(model);
    if (!learning.is_null()) j["learning"] = learning;
    j["provenance"] = provenance("infer", args, {o.input}, flags);
    report::write_text(o.output, dump(j), out);
}

json fit_or_error(const DistanceProfile& p, std::pair<int, int> range) {
    try {
        return report::fit_to_json(fit_exponential(p, range.first, range.second));
    } catch (const Error& e) {
        return {{"ok", false}, {"error", e.what()}, {"r_range", {range.first, range.second}}};
    }
}

void cmd_analyze(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    const auto range = parse_range(o.fit_range);
    const IsingModel model = report::model_from_json(report::read_json_file(o.input));
    if (model.side < 4) throw InvalidArgument("analyze: model must be an L x L lattice with L >= 4");

    std::vector<std::string> inputs{o.input};
    json rep;
    const auto n = model.size();
    double max_abs_w = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) max_abs_w = std::max(max_abs_w, std::abs(model.w(i, k)));
    rep["model"] = {{"L", model.side}, {"N", n}, {"max_abs_w", max_abs_w},
                    {"mean_h", n > 0 ? model.h.mean() : 0.0}};

    const DistanceProfile pa = distance_profile(model, {1, 1});
    const DistanceProfile pb = distance_profile(model, {2, 2});
    rep["profiles"] = {{"A", report::profile_to_json(pa)}, {"B", report::profile_to_json(pb)}};
    rep["fits"] = {{"A", fit_or_error(pa, range)}, {"B", fit_or_error(pb, range)}};

    const ClassHistograms nn = coupling_histogram(model, LinkKind::nn, o.bin_width);
    const ClassHistograms nnn = coupling_histogram(model, LinkKind::nnn, o.bin_width);
    rep["histograms"] = {{"nn_1", report::histogram_to_json(nn.cls1)}, {"nn_2", report::histogram_to_json(nn.cls2)},
                         {"nnn_1", report::histogram_to_json(nnn.cls1)},
                         {"nnn_2", report::histogram_to_json(nnn.cls2)}};

    const FrustrationReport fr = frustration_count(model, o.frustration_threshold);
    json plaquettes = json::array();
    for (const Site& s : fr.plaquettes) plaquettes.push_back({s.x, s.y});
    rep["frustration"] = {{"threshold", o.frustration_threshold}, {"count", fr.count},
                          {"considered", fr.considered}, {"plaquettes", plaquettes}};

    if (!o.moments_path.empty()) {
        const EmpiricalMoments m = report::moments_from_json(report::read_json_file(o.moments_path));
        inputs.push_back(o.moments_path);
        const auto fm = field_and_magnetization_histograms(model, m);
        rep["moments"] = {{"B", m.count}, {"mean_mu", m.size() > 0 ? m.mu.mean() : 0.0}};
        rep["histograms"]["fields"] = report::histogram_to_json(fm.fields);
        rep["histograms"]["magnetizations"] = report::histogram_to_json(fm.magnetizations);
    }
    if (!o.patches_path.empty()) {
        const Spectrum s = fourier_spectrum(load_patchset(o.patches_path));
        inputs.push_back(o.patches_path);
        rep["spectrum"] = {{"slope", s.slope}, {"fit_range", {s.fit_lo, s.fit_hi}}};
    }
    if (!o.profile_csv.empty()) {
        std::ostringstream csv;
        csv.precision(17);
        csv << "origin,r,w_bar,stderr\n";
        for (const auto* p : {&pa, &pb})
            for (std::size_t k = 0; k < p->r_values.size(); ++k)
                csv << (p == &pa ? "A" : "B") << "," << p->r_values[k] << "," << p->w_bar[k] << ","
                    << p->std_error[k] << "\n";
        report::write_text(o.profile_csv, csv.str(), out);
    }
    rep["provenance"] = provenance("analyze", args, inputs,
                                   {{"fit_range", o.fit_range},
                                    {"frustration_threshold", o.frustration_threshold},
                                    {"bin_width", o.bin_width}});
    report::write_text(o.output, dump(rep), out);
}

void cmd_heat(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.steps < 1) throw InvalidArgument("--steps must be >= 1");
    if (!(o.tmin > 0.0) || !(o.tmax >= o.tmin)) throw InvalidArgument("need 0 < tmin <= tmax");
    const IsingModel model = report::model_from_json(report::read_json_file(o.input));
    std::vector<double> grid;
    for (int k = 0; k < o.steps; ++k)
        grid.push_back(o.steps == 1 ? o.tmin : o.tmin + (o.tmax - o.tmin) * k / (o.steps - 1));
    const HeatCurve curve = specific_heat_sweep(model, grid, mc_config(o));
    std::ostringstream csv;
    csv.precision(17);
    csv << "T,C,C_stderr,peak\n";
    for (const auto& p : curve.points)
        csv << p.temperature << "," << p.c << "," << p.c_stderr << ","
            << (p.temperature == curve.peak_temperature ? 1 : 0) << "\n";
    report::write_text(o.output, csv.str(), out);
    err << "peak_T=" << curve.peak_temperature << "\n";
}

void cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
    const auto bytes = read_file(o.input);
    const Spectrum s = is_patch_file(bytes) ? fourier_spectrum(decode_patchset(bytes))
                                            : fourier_spectrum(read_pbm(bytes));
    std::ostringstream csv;
    csv.precision(17);
    csv << "f,amplitude\n";
    for (std::size_t k = 0; k < s.frequency.size(); ++k) csv << s.frequency[k] << "," << s.amplitude[k] << "\n";
    report::write_text(o.output, csv.str(), out);
    err << "slope=" << s.slope << " over f in [" << s.fit_lo << ", " << s.fit_hi << "]\n";
}

void cmd_export_prior(const Options& o, std::ostream& out, std::ostream& err) {
    const IsingModel model = report::model_from_json(report::read_json_file(o.input));
    const ExtractedPrior ex = extract_params(model);
    const double h0 = o.h0 ? *o.h0 : (model.size() > 0 ? model.h.mean() : 0.0);
    if (!ex.tail_ok) err << "warning: coupling profile does not decay; b is reported as null\n";
    report::write_text(o.output, dump(report::prior_to_json(ex.params, h0, o.r_cut)), out);
}

void cmd_generate(const Options& o, std::ostream& err) {
    const auto prior = report::prior_from_json(report::read_json_file(o.params_path));
    const IsingModel model = build_prior(prior.params, o.size, prior.h0, prior.r_cut);
    const PatchSet ps = generate_patches(model, o.count, mc_config(o));
    save_patchset(o.output, ps);
    err << "generated " << ps.size() << " patches of side " << o.size << " (seed " << o.seed << ")\n";
}

void add_mc_flags(CLI::App* app, Options& o, std::uint64_t sweeps, std::uint64_t burn_in) {
    o.sweeps = sweeps;
    o.burn_in = burn_in;
    app->add_option("--sweeps", o.sweeps, "Measured Metropolis sweeps per chain")->capture_default_str();
    app->add_option("--burn-in", o.burn_in, "Discarded sweeps per chain")->capture_default_str();
    app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Boltzmann-machine priors for binarized image patches", "bmprior"};
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "Worker threads (default: BMPRIOR_THREADS or all cores)");

    auto* binarize_cmd = app.add_subcommand("binarize", "Binarize a PGM image into a PBM");
    binarize_cmd->add_option("input", o.input, "Input PGM")->required();
    binarize_cmd->add_option("-o,--output", o.output, "Output PBM")->required();
    binarize_cmd->add_option("--dither", o.dither, "Dithering method")
        ->check(CLI::IsMember({"riemersma", "floyd", "none"}))
        ->capture_default_str();
    binarize_cmd->add_option("--threshold", o.threshold, "Luminance threshold in (0, 1]")->capture_default_str();

    auto* patchify_cmd = app.add_subcommand("patchify", "Cut PBM images into L x L patches");
    patchify_cmd->add_option("inputs", o.inputs, "Input PBM files")->required();
    patchify_cmd->add_option("--size", o.size, "Patch side L")->required()->check(CLI::PositiveNumber);
    patchify_cmd->add_option("-o,--output", o.output, "Output patch file")->required();

    auto* moments_cmd = app.add_subcommand("moments", "Magnetizations and connected correlations of a patch set");
    moments_cmd->add_option("input", o.input, "Patch file")->required();
    moments_cmd->add_option("-o,--output", o.output, "Output JSON (default stdout)");

    auto* infer_cmd = app.add_subcommand("infer", "Infer couplings and fields from moments");
    infer_cmd->add_option("input", o.input, "Moments JSON")->required();
    infer_cmd->add_option("-o,--output", o.output, "Output model JSON (default stdout)");
    infer_cmd->add_option("--method", o.method, "Estimator")
        ->check(CLI::IsMember({"nmf", "ba", "mc"}))
        ->capture_default_str();
    infer_cmd->add_option("--ridge", o.ridge, "Explicit ridge added to the covariance diagonal");
    infer_cmd->add_option("--grad-tol", o.grad_tol, "Moment residual target for --method mc")->capture_default_str();
    infer_cmd->add_option("--max-iters", o.max_iters, "Iteration cap for --method mc")->capture_default_str();
    infer_cmd->add_option("--chains", o.chains, "Chains per estimate for --method mc")->capture_default_str();
    add_mc_flags(infer_cmd, o, 10000, 1000);

    auto* analyze_cmd = app.add_subcommand("analyze", "Profiles, histograms, fits and frustration of a model");
    analyze_cmd->add_option("input", o.input, "Model JSON")->required();
    analyze_cmd->add_option("-o,--output", o.output, "Output report JSON (default stdout)");
    analyze_cmd->add_option("--fit-range", o.fit_range, "Distance range LO:HI of the exponential fit")
        ->capture_default_str();
    analyze_cmd->add_option("--frustration-threshold", o.frustration_threshold, "Minimum |w| of counted links")
        ->capture_default_str();
    analyze_cmd->add_option("--bin-width", o.bin_width, "Coupling histogram bin width")->capture_default_str();
    analyze_cmd->add_option("--moments", o.moments_path, "Moments JSON for field/magnetization histograms");
    analyze_cmd->add_option("--patches", o.patches_path, "Patch file for the spectrum slope");
    analyze_cmd->add_option("--profile-csv", o.profile_csv, "Also write the distance profiles as CSV");

    auto* heat_cmd = app.add_subcommand("heat", "Specific heat over a temperature grid");
    heat_cmd->add_option("input", o.input, "Model JSON")->required();
    heat_cmd->add_option("-o,--output", o.output, "Output CSV (default stdout)");
    heat_cmd->add_option("--tmin", o.tmin)->capture_default_str();
    heat_cmd->add_option("--tmax", o.tmax)->capture_default_str();
    heat_cmd->add_option("--steps", o.steps, "Grid points")->capture_default_str();
    heat_cmd->add_option("--chains", o.chains, "Chains per temperature")->capture_default_str();
    add_mc_flags(heat_cmd, o, 10000, 1000);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Radially averaged Fourier amplitude");
    spectrum_cmd->add_option("input", o.input, "Patch file or PBM image")->required();
    spectrum_cmd->add_option("-o,--output", o.output, "Output CSV (default stdout)");

    auto* export_cmd = app.add_subcommand("export-prior", "Six-parameter prior of an inferred lattice model");
    export_cmd->add_option("input", o.input, "Model JSON")->required();
    export_cmd->add_option("-o,--output", o.output, "Output JSON (default stdout)");
    export_cmd->add_option("--h0", o.h0, "Uniform field (default: mean inferred field)");
    export_cmd->add_option("--r-cut", o.r_cut, "Tail cutoff distance")->capture_default_str();

    auto* generate_cmd = app.add_subcommand("generate", "Sample patches from a six-parameter prior");
    generate_cmd->add_option("--params", o.params_path, "Prior JSON")->required();
    generate_cmd->add_option("--count", o.count, "Number of patches B")->required()->check(CLI::PositiveNumber);
    generate_cmd->add_option("--size", o.size, "Patch side L")->capture_default_str();
    generate_cmd->add_option("-o,--output", o.output, "Output patch file")->required();
    add_mc_flags(generate_cmd, o, 400, 0);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const unsigned previous_threads = thread_count();
    if (o.threads > 0) set_thread_count(o.threads);
    int status = kExitOk;
    try {
        if (*binarize_cmd) cmd_binarize(o, err);
        else if (*patchify_cmd) cmd_patchify(o, err);
        else if (*moments_cmd) cmd_moments(o, args, out);
        else if (*infer_cmd) cmd_infer(o, args, out, err);
        else if (*analyze_cmd) cmd_analyze(o, args, out);
        else if (*heat_cmd) cmd_heat(o, out, err);
        else if (*spectrum_cmd) cmd_spectrum(o, out, err);
        else if (*export_cmd) cmd_export_prior(o, out, err);
        else if (*generate_cmd) cmd_generate(o, err);
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        status = kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        status = kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        status = kExitData;
    }
    if (o.threads > 0) set_thread_count(previous_threads);
    return status;
}

}  // namespace bmprior::cli
