#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "image_io.hpp"
#include "pansharp/caploss.hpp"
#include "pansharp/featbank.hpp"
#include "pansharp/metrics.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/rawten.hpp"
#include "pansharp/recolor.hpp"
#include "pansharp/reports.hpp"

namespace pansharp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// config file merging

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return std::nullopt;
}

bool flag_given(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& token) {
        return token == flag || token.rfind(flag + "=", 0) == 0;
    });
}

/// Expands `--config FILE` into `--key=value` tokens for keys not already on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args)
{
    const auto path = find_config_path(args);
    if (!path || args.empty()) {
        return args;
    }
    std::ifstream in(*path);
    if (!in) {
        throw Error("cannot read config file " + *path);
    }
    std::vector<std::string> merged{args.front()};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(*path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) {
            key = key.substr(2);
        }
        if (key.empty() || key == "config" || flag_given(args, key)) {
            continue;
        }
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

// ---------------------------------------------------------------------------
// shared helpers

struct Common {
    std::string config;
    unsigned threads = 1;
    std::size_t tile = 0;

    [[nodiscard]] Parallelism parallelism() const { return {std::max(1u, threads), tile}; }
};

void add_common(CLI::App* sub, Common& common)
{
    sub->add_option("--config", common.config, "Flat key = value file mirroring the long flags");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tile", common.tile, "Rows (or items) per parallel task; 0 splits evenly");
}

void emit_json(const json& j, const std::string& path, std::ostream& out)
{
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error("cannot write " + path);
    }
    file << text;
}

RecolorParams recolor_params(std::size_t window, std::size_t hf_size)
{
    RecolorParams p;
    p.window = window;
    p.hf_filter_size = hf_size;
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// recolor

struct RecolorOptions {
    Common common;
    std::string ps;
    std::string ms;
    std::string out;
    std::string summary;
    std::string mode = "hf";
    std::size_t window = 3;
    std::size_t hf_size = 5;
    std::size_t ratio = 4;
    int bit_depth = 16;
};

int cmd_recolor(const RecolorOptions& o, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    const Parallelism par = o.common.parallelism();
    const RecolorParams params = recolor_params(o.window, o.hf_size);
    const Raster ps = read_image(o.ps);
    const Raster ms = read_image(o.ms);
    const Raster ms_up = upscale_bilinear(ms, o.ratio, par);
    if (!ms_up.same_shape(ps)) {
        throw ShapeError("upscaled MS " + ms_up.shape_string() + " does not match PS " + ps.shape_string());
    }

    Raster result;
    if (o.mode == "stage") {
        result = rc_stage_inputs(ps, ms_up, params, par).stacked();
    } else {
        const Raster rc = recolorize(ps, ms_up, params, par);
        if (o.mode == "raw") {
            result = rc;
        } else if (o.mode == "luma") {
            result = luma_guided(rc, ps);
        } else {
            result = hf_guided(rc, ps, params, par);
        }
    }
    write_image(o.out, result, o.bit_depth);

    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    const json summary = {
        {"command", "recolor"},
        {"mode", o.mode},
        {"window", params.window},
        {"hf_filter_size", params.hf_filter_size},
        {"ratio", o.ratio},
        {"width", result.width()},
        {"height", result.height()},
        {"channels", result.channels()},
        {"output", o.out},
        {"elapsed_ms", elapsed.count()},
    };
    emit_json(summary, o.summary, out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
    Common common;
    std::string ps;
    std::string ms;
    std::string pan;
    std::string reference;
    std::string batch;
    std::string out;
    MetricsParams params;
};

struct MetricsJob {
    std::string ps;
    std::string ms;
    std::string pan;
    std::string reference;
};

json evaluate_job(const MetricsJob& job, const MetricsParams& params, bool& complete)
{
    json record = {{"inputs", {{"ps", job.ps}, {"ms", job.ms}, {"pan", job.pan}}}};
    if (!job.reference.empty()) {
        record["inputs"]["reference"] = job.reference;
    }
    try {
        const Raster ps = read_image(job.ps);
        const Raster ms = read_image(job.ms);
        const Raster pan = read_image(job.pan);
        std::optional<Raster> reference;
        if (!job.reference.empty()) {
            reference = read_image(job.reference);
        }
        const MetricsReport report =
            evaluate_metrics(ps, ms, pan, reference ? &*reference : nullptr, params);
        record.update(to_json(report));
        complete = report.errors.empty();
    } catch (const Error& e) {
        record["error"] = e.what();
        complete = false;
    }
    return record;
}

std::vector<MetricsJob> read_batch(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read batch file " + path);
    }
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
    std::vector<MetricsJob> jobs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::vector<std::string> parts;
        for (std::string f; fields >> f;) {
            parts.push_back(resolve(f));
        }
        if (parts.size() != 3 && parts.size() != 4) {
            throw Error(path + ":" + std::to_string(line_no) + ": expected 'ps ms pan [reference]'");
        }
        jobs.push_back({parts[0], parts[1], parts[2], parts.size() == 4 ? parts[3] : std::string{}});
    }
    return jobs;
}

int cmd_metrics(const MetricsOptions& o, std::ostream& out)
{
    if (o.batch.empty()) {
        if (o.ps.empty() || o.ms.empty() || o.pan.empty()) {
            throw ArgumentError("metrics needs --ps, --ms and --pan (or --batch)");
        }
        bool complete = true;
        const json record = evaluate_job({o.ps, o.ms, o.pan, o.reference}, o.params, complete);
        emit_json(record, o.out, out);
        return complete ? exit_ok : exit_partial;
    }

    const std::vector<MetricsJob> jobs = read_batch(o.batch);
    std::vector<json> records(jobs.size());
    std::vector<char> complete(jobs.size(), 1);
    Parallelism par = o.common.parallelism();
    par.grain = 1;
    parallel_for(jobs.size(), par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            bool ok = true;
            records[i] = evaluate_job(jobs[i], o.params, ok);
            records[i]["index"] = i;
            complete[i] = ok ? 1 : 0;
        }
    });

    std::ostringstream text;
    for (const json& r : records) {
        text << r.dump() << "\n";
    }
    if (o.out.empty()) {
        out << text.str();
    } else {
        std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw Error("cannot write " + o.out);
        }
        file << text.str();
    }
    const bool all_ok = std::all_of(complete.begin(), complete.end(), [](char c) { return c != 0; });
    return all_ok ? exit_ok : exit_partial;
}

// ---------------------------------------------------------------------------
// caploss / weights

struct LossOptions {
    Common common;
    std::string pan;
    std::string ps;
    std::string ms;
    std::string bank;
    std::string out;
    std::string weights_out;
    double gamma = 4.0;
    double alpha_cap = 0.9;
    double alpha_ms = 0.01;
    double alpha_l1 = 1.0;
    std::vector<std::size_t> pool_sizes{7, 5, 3};
    std::size_t window = 3;
    std::size_t hf_size = 5;
    std::size_t ratio = 4;
};

int cmd_caploss(const LossOptions& o, std::ostream& out)
{
    const Parallelism par = o.common.parallelism();
    const FeatureBank bank = load_bank_file(o.bank);
    LossParams params;
    params.gamma = o.gamma;
    params.alpha_cap = o.alpha_cap;
    params.alpha_ms = o.alpha_ms;
    params.alpha_l1 = o.alpha_l1;
    params.pool_sizes = o.pool_sizes;
    params.downscale_factor = o.ratio;
    params.validate(bank);
    const RecolorParams rc_params = recolor_params(o.window, o.hf_size);

    const Raster pan = read_image(o.pan);
    const Raster ps = read_image(o.ps);
    const Raster ms = read_image(o.ms);
    const CapWeights weights = cap_weights(bank, ms, params.gamma, par);
    const LossReport report = total_loss(bank, weights, pan, ps, ms, params, rc_params, par);
    if (!o.weights_out.empty()) {
        emit_json(to_json(weights, params.gamma), o.weights_out, out);
    }
    emit_json(to_json(report, params, rc_params), o.out, out);
    return exit_ok;
}

int cmd_weights(const LossOptions& o, std::ostream& out)
{
    const FeatureBank bank = load_bank_file(o.bank);
    const Raster ms = read_image(o.ms);
    const CapWeights weights = cap_weights(bank, ms, o.gamma, o.common.parallelism());
    emit_json(to_json(weights, o.gamma), o.out, out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// filter-dataset

struct FilterOptions {
    Common common;
    std::string dir;
    std::string out;
    double threshold = 0.05;
};

/// Pair id: the file stem without a trailing "_pan" / "_ms".
std::string pair_id(const fs::path& file)
{
    std::string stem = file.stem().string();
    for (const std::string suffix : {"_pan", "_ms"}) {
        if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return stem.substr(0, stem.size() - suffix.size());
        }
    }
    return stem;
}

int cmd_filter_dataset(const FilterOptions& o, std::ostream& out)
{
    if (!fs::is_directory(o.dir)) {
        throw Error("not a directory: " + o.dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (ext == ".png" || ext == ".rten") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    struct FileResult {
        std::optional<double> zero_fraction;
        std::string error;
    };
    std::vector<FileResult> results(files.size());
    Parallelism par = o.common.parallelism();
    par.grain = 1;
    parallel_for(files.size(), par, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                results[i].zero_fraction = zero_fraction(read_image(files[i]));
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    });

    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < files.size(); ++i) {
        groups[pair_id(files[i])].push_back(i);
    }

    json items = json::array();
    json kept = json::array();
    json discarded = json::array();
    std::size_t errors = 0;
    for (const auto& [id, members] : groups) {
        json file_records = json::array();
        double worst = 0.0;
        bool failed = false;
        for (std::size_t i : members) {
            json rec = {{"path", files[i].filename().string()}};
            if (results[i].zero_fraction) {
                rec["zero_fraction"] = *results[i].zero_fraction;
                worst = std::max(worst, *results[i].zero_fraction);
            } else {
                rec["zero_fraction"] = nullptr;
                rec["error"] = results[i].error;
                failed = true;
            }
            file_records.push_back(rec);
        }
        json item = {{"id", id}, {"files", file_records}};
        if (failed) {
            item["status"] = "error";
            item["zero_fraction"] = nullptr;
            ++errors;
        } else {
            const bool discard = worst > o.threshold;
            item["status"] = discard ? "discarded" : "kept";
            item["zero_fraction"] = worst;
            (discard ? discarded : kept).push_back(id);
        }
        items.push_back(item);
    }

    const json manifest = {
        {"directory", o.dir},
        {"threshold", o.threshold},
        {"items", items},
        {"kept", kept},
        {"discarded", discarded},
        {"summary", {{"kept", kept.size()}, {"discarded", discarded.size()}, {"errors", errors}}},
    };
    emit_json(manifest, o.out, out);
    return errors == 0 ? exit_ok : exit_partial;
}

// ---------------------------------------------------------------------------
// extract-features

struct ExtractOptions {
    Common common;
    std::string bank;
    std::string image;
    std::string out;
};

int cmd_extract_features(const ExtractOptions& o, std::ostream& out)
{
    const FeatureBank bank = load_bank_file(o.bank);
    const Raster image = read_image(o.image);
    const FeatureMaps maps = extract(bank, image, o.common.parallelism());
    json taps = json::array();
    for (std::size_t l = 0; l < maps.taps.size(); ++l) {
        const std::string path = o.out + "_tap" + std::to_string(l + 1) + ".rten";
        write_rawten(path, maps.taps[l]);
        const Raster& t = maps.taps[l];
        taps.push_back({{"path", path},
                        {"stage", bank.taps[l]},
                        {"channels", t.channels()},
                        {"height", t.height()},
                        {"width", t.width()}});
    }
    emit_json({{"command", "extract-features"}, {"taps", taps}}, "", out);
    return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pan-sharpening toolkit: guided re-colorization, CAP loss evaluation and quality metrics",
                 "pansharp"};
    app.require_subcommand(1);

    RecolorOptions rec;
    auto* recolor = app.add_subcommand("recolor", "Re-colorize a pan-sharpened image from the MS colors");
    add_common(recolor, rec.common);
    recolor->add_option("--ps", rec.ps, "Pan-sharpened image (PAN resolution)")->required();
    recolor->add_option("--ms", rec.ms, "Multi-spectral image (MS resolution)")->required();
    recolor->add_option("--out", rec.out, "Output image (.png or .rten)")->required();
    recolor->add_option("--mode", rec.mode, "raw | luma | hf | stage")
        ->check(CLI::IsMember({"raw", "luma", "hf", "stage"}));
    recolor->add_option("--window", rec.window, "Search window size (odd)");
    recolor->add_option("--hf-size", rec.hf_size, "Averaging filter size for hf guidance (odd)");
    recolor->add_option("--ratio", rec.ratio, "MS upscaling factor")->check(CLI::PositiveNumber);
    recolor->add_option("--bit-depth", rec.bit_depth, "PNG output bit depth")->check(CLI::IsMember({8, 16}));
    recolor->add_option("--summary", rec.summary, "Write the JSON summary here instead of stdout");

    MetricsOptions met;
    auto* metrics = app.add_subcommand("metrics", "ERGAS, SCC and QNR for one image or a batch list");
    add_common(metrics, met.common);
    metrics->add_option("--ps", met.ps, "Pan-sharpened image");
    metrics->add_option("--ms", met.ms, "Multi-spectral image at 1/ratio resolution");
    metrics->add_option("--pan", met.pan, "Panchromatic image");
    metrics->add_option("--reference", met.reference, "Optional full-resolution reference for ERGAS");
    metrics->add_option("--batch", met.batch, "File with one 'ps ms pan [reference]' line per job");
    metrics->add_option("--out", met.out, "Output JSON (JSON lines in batch mode); stdout if omitted");
    metrics->add_option("--ratio", met.params.ratio, "PAN/MS resolution factor")->check(CLI::PositiveNumber);
    metrics->add_option("--q-block", met.params.qnr.q_block, "UIQ tile size")->check(CLI::PositiveNumber);
    metrics->add_option("--p", met.params.qnr.p, "D_lambda exponent");
    metrics->add_option("--q", met.params.qnr.q, "D_s exponent");
    metrics->add_option("--alpha", met.params.qnr.alpha, "QNR spectral exponent");
    metrics->add_option("--beta", met.params.qnr.beta, "QNR spatial exponent");

    LossOptions loss;
    auto* caploss = app.add_subcommand("caploss", "CAP, perceptual, l1, fidelity and RC losses");
    auto* weights = app.add_subcommand("weights", "Dump per-layer CAP channel weights");
    for (auto* sub : {caploss, weights}) {
        add_common(sub, loss.common);
        sub->add_option("--ms", loss.ms, "Multi-spectral RGB image")->required();
        sub->add_option("--bank", loss.bank, "FBANK1 feature bank")->required();
        sub->add_option("--gamma", loss.gamma, "CAP weight sharpness")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", loss.out, "Output JSON; stdout if omitted");
    }
    caploss->add_option("--pan", loss.pan, "Panchromatic image")->required();
    caploss->add_option("--ps", loss.ps, "Pan-sharpened image")->required();
    caploss->add_option("--alpha-cap", loss.alpha_cap, "Weight of the CAP term");
    caploss->add_option("--alpha-ms", loss.alpha_ms, "Weight of the MS perceptual term");
    caploss->add_option("--alpha-l1", loss.alpha_l1, "Weight of the MS l1 term");
    caploss->add_option("--pool-sizes", loss.pool_sizes, "Per-tap max-pool sizes")->delimiter(',');
    caploss->add_option("--window", loss.window, "Re-colorization window for the RC term");
    caploss->add_option("--hf-size", loss.hf_size, "Averaging filter size");
    caploss->add_option("--ratio", loss.ratio, "PAN/MS resolution factor")->check(CLI::PositiveNumber);
    caploss->add_option("--weights-out", loss.weights_out, "Also dump the CAP weights as JSON");

    FilterOptions filt;
    auto* filter = app.add_subcommand("filter-dataset", "Flag images with too many all-zero pixels");
    add_common(filter, filt.common);
    filter->add_option("--dir", filt.dir, "Directory of .png/.rten images")->required();
    filter->add_option("--threshold", filt.threshold, "Discard when the zero fraction is strictly greater");
    filter->add_option("--out", filt.out, "Manifest JSON; stdout if omitted");

    ExtractOptions ext;
    auto* extract_cmd = app.add_subcommand("extract-features", "Dump feature-bank taps as RAWTEN tensors");
    add_common(extract_cmd, ext.common);
    extract_cmd->add_option("--bank", ext.bank, "FBANK1 feature bank")->required();
    extract_cmd->add_option("--image", ext.image, "Input image")->required();
    extract_cmd->add_option("--out", ext.out, "Output prefix; writes PREFIX_tapN.rten")->required();

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }

    try {
        if (recolor->parsed()) {
            return cmd_recolor(rec, out);
        }
        if (metrics->parsed()) {
            return cmd_metrics(met, out);
        }
        if (caploss->parsed()) {
            return cmd_caploss(loss, out);
        }
        if (weights->parsed()) {
            return cmd_weights(loss, out);
        }
        if (filter->parsed()) {
            return cmd_filter_dataset(filt, out);
        }
        if (extract_cmd->parsed()) {
            return cmd_extract_features(ext, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}

} // namespace pansharp::cli
