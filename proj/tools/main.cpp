// Command-line front end for the spherical convolutional Wasserstein
// distance pipeline: weight precomputation, slicing with quantile caching,
// pairwise distances, map export, rankings, and synthetic data generation.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scwd/core.hpp"
#include "scwd/errors.hpp"
#include "scwd/io.hpp"
#include "scwd/synth.hpp"

namespace {

using namespace scwd;

struct GridShape {
    std::size_t n_lat = 0, n_lon = 0;
};

GridShape parse_shape(const std::string& s) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos || x == 0 || x + 1 >= s.size()) {
        throw InvalidArgumentError("grid shape must look like NLATxNLON: " + s);
    }
    try {
        GridShape shape;
        shape.n_lat = std::stoul(s.substr(0, x));
        shape.n_lon = std::stoul(s.substr(x + 1));
        if (shape.n_lat == 0 || shape.n_lon == 0) throw std::invalid_argument(s);
        return shape;
    } catch (const std::exception&) {
        throw InvalidArgumentError("bad grid shape: " + s);
    }
}

struct CommonOpts {
    double r = 2.0;
    std::string range = "1000";
    std::string centers = "60x120";
    std::string work = "361x720";
    std::size_t quantiles = 200;
    std::string aggregation = "paper-sum";
    bool strict_paper_scaling = false;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--r", o.r, "Wasserstein order (>= 1)");
    cmd->add_option("--range", o.range, "kernel radius in km, or 'flat'");
    cmd->add_option("--centers", o.centers, "center grid shape NLATxNLON");
    cmd->add_option("--work", o.work, "work grid shape NLATxNLON");
    cmd->add_option("--quantiles", o.quantiles, "number of quantile levels");
    cmd->add_option("--aggregation", o.aggregation, "paper-sum or area-mean")
        ->check(CLI::IsMember({"paper-sum", "area-mean"}));
    cmd->add_flag("--strict-paper-scaling", o.strict_paper_scaling,
                  "use the bare quantile sum (scales distances by |Q|^(1/r))");
    cmd->add_option("--threads", o.threads, "worker threads (0 = machine parallelism)");
}

ScwdParams make_params(const CommonOpts& o) {
    ScwdParams p;
    p.r = o.r;
    if (o.range == "flat") {
        p.flat_kernel = true;
    } else {
        try {
            std::size_t pos = 0;
            p.range_km = std::stod(o.range, &pos);
            if (pos != o.range.size()) throw std::invalid_argument(o.range);
        } catch (const std::exception&) {
            throw InvalidArgumentError("--range must be a number in km or 'flat'");
        }
    }
    const auto cs = parse_shape(o.centers);
    const auto ws = parse_shape(o.work);
    p.centers = make_center_grid(cs.n_lat, cs.n_lon);
    p.work = ws.n_lat == 361 && ws.n_lon == 720
                 ? make_work_grid()
                 : make_center_grid(ws.n_lat, ws.n_lon);
    p.quantiles = QuantileGrid::midpoints(o.quantiles);
    p.aggregation = o.aggregation == "area-mean" ? Aggregation::AreaMean : Aggregation::PaperSum;
    p.strict_paper_scaling = o.strict_paper_scaling;
    p.threads = o.threads;
    p.validate();
    return p;
}

std::string cache_dir() {
    const char* env = std::getenv("SCWD_CACHE_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

// Loads or computes the weight set for the given parameters, caching it
// under SCWD_CACHE_DIR.
SparseWeightSet cached_weights(const ScwdParams& p) {
    const auto digest = io::weight_digest(p.centers, p.work, p.effective_range(), p.flat_kernel);
    const auto path = cache_dir() + "/wgt_" + hex64(digest) + ".bin";
    if (std::filesystem::exists(path)) {
        auto w = io::read_weights(path);
        if (w.centers == p.centers && w.work == p.work && w.flat == p.flat_kernel &&
            (w.flat || w.range_km == p.range_km)) {
            return w;
        }
        throw CacheMismatchError("weight cache collision: " + path);
    }
    auto w = precompute_weights(p.centers, p.work, p.effective_range(), p.threads);
    io::write_weights(w, path);
    return w;
}

void check_weights_match(const SparseWeightSet& w, const ScwdParams& p) {
    if (w.centers != p.centers || w.work != p.work || w.flat != p.flat_kernel ||
        (!w.flat && w.range_km != p.range_km)) {
        throw CacheMismatchError("weight cache was built under different parameters");
    }
}

bool file_has_magic(const std::string& path, const char* tag7) {
    std::ifstream in(path, std::ios::binary);
    char m[8] = {};
    in.read(m, 8);
    return in.gcount() == 8 && std::equal(tag7, tag7 + 7, m) && m[7] == '\0';
}

SlicedQuantiles quantiles_for_stack(const FieldStack& stack, const ScwdParams& p,
                                    const SparseWeightSet& weights, std::string name) {
    const FieldStack work = regrid_nearest(stack, p.work);
    const SliceMatrix slices = slice_stack(work, weights, p.threads);
    return sliced_quantiles(slices, p.quantiles, p.effective_range(), p.flat_kernel, p.r, p.work,
                            std::move(name));
}

// Loads an operand that may be either a stack file or a quantile cache.
SlicedQuantiles load_operand(const std::string& path, const ScwdParams& p,
                             std::optional<SparseWeightSet>& weights,
                             FieldStack* stack_out = nullptr) {
    if (file_has_magic(path, "SCWDQNT")) {
        auto q = io::read_quantile_cache(path);
        const auto want =
            io::quantile_digest(p.centers, p.work, p.effective_range(), p.flat_kernel, p.r,
                                p.quantiles);
        const auto got =
            io::quantile_digest(q.centers, q.work, q.range_km, q.flat, q.r, q.quantiles);
        if (want != got) {
            throw CacheMismatchError("quantile cache parameters do not match the request: " + path);
        }
        return q;
    }
    auto stack = io::read_stack(path);
    if (!weights) weights = cached_weights(p);
    if (stack_out != nullptr) *stack_out = stack;
    return quantiles_for_stack(stack, p, *weights,
                               std::filesystem::path(path).stem().string());
}

int cmd_weights(const CommonOpts& opts, const std::string& out_path) {
    const auto p = make_params(opts);
    const auto w = precompute_weights(p.centers, p.work, p.effective_range(), p.threads);
    const auto path = out_path.empty()
                          ? cache_dir() + "/wgt_" +
                                hex64(io::weight_digest(p.centers, p.work, p.effective_range(),
                                                        p.flat_kernel)) +
                                ".bin"
                          : out_path;
    io::write_weights(w, path);
    std::printf("centers: %zu\n", w.center_count());
    std::printf("mean nonzeros per center: %.2f\n", w.mean_entries_per_center());
    std::printf("weights: %s\n", path.c_str());
    return 0;
}

int cmd_slice(const CommonOpts& opts, const std::string& stack_path,
              const std::string& weights_path, const std::string& out_path,
              const std::string& name) {
    const auto p = make_params(opts);
    SparseWeightSet weights;
    if (!weights_path.empty()) {
        weights = io::read_weights(weights_path);
        check_weights_match(weights, p);
    } else {
        weights = cached_weights(p);
    }
    const auto stack = io::read_stack(stack_path);
    auto q = quantiles_for_stack(
        stack, p, weights,
        name.empty() ? std::filesystem::path(stack_path).stem().string() : name);
    const auto path =
        out_path.empty()
            ? cache_dir() + "/qnt_" +
                  hex64(io::quantile_digest(p.centers, p.work, p.effective_range(),
                                            p.flat_kernel, p.r, p.quantiles)) +
                  "_" + q.dataset + ".bin"
            : out_path;
    io::write_quantile_cache(q, path);
    std::printf("dataset: %s\n", q.dataset.c_str());
    std::printf("slices: %" PRIu64 "\n", q.total_slices);
    std::printf("missing slices: %" PRIu64 "\n", q.missing_slices);
    std::printf("quantile cache: %s\n", path.c_str());
    return 0;
}

int cmd_distance(const CommonOpts& opts, const std::string& a_path, const std::string& b_path,
                 bool baseline, const std::string& map_out, const std::string& image_out,
                 double image_min, double image_max) {
    const auto p = make_params(opts);
    std::optional<SparseWeightSet> weights;
    FieldStack stack_a, stack_b;
    const bool a_is_stack = !file_has_magic(a_path, "SCWDQNT");
    const bool b_is_stack = !file_has_magic(b_path, "SCWDQNT");
    const auto qa = load_operand(a_path, p, weights, &stack_a);
    const auto qb = load_operand(b_path, p, weights, &stack_b);
    const auto res = scwd_from_quantiles(qa, qb, p);
    std::printf("scwd %.12g\n", res.scwd);
    if (baseline) {
        if (!a_is_stack || !b_is_stack) {
            throw InvalidArgumentError("--baseline requires stack operands (global means are "
                                       "not recoverable from quantile caches)");
        }
        const auto wa = regrid_nearest(stack_a, p.work);
        const auto wb = regrid_nearest(stack_b, p.work);
        std::printf("gmwd %.12g\n", gmwd(wa, wb, p.r, p.quantiles, p.strict_paper_scaling));
    }
    if (!map_out.empty()) io::write_map(res.map, map_out);
    if (!image_out.empty()) {
        double hi = image_max;
        if (hi <= image_min) {
            hi = image_min;
            for (const double v : res.map.values) {
                if (!is_missing(v)) hi = std::max(hi, v);
            }
            if (hi <= image_min) hi = image_min + 1.0;
        }
        io::write_map_image(res.map, image_out, image_min, hi);
    }
    return 0;
}

int cmd_rank(const CommonOpts& opts, const std::string& ref_path,
             const std::vector<std::string>& cand_paths, const std::vector<double>& extra_ranges,
             bool baseline, const std::string& csv_out) {
    const auto base_params = make_params(opts);

    // All parameter sets share the quantile grid and order; only the range
    // varies across columns.
    std::vector<ScwdParams> param_sets{base_params};
    for (const double rg : extra_ranges) {
        if (rg == base_params.range_km && !base_params.flat_kernel) continue;
        ScwdParams p = base_params;
        p.flat_kernel = false;
        p.range_km = rg;
        p.validate();
        param_sets.push_back(std::move(p));
    }

    const auto ref_stack = io::read_stack(ref_path);
    const auto ref_name = std::filesystem::path(ref_path).stem().string();

    // Reference is sliced once per parameter set (the compute-once structure
    // of the pipeline), candidates once per parameter set each.
    std::vector<SparseWeightSet> weights;
    std::vector<SlicedQuantiles> ref_q;
    for (const auto& p : param_sets) {
        weights.push_back(precompute_weights(p.centers, p.work, p.effective_range(), p.threads));
        ref_q.push_back(quantiles_for_stack(ref_stack, p, weights.back(), ref_name));
    }
    const FieldStack ref_on_work = regrid_nearest(ref_stack, base_params.work);

    struct Row {
        std::string name;
        std::vector<double> scwd;  // one per parameter set
        double gmwd = 0.0;
        std::string error;
    };
    std::vector<Row> rows;
    bool any_failed = false;
    for (const auto& path : cand_paths) {
        Row row;
        row.name = std::filesystem::path(path).stem().string();
        try {
            const auto cand = io::read_stack(path);
            for (std::size_t k = 0; k < param_sets.size(); ++k) {
                const auto cq = quantiles_for_stack(cand, param_sets[k], weights[k], row.name);
                row.scwd.push_back(scwd_from_quantiles(ref_q[k], cq, param_sets[k]).scwd);
            }
            if (baseline) {
                row.gmwd = gmwd(ref_on_work, regrid_nearest(cand, base_params.work),
                                base_params.r, base_params.quantiles,
                                base_params.strict_paper_scaling);
            }
        } catch (const Error& e) {
            row.error = e.what();
            any_failed = true;
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.error.empty() != b.error.empty()) return a.error.empty();
        if (a.error.empty() && a.scwd[0] != b.scwd[0]) return a.scwd[0] < b.scwd[0];
        return a.name < b.name;
    });

    std::printf("reference: %s\n", ref_name.c_str());
    std::printf("%-6s%-28s", "rank", "name");
    for (std::size_t k = 0; k < param_sets.size(); ++k) {
        const auto& p = param_sets[k];
        const std::string col =
            p.flat_kernel ? "scwd[flat]" : "scwd[" + std::to_string(int(p.range_km)) + "km]";
        std::printf("%-18s", col.c_str());
    }
    if (baseline) std::printf("%-18s", "gmwd");
    std::printf("\n");
    std::ofstream csv;
    if (!csv_out.empty()) {
        csv.open(csv_out);
        if (!csv) throw DataFormatError("cannot open for writing: " + csv_out);
        csv << "rank,name";
        for (const auto& p : param_sets) {
            csv << (p.flat_kernel ? ",scwd_flat"
                                  : ",scwd_" + std::to_string(int(p.range_km)) + "km");
        }
        if (baseline) csv << ",gmwd";
        csv << "\n";
    }
    int rank = 0;
    for (const auto& row : rows) {
        ++rank;
        if (!row.error.empty()) {
            std::printf("%-6s%-28sFAILED: %s\n", "-", row.name.c_str(), row.error.c_str());
            if (csv.is_open()) csv << "-," << row.name << ",FAILED\n";
            continue;
        }
        std::printf("%-6d%-28s", rank, row.name.c_str());
        for (const double v : row.scwd) std::printf("%-18.10g", v);
        if (baseline) std::printf("%-18.10g", row.gmwd);
        std::printf("\n");
        if (csv.is_open()) {
            csv << rank << ',' << row.name;
            char buf[32];
            for (const double v : row.scwd) {
                std::snprintf(buf, sizeof buf, "%.10g", v);
                csv << ',' << buf;
            }
            if (baseline) {
                std::snprintf(buf, sizeof buf, "%.10g", row.gmwd);
                csv << ',' << buf;
            }
            csv << "\n";
        }
    }
    return any_failed ? 3 : 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path, unsigned threads) {
    const auto spec = parse_synth_spec(spec_path);
    const auto stack = gen_stack(spec, threads);
    io::write_stack(stack, out_path);
    std::printf("wrote %zu timesteps on %zux%zu grid: %s\n", stack.timesteps(),
                stack.grid.n_lat(), stack.grid.n_lon(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical convolutional Wasserstein distance between gridded field samples"};
    app.require_subcommand(1);

    CommonOpts w_opts, s_opts, d_opts, r_opts;

    auto* weights_cmd = app.add_subcommand("weights", "precompute and cache slicing weights");
    add_common(weights_cmd, w_opts);
    std::string w_out;
    weights_cmd->add_option("--out", w_out, "output weight cache path");

    auto* slice_cmd = app.add_subcommand("slice", "slice one stack into a quantile cache");
    add_common(slice_cmd, s_opts);
    std::string s_stack, s_weights, s_out, s_name;
    slice_cmd->add_option("--stack", s_stack, "input field stack")->required();
    slice_cmd->add_option("--weights", s_weights, "weight cache (computed if omitted)");
    slice_cmd->add_option("--out", s_out, "output quantile cache path");
    slice_cmd->add_option("--name", s_name, "dataset label");

    auto* dist_cmd = app.add_subcommand("distance", "SCWD between two stacks or quantile caches");
    add_common(dist_cmd, d_opts);
    std::string d_a, d_b, d_map, d_image;
    bool d_baseline = false;
    double d_imin = 0.0, d_imax = 0.0;
    dist_cmd->add_option("--a", d_a, "first operand (stack or quantile cache)")->required();
    dist_cmd->add_option("--b", d_b, "second operand")->required();
    dist_cmd->add_flag("--baseline", d_baseline, "also print the global-mean WD");
    dist_cmd->add_option("--map-out", d_map, "write the local WD map grid file");
    dist_cmd->add_option("--image-out", d_image, "write a P6 pixmap of the local WD map");
    dist_cmd->add_option("--image-min", d_imin, "color scale lower bound");
    dist_cmd->add_option("--image-max", d_imax, "color scale upper bound (default: map max)");

    auto* rank_cmd = app.add_subcommand("rank", "rank candidate stacks against a reference");
    add_common(rank_cmd, r_opts);
    std::string r_ref, r_csv;
    std::vector<std::string> r_cands;
    std::vector<double> r_ranges;
    bool r_baseline = false;
    rank_cmd->add_option("--reference", r_ref, "reference stack")->required();
    rank_cmd->add_option("--candidate", r_cands, "candidate stack (repeatable)")->required();
    rank_cmd->add_option("--ranges", r_ranges, "additional range columns in km")->delimiter(',');
    rank_cmd->add_flag("--baseline", r_baseline, "add a gmwd column");
    rank_cmd->add_option("--csv-out", r_csv, "also write the table as CSV");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic stack from a spec file");
    std::string sy_spec, sy_out;
    unsigned sy_threads = 0;
    synth_cmd->add_option("--spec", sy_spec, "key=value spec file")->required();
    synth_cmd->add_option("--out", sy_out, "output stack path")->required();
    synth_cmd->add_option("--threads", sy_threads, "worker threads");

    try {
        app.parse(argc, argv);
        if (weights_cmd->parsed()) return cmd_weights(w_opts, w_out);
        if (slice_cmd->parsed()) return cmd_slice(s_opts, s_stack, s_weights, s_out, s_name);
        if (dist_cmd->parsed()) {
            return cmd_distance(d_opts, d_a, d_b, d_baseline, d_map, d_image, d_imin, d_imax);
        }
        if (rank_cmd->parsed()) {
            return cmd_rank(r_opts, r_ref, r_cands, r_ranges, r_baseline, r_csv);
        }
        if (synth_cmd->parsed()) return cmd_synth(sy_spec, sy_out, sy_threads);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const DataFormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
