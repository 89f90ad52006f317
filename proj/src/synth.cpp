#include "scwd/synth.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "scwd/errors.hpp"
#include "scwd/kernel.hpp"
#include "scwd/parallel.hpp"
#include "scwd/rng.hpp"

namespace scwd {

void SynthSpec::validate() const {
    if (timesteps == 0) throw InvalidArgumentError("SynthSpec: timesteps must be >= 1");
    if (noise_sd < 0.0) throw InvalidArgumentError("SynthSpec: negative noise_sd");
    if (smoothing_range_km && !(*smoothing_range_km > 0.0)) {
        throw InvalidArgumentError("SynthSpec: nonpositive smoothing range");
    }
    if (perturbation) {
        if (!(perturbation->sd_multiplier > 0.0)) {
            throw InvalidArgumentError("SynthSpec: cap sd multiplier must be > 0");
        }
        if (perturbation->radius_km < 0.0) {
            throw InvalidArgumentError("SynthSpec: negative cap radius");
        }
    }
    if (grid.lat.empty() || grid.lon.empty()) {
        throw InvalidArgumentError("SynthSpec: empty grid");
    }
}

FieldStack gen_stack(const SynthSpec& spec, unsigned threads) {
    spec.validate();
    const std::size_t n = spec.grid.cell_count();
    const std::size_t n_lon = spec.grid.n_lon();

    std::vector<double> base(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double lat = spec.grid.lat[c / n_lon];
        base[c] = spec.base == BaseMean::Constant
                      ? spec.base_value
                      : spec.base_value +
                            spec.zonal_slope * std::sin(lat * std::numbers::pi / 180.0);
    }

    std::vector<bool> in_cap(n, false);
    if (spec.perturbation) {
        for (std::size_t c = 0; c < n; ++c) {
            const double d = chordal_distance_km(
                spec.grid.lat[c / n_lon], spec.grid.lon[c % n_lon], spec.perturbation->lat_deg,
                spec.perturbation->lon_deg, spec.grid.radius_km);
            in_cap[c] = d <= spec.perturbation->radius_km;
        }
    }

    SparseWeightSet smooth_weights;
    const bool smooth = spec.smoothing_range_km.has_value() && spec.noise_sd > 0.0;
    if (smooth) {
        smooth_weights = precompute_weights(spec.grid, spec.grid, *spec.smoothing_range_km, threads);
    }

    FieldStack out;
    out.grid = spec.grid;
    out.variable = spec.variable;
    out.units = spec.units;
    out.timestamps.resize(spec.timesteps);
    for (std::size_t t = 0; t < spec.timesteps; ++t) {
        out.timestamps[t] = "t" + std::to_string(t);
    }
    out.values.resize(spec.timesteps * n);

    parallel_for(spec.timesteps, threads, [&](std::size_t t) {
        std::vector<double> noise(n, 0.0);
        if (spec.noise_sd > 0.0) {
            for (std::size_t c = 0; c < n; ++c) {
                noise[c] = spec.noise_sd *
                           rng::normal(spec.seed, 0, static_cast<std::uint64_t>(t) * n + c);
            }
            if (smooth) {
                std::vector<double> sm(n);
                for (std::size_t c = 0; c < n; ++c) {
                    sm[c] = slice_field(std::span<const double>(noise), smooth_weights.at(c));
                }
                noise.swap(sm);
            }
        }
        float* frame = out.frame(t);
        for (std::size_t c = 0; c < n; ++c) {
            double v = base[c] + noise[c];
            if (in_cap[c]) {
                v = base[c] + spec.perturbation->sd_multiplier * noise[c] +
                    spec.perturbation->mean_offset;
            }
            frame[c] = static_cast<float>(v);
        }
    });
    return out;
}

FieldStack shift_stack(const FieldStack& stack, double c) {
    FieldStack out = stack;
    for (auto& v : out.values) {
        if (!is_missing(v)) v = static_cast<float>(static_cast<double>(v) + c);
    }
    return out;
}

void add_cap_offset(FieldStack& stack, double lat_deg, double lon_deg, double radius_km,
                    double offset) {
    const std::size_t n = stack.grid.cell_count();
    const std::size_t n_lon = stack.grid.n_lon();
    std::vector<bool> in_cap(n);
    for (std::size_t c = 0; c < n; ++c) {
        in_cap[c] = chordal_distance_km(stack.grid.lat[c / n_lon], stack.grid.lon[c % n_lon],
                                        lat_deg, lon_deg, stack.grid.radius_km) <= radius_km;
    }
    for (std::size_t t = 0; t < stack.timesteps(); ++t) {
        float* frame = stack.frame(t);
        for (std::size_t c = 0; c < n; ++c) {
            if (in_cap[c] && !is_missing(frame[c])) {
                frame[c] = static_cast<float>(static_cast<double>(frame[c]) + offset);
            }
        }
    }
}

SynthSpec parse_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgumentError("parse_synth_spec: cannot open " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            // blank or comment-only lines are fine
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw InvalidArgumentError("parse_synth_spec: malformed line: " + line);
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    static const std::set<std::string> known = {
        "grid_nlat",       "grid_nlon",  "timesteps",          "seed",
        "mean",            "mean_value", "mean_slope",         "noise_sd",
        "smoothing_range_km", "cap_lat", "cap_lon",            "cap_radius_km",
        "cap_mean_offset", "cap_sd_multiplier", "variable",    "units"};
    for (const auto& [k, v] : kv) {
        if (!known.count(k)) {
            throw InvalidArgumentError("parse_synth_spec: unknown key " + k);
        }
    }

    auto need = [&](const std::string& k) {
        const auto it = kv.find(k);
        if (it == kv.end()) throw InvalidArgumentError("parse_synth_spec: missing key " + k);
        return it->second;
    };
    auto as_double = [&](const std::string& k, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw InvalidArgumentError("parse_synth_spec: bad number for " + k + ": " + v);
        }
    };
    auto as_u64 = [&](const std::string& k, const std::string& v) -> std::uint64_t {
        try {
            std::size_t pos = 0;
            const auto x = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw InvalidArgumentError("parse_synth_spec: bad integer for " + k + ": " + v);
        }
    };

    SynthSpec spec;
    spec.grid = make_center_grid(static_cast<std::size_t>(as_u64("grid_nlat", need("grid_nlat"))),
                                 static_cast<std::size_t>(as_u64("grid_nlon", need("grid_nlon"))));
    const auto t = as_u64("timesteps", need("timesteps"));
    if (t == 0) throw InvalidArgumentError("parse_synth_spec: timesteps must be >= 1");
    spec.timesteps = static_cast<std::size_t>(t);
    spec.seed = as_u64("seed", need("seed"));
    const std::string mean = kv.count("mean") ? kv["mean"] : "constant";
    if (mean == "constant") {
        spec.base = BaseMean::Constant;
    } else if (mean == "zonal") {
        spec.base = BaseMean::Zonal;
    } else {
        throw InvalidArgumentError("parse_synth_spec: mean must be constant or zonal");
    }
    if (kv.count("mean_value")) spec.base_value = as_double("mean_value", kv["mean_value"]);
    if (kv.count("mean_slope")) spec.zonal_slope = as_double("mean_slope", kv["mean_slope"]);
    if (kv.count("noise_sd")) spec.noise_sd = as_double("noise_sd", kv["noise_sd"]);
    if (kv.count("smoothing_range_km")) {
        spec.smoothing_range_km = as_double("smoothing_range_km", kv["smoothing_range_km"]);
    }
    if (kv.count("cap_radius_km")) {
        CapPerturbation cap;
        cap.lat_deg = as_double("cap_lat", need("cap_lat"));
        cap.lon_deg = as_double("cap_lon", need("cap_lon"));
        cap.radius_km = as_double("cap_radius_km", kv["cap_radius_km"]);
        if (kv.count("cap_mean_offset")) {
            cap.mean_offset = as_double("cap_mean_offset", kv["cap_mean_offset"]);
        }
        if (kv.count("cap_sd_multiplier")) {
            cap.sd_multiplier = as_double("cap_sd_multiplier", kv["cap_sd_multiplier"]);
        }
        spec.perturbation = cap;
    }
    if (kv.count("variable")) spec.variable = kv["variable"];
    if (kv.count("units")) spec.units = kv["units"];
    spec.validate();
    return spec;
}

}  // namespace scwd
