#ifndef SCWD_SYNTH_HPP
#define SCWD_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "scwd/field.hpp"

namespace scwd {

struct CapPerturbation {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double radius_km = 0.0;     // chordal cap radius
    double mean_offset = 0.0;
    double sd_multiplier = 1.0; // scales the noise component inside the cap
};

enum class BaseMean {
    Constant,  // mean(lat) = value
    Zonal,     // mean(lat) = value + slope * sin(lat)
};

struct SynthSpec {
    LatLonGrid grid;
    std::size_t timesteps = 1;
    std::uint64_t seed = 0;
    BaseMean base = BaseMean::Constant;
    double base_value = 0.0;
    double zonal_slope = 0.0;
    double noise_sd = 0.0;
    std::optional<double> smoothing_range_km;
    std::optional<CapPerturbation> perturbation;
    std::string variable = "synthetic";
    std::string units = "1";

    void validate() const;  // throws InvalidArgumentError
};

// Deterministic ensemble generation: per timestep, field = base mean +
// (optionally kernel-smoothed) white noise, then the cap perturbation.
// Identical specs give bitwise-identical stacks at any thread count.
FieldStack gen_stack(const SynthSpec& spec, unsigned threads = 0);

// Adds c to every non-missing cell.
FieldStack shift_stack(const FieldStack& stack, double c);

// Adds `offset` inside the chordal cap, in place. Used to build fixtures
// with localized biases.
void add_cap_offset(FieldStack& stack, double lat_deg, double lon_deg,
                    double radius_km, double offset);

// Plain key=value spec files consumed by the CLI `synth` command.
SynthSpec parse_synth_spec(const std::string& path);

}  // namespace scwd

#endif
