#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "hsiu/cube.hpp"

namespace hsiu {

enum class SparseKind { impulse, stripes, both };

std::string to_string(SparseKind kind);
SparseKind parse_sparse_kind(const std::string& text);

/// Declarative description of a noise realization; together with the clean cube it
/// determines the noisy cube bit for bit.
struct NoiseSpec {
    double gaussian_sigma = 0.0;
    double sparse_fraction = 0.0;  ///< per-element impulse probability p
    SparseKind sparse_kind = SparseKind::impulse;
    double stripe_fraction = 0.0;  ///< fraction of columns striped in each band
    double stripe_amplitude = 0.0;
    std::uint64_t seed = 0;

    /// Throws DomainError on out-of-range fields.
    void validate() const;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Plain-text sidecar, one key=value per line.
std::string to_key_value(const NoiseSpec& spec);
NoiseSpec parse_key_value(const std::string& text);

/// clean + i.i.d. N(0, sigma^2); no clipping.
HsiCube add_gaussian(const HsiCube& clean, double sigma, std::uint64_t seed);

/// Salt-and-pepper: each element is replaced with probability p by 0 or 1 (equal odds).
HsiCube add_impulse(const HsiCube& clean, double p, std::uint64_t seed);

/// In every band, round(stripe_fraction * N) distinct columns get an additive offset drawn
/// uniformly from [-amplitude, amplitude], constant down the column.
HsiCube add_stripes(const HsiCube& clean, double stripe_fraction, double amplitude,
                    std::uint64_t seed);

/// Applies a full spec: Gaussian, then impulse (if kind has impulse), then stripes (if kind has
/// stripes).
HsiCube apply_noise(const HsiCube& clean, const NoiseSpec& spec);

/// Spec of the four benchmark cases: sigma = 0.2 with impulse p in {0, 0.05, 0.1, 0.15}.
NoiseSpec case_spec(int case_id, std::uint64_t seed);

/// Gaussian then impulse with the case's parameters. Throws DomainError for unknown cases.
std::pair<HsiCube, NoiseSpec> synthesize_case(const HsiCube& clean, int case_id,
                                              std::uint64_t seed);

}  // namespace hsiu
