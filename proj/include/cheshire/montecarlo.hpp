// Copyright 2026 The Cheshire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Shot-by-shot simulation of the CCD experiment. Each photon is pre-selected,
// coupled to the configured pointers, sent through the output optics and
// detected at D1, D2 or D3. D1 shots carry a pointer readout drawn from the
// post-selected pointer density.
//
// Randomness is keyed per shot: shot k under seed S draws from its own
// SplitMix64 stream started at mix64(mix64(S) + k). Records therefore depend
// only on (experiment, seed, shot id), which makes any sharding of a run
// produce the same records. Uniforms use the top 53 bits of each output;
// normals use one Box-Muller pair per draw (the sine branch is discarded).

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cheshire/optics.hpp"
#include "cheshire/pointer.hpp"
#include "cheshire/postselect.hpp"
#include "cheshire/qstate.hpp"
#include "cheshire/result.hpp"

namespace cheshire {

inline constexpr const char *kRngAlgorithm = "splitmix64-per-shot-v1";

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
   public:
    explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {
    }

    static constexpr SplitMix64 for_shot(std::uint64_t seed, std::uint64_t shot_id) {
        return SplitMix64(mix64(mix64(seed) + shot_id));
    }

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double standard_normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    std::uint64_t state_;
};

struct Coupling {
    SpectralObservable observable;
    GaussianPointer pointer;
};

struct Experiment {
    std::string name;
    Ket pre;
    std::vector<Coupling> couplings;
    Circuit circuit = cheshire_circuit();
};

struct ShotRecord {
    std::uint64_t shot_id;
    Detector detector;
    /// Present iff detector == D1; one value per pointer, in coupling order.
    std::optional<std::vector<double>> readout;

    friend bool operator==(const ShotRecord &, const ShotRecord &) = default;
};

/// Everything the sampler needs, computed once per experiment.
struct PreparedExperiment {
    CoupledState coupled;
    Ket post;
    std::optional<PostSelectedPointer> selected;  // empty on null post-selection
    double p_d1 = 0.0;
    double p_d2 = 0.0;
    double p_d3 = 0.0;

    // Rejection envelope over the nonzero branches:
    //   |sum_i w_i G_i|^2 <= n * sum_i |w_i|^2 G_i^2   (Cauchy-Schwarz)
    // where each G_i^2 is a normal density of standard deviation s per axis.
    std::vector<Complex> env_weights;
    std::vector<std::vector<double>> env_displacements;
    std::vector<double> env_cumulative;
};

namespace detail {

/// sum_ij <b_j|Q|b_i> O_ij for an in-arm effect Q.
inline double branch_expectation(const CoupledState &c, const Operator &q) {
    std::vector<double> widths;
    for (const auto &p : c.pointers) {
        widths.push_back(p.width);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
        Ket qi = apply(q, c.branches[i].system);
        for (std::size_t j = 0; j < c.branches.size(); ++j) {
            double o = branch_overlap(c.branches[i].displacements, c.branches[j].displacements, widths);
            total += (inner(c.branches[j].system, qi) * o).real();
        }
    }
    return std::max(total, 0.0);
}

}  // namespace detail

inline Result<PreparedExperiment> prepare(const Experiment &experiment) {
    if (std::abs(experiment.pre.norm_squared() - 1.0) > kAlgebraTol) {
        return make_error(ErrorCode::UnnormalizedState, "pre-selected state must be normalized");
    }
    if (!experiment.circuit.detector_map_is_bijection()) {
        return make_error(ErrorCode::InvalidArgument, "detector map is not a bijection");
    }
    PreparedExperiment prep;
    prep.coupled = uncoupled(experiment.pre);
    for (const auto &c : experiment.couplings) {
        auto next = couple(prep.coupled, c.observable, c.pointer);
        if (!next) {
            return next.error();
        }
        prep.coupled = std::move(next).value();
    }
    prep.post = postselected_state(experiment.circuit);

    auto selected = postselect_pointer(prep.coupled, prep.post);
    if (selected) {
        prep.selected = std::move(selected).value();
        prep.p_d1 = std::min(prep.selected->success_probability, 1.0);
    } else if (selected.error().code != ErrorCode::NullPostSelection) {
        return selected.error();
    }

    // Rejected photons split between D2 and D3 per the optics.
    double r2 = detail::branch_expectation(prep.coupled, experiment.circuit.detector_effect(Detector::D2));
    double r3 = detail::branch_expectation(prep.coupled, experiment.circuit.detector_effect(Detector::D3));
    double rejected = 1.0 - prep.p_d1;
    if (r2 + r3 > 0.0) {
        prep.p_d2 = rejected * r2 / (r2 + r3);
        prep.p_d3 = rejected * r3 / (r2 + r3);
    } else {
        prep.p_d2 = rejected;
    }

    if (prep.selected) {
        const auto &m = prep.selected->mixture;
        double total = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (std::norm(m.weights[i]) > 0.0) {
                prep.env_weights.push_back(m.weights[i]);
                prep.env_displacements.push_back(m.displacements[i]);
                total += std::norm(m.weights[i]);
                prep.env_cumulative.push_back(total);
            }
        }
        for (double &c : prep.env_cumulative) {
            c /= total;
        }
    }
    return prep;
}

namespace detail {

inline std::vector<double> sample_readout(const PreparedExperiment &prep, SplitMix64 &rng) {
    const auto &m = prep.selected->mixture;
    const std::size_t n = prep.env_weights.size();
    const std::size_t dim = m.dimension();
    std::vector<double> x(dim);
    // Acceptance rate is success_probability / (n * sum |w|^2) > 0.
    for (std::uint64_t attempt = 0; attempt < 100'000'000ULL; ++attempt) {
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < n && u >= prep.env_cumulative[k]) {
            ++k;
        }
        for (std::size_t a = 0; a < dim; ++a) {
            x[a] = prep.env_displacements[k][a] + m.widths[a] * rng.standard_normal();
        }
        Complex amp = 0.0;
        double env = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double log_g = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                double d = x[a] - prep.env_displacements[i][a];
                log_g -= d * d / (4.0 * m.widths[a] * m.widths[a]);
            }
            double g = std::exp(log_g);
            amp += prep.env_weights[i] * g;
            env += std::norm(prep.env_weights[i]) * g * g;
        }
        env *= static_cast<double>(n);
        double target = std::norm(amp);
        assert(target <= env * (1.0 + 1e-12) + 1e-300);
        if (rng.uniform() * env <= target) {
            return x;
        }
    }
    throw std::logic_error("rejection sampler failed to accept");
}

inline ShotRecord sample_one(const PreparedExperiment &prep, std::uint64_t seed, std::uint64_t shot_id) {
    SplitMix64 rng = SplitMix64::for_shot(seed, shot_id);
    double u = rng.uniform();
    if (u < prep.p_d1) {
        return {shot_id, Detector::D1, sample_readout(prep, rng)};
    }
    if (u < prep.p_d1 + prep.p_d2) {
        return {shot_id, Detector::D2, std::nullopt};
    }
    return {shot_id, Detector::D3, std::nullopt};
}

}  // namespace detail

/// Shots with ids [first_id, first_id + count).
inline std::vector<ShotRecord> sample_range(const PreparedExperiment &prep, std::uint64_t first_id,
                                            std::uint64_t count, std::uint64_t seed) {
    std::vector<ShotRecord> out;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        out.push_back(detail::sample_one(prep, seed, first_id + k));
    }
    return out;
}

/// n shots with ids [0, n), split into `shards` contiguous ranges sampled on
/// separate threads. The result does not depend on `shards`.
inline Result<std::vector<ShotRecord>> sample_shots(const Experiment &experiment, std::uint64_t n,
                                                    std::uint64_t seed, unsigned shards = 1) {
    if (n == 0) {
        return make_error(ErrorCode::InvalidArgument, "shot count must be >= 1");
    }
    if (shards == 0) {
        return make_error(ErrorCode::InvalidArgument, "shard count must be >= 1");
    }
    auto prep = prepare(experiment);
    if (!prep) {
        return prep.error();
    }
    if (shards == 1) {
        return sample_range(*prep, 0, n, seed);
    }
    std::vector<std::vector<ShotRecord>> parts(shards);
    std::vector<std::thread> workers;
    const PreparedExperiment &p = *prep;
    for (unsigned k = 0; k < shards; ++k) {
        std::uint64_t begin = n * k / shards;
        std::uint64_t end = n * (k + 1) / shards;
        workers.emplace_back([&parts, &p, k, begin, end, seed] {
            parts[k] = sample_range(p, begin, end - begin, seed);
        });
    }
    for (auto &w : workers) {
        w.join();
    }
    std::vector<ShotRecord> out;
    out.reserve(n);
    for (auto &part : parts) {
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

/// Single-pass mean/variance accumulator; merge() combines partial results.
struct MomentAccumulator {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const MomentAccumulator &o) {
        if (o.count == 0) {
            return;
        }
        std::uint64_t total = count + o.count;
        double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) /
                         static_cast<double>(total);
        count = total;
    }

    double sample_variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
    double standard_error() const {
        return count > 1 ? std::sqrt(sample_variance() / static_cast<double>(count)) : 0.0;
    }
};

struct AxisEstimate {
    Axis axis;
    std::string observable;
    double coupling;
    double mean;
    double standard_error;
    std::optional<double> mean_over_coupling;  // absent when coupling == 0
};

struct SummaryStats {
    std::string experiment;
    std::uint64_t n_shots = 0;
    std::uint64_t d1 = 0;
    std::uint64_t d2 = 0;
    std::uint64_t d3 = 0;
    double post_rate = 0.0;
    std::vector<AxisEstimate> axes;
};

inline Result<SummaryStats> estimate(const std::vector<ShotRecord> &records, const Experiment &experiment) {
    if (records.empty()) {
        return make_error(ErrorCode::InvalidArgument, "no records");
    }
    SummaryStats stats;
    stats.experiment = experiment.name;
    stats.n_shots = records.size();
    std::vector<MomentAccumulator> acc(experiment.couplings.size());
    for (const auto &r : records) {
        switch (r.detector) {
            case Detector::D1:
                ++stats.d1;
                if (r.readout) {
                    for (std::size_t a = 0; a < acc.size() && a < r.readout->size(); ++a) {
                        acc[a].add((*r.readout)[a]);
                    }
                }
                break;
            case Detector::D2:
                ++stats.d2;
                break;
            case Detector::D3:
                ++stats.d3;
                break;
        }
    }
    stats.post_rate = static_cast<double>(stats.d1) / static_cast<double>(stats.n_shots);
    if (stats.d1 < 2) {
        return make_error(ErrorCode::InsufficientData, "fewer than 2 post-selected shots");
    }
    for (std::size_t a = 0; a < acc.size(); ++a) {
        const auto &c = experiment.couplings[a];
        AxisEstimate e{c.pointer.axis, c.observable.name, c.pointer.coupling, acc[a].mean,
                       acc[a].standard_error(), std::nullopt};
        if (c.pointer.coupling > 0.0) {
            e.mean_over_coupling = acc[a].mean / c.pointer.coupling;
        }
        stats.axes.push_back(e);
    }
    return stats;
}

}  // namespace cheshire
