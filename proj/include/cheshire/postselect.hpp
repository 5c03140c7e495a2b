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

// Statistics of a pre- and post-selected photon: weak values, conditional
// (ABL) probabilities of intermediate projective measurements, sequences of
// such measurements, and state collapse.

#include <cmath>
#include <map>
#include <vector>

#include "cheshire/qstate.hpp"
#include "cheshire/result.hpp"

namespace cheshire {

using OutcomeTuple = std::vector<double>;

struct ConditionalDistribution {
    /// Every eigenvalue tuple, including those with zero conditional probability.
    std::map<OutcomeTuple, double> outcomes;
    /// Probability that the post-selection succeeds with the measurements in place.
    double success_probability = 0.0;

    double probability(const OutcomeTuple &tuple) const {
        auto it = outcomes.find(tuple);
        return it == outcomes.end() ? 0.0 : it->second;
    }
};

namespace detail {

inline bool near_unit(const Ket &k) {
    return k.finite() && std::abs(k.norm_squared() - 1.0) <= kAlgebraTol;
}

}  // namespace detail

/// <post|A|pre> / <post|pre>
inline Result<Complex> weak_value(const Operator &a, const Ket &pre, const Ket &post) {
    const Complex overlap = inner(post, pre);
    if (std::abs(overlap) < kAlgebraTol) {
        return make_error(ErrorCode::OrthogonalSelection,
                          "pre- and post-selected states are orthogonal");
    }
    return inner(post, apply(a, pre)) / overlap;
}

inline Result<Complex> weak_value(const SpectralObservable &obs, const Ket &pre, const Ket &post) {
    return weak_value(obs.as_operator(), pre, post);
}

/// Joint outcome (a1..ak) of measuring obs_list in order between pre and post gets
/// probability proportional to |<post| P_ak ... P_a1 |pre>|^2.
inline Result<ConditionalDistribution> sequential_distribution(
    const std::vector<SpectralObservable> &obs_list, const Ket &pre, const Ket &post) {
    if (obs_list.empty()) {
        return make_error(ErrorCode::InvalidArgument, "observable list is empty");
    }
    if (!detail::near_unit(pre) || !detail::near_unit(post)) {
        return make_error(ErrorCode::UnnormalizedState, "pre and post must be normalized");
    }

    struct Partial {
        OutcomeTuple tuple;
        Ket state;
    };
    std::vector<Partial> frontier{{{}, pre}};
    for (const auto &obs : obs_list) {
        std::vector<Partial> next;
        next.reserve(frontier.size() * obs.size());
        for (const auto &p : frontier) {
            for (const auto &b : obs.branches) {
                OutcomeTuple t = p.tuple;
                t.push_back(b.eigenvalue);
                next.push_back({std::move(t), apply(b.projector, p.state)});
            }
        }
        frontier = std::move(next);
    }

    ConditionalDistribution dist;
    double total = 0.0;
    for (const auto &p : frontier) {
        double numerator = std::norm(inner(post, p.state));
        dist.outcomes[p.tuple] += numerator;
        total += numerator;
    }
    if (total < kAlgebraTol * kAlgebraTol) {
        return make_error(ErrorCode::NoValidHistory,
                          "post-selection cannot succeed with these measurements in place");
    }
    for (auto &[tuple, prob] : dist.outcomes) {
        prob /= total;
    }
    dist.success_probability = total;
    return dist;
}

/// Single-measurement case; outcome keys are one-element tuples.
inline Result<ConditionalDistribution> abl_distribution(const SpectralObservable &obs,
                                                        const Ket &pre, const Ket &post) {
    return sequential_distribution({obs}, pre, post);
}

/// Normalized projection of state onto the eigenspace of outcome.
inline Result<Ket> collapse(const SpectralObservable &obs, double outcome, const Ket &state) {
    auto projector = obs.projector_for(outcome);
    if (!projector) {
        return make_error(ErrorCode::ImpossibleOutcome, "eigenvalue not in spectrum");
    }
    Ket projected = apply(*projector, state);
    if (projected.norm() < kAlgebraTol) {
        return make_error(ErrorCode::ImpossibleOutcome, "outcome has zero probability");
    }
    return projected.normalized_copy();
}

}  // namespace cheshire
