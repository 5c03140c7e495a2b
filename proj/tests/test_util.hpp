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

// Test-only oracles. Nothing here calls into the code paths it is used to check:
// the collapse oracle walks outcomes with explicit Born factors, and the
// quadrature oracle integrates the pointer wavefunction written out longhand.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "cheshire/qstate.hpp"

namespace cheshire::oracle {

inline Ket random_ket(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Ket::Amplitudes a{};
    for (auto &z : a) {
        z = Complex(n(rng), n(rng));
    }
    return Ket(a).normalized_copy();
}

inline Operator random_operator(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Operator op;
    for (std::size_t r = 0; r < kDim; ++r) {
        for (std::size_t c = 0; c < kDim; ++c) {
            op(r, c) = Complex(n(rng), n(rng));
        }
    }
    return op;
}

/// Sequential-measurement oracle: for every eigenvalue tuple, collapse step by
/// step, multiply Born probabilities, then multiply by the post-selection
/// probability; finally condition on post-selection success.
inline std::map<std::vector<double>, double> collapse_oracle(const std::vector<SpectralObservable> &obs,
                                                            const Ket &pre, const Ket &post) {
    std::map<std::vector<double>, double> joint;
    std::size_t combos = 1;
    for (const auto &o : obs) {
        combos *= o.branches.size();
    }
    for (std::size_t code = 0; code < combos; ++code) {
        std::vector<std::size_t> idx(obs.size());
        std::size_t rest = code;
        for (std::size_t k = obs.size(); k-- > 0;) {
            idx[k] = rest % obs[k].branches.size();
            rest /= obs[k].branches.size();
        }
        std::vector<double> tuple;
        std::array<Complex, kDim> state = pre.amplitudes();
        double prob = 1.0;
        for (std::size_t k = 0; k < obs.size(); ++k) {
            const auto &b = obs[k].branches[idx[k]];
            tuple.push_back(b.eigenvalue);
            std::array<Complex, kDim> projected{};
            for (std::size_t r = 0; r < kDim; ++r) {
                for (std::size_t c = 0; c < kDim; ++c) {
                    projected[r] += b.projector(r, c) * state[c];
                }
            }
            double born = 0.0;
            for (auto z : projected) {
                born += std::norm(z);
            }
            prob *= born;
            if (born > 0.0) {
                for (std::size_t r = 0; r < kDim; ++r) {
                    state[r] = projected[r] / std::sqrt(born);
                }
            }
        }
        Complex overlap = 0.0;
        for (std::size_t r = 0; r < kDim; ++r) {
            overlap += std::conj(post[r]) * state[r];
        }
        joint[tuple] += prob * std::norm(overlap);
    }
    double total = 0.0;
    for (const auto &[t, p] : joint) {
        total += p;
    }
    for (auto &[t, p] : joint) {
        p /= total;
    }
    return joint;
}

/// Longhand pointer mixture for quadrature: weights, per-branch displacements
/// (one or two axes), common width.
struct QuadMixture {
    std::vector<Complex> weights;
    std::vector<std::vector<double>> displacements;
    double width;
};

inline double raw_density(const QuadMixture &m, const std::vector<double> &x) {
    Complex psi = 0.0;
    const double s = m.width;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        double e = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            double u = x[a] - m.displacements[i][a];
            e += u * u;
        }
        psi += m.weights[i] * std::exp(-e / (4.0 * s * s));
    }
    return std::norm(psi);
}

struct QuadMoments {
    double mass;
    std::vector<double> mean;
    std::vector<double> variance;
};

/// Trapezoid grid over [min d - 8s, max d + 8s] per axis, step s/50.
inline QuadMoments quadrature_moments(const QuadMixture &m, std::size_t dims) {
    const double s = m.width;
    const double h = s / 50.0;
    std::vector<double> lo(dims, 1e300), hi(dims, -1e300);
    for (const auto &d : m.displacements) {
        for (std::size_t a = 0; a < dims; ++a) {
            lo[a] = std::min(lo[a], d[a] - 8.0 * s);
            hi[a] = std::max(hi[a], d[a] + 8.0 * s);
        }
    }
    std::vector<std::size_t> n(dims);
    for (std::size_t a = 0; a < dims; ++a) {
        n[a] = static_cast<std::size_t>(std::ceil((hi[a] - lo[a]) / h)) + 1;
    }
    double z = 0.0;
    std::vector<double> m1(dims, 0.0), m2(dims, 0.0);
    std::vector<double> x(dims);
    auto visit = [&](double w) {
        double p = raw_density(m, x) * w;
        z += p;
        for (std::size_t a = 0; a < dims; ++a) {
            m1[a] += p * x[a];
            m2[a] += p * x[a] * x[a];
        }
    };
    auto edge = [](std::size_t i, std::size_t count) { return (i == 0 || i + 1 == count) ? 0.5 : 1.0; };
    if (dims == 1) {
        for (std::size_t i = 0; i < n[0]; ++i) {
            x[0] = lo[0] + h * static_cast<double>(i);
            visit(edge(i, n[0]));
        }
    } else {
        for (std::size_t i = 0; i < n[0]; ++i) {
            x[0] = lo[0] + h * static_cast<double>(i);
            for (std::size_t j = 0; j < n[1]; ++j) {
                x[1] = lo[1] + h * static_cast<double>(j);
                visit(edge(i, n[0]) * edge(j, n[1]));
            }
        }
    }
    QuadMoments out;
    double cell = std::pow(h, static_cast<double>(dims));
    // Normalization of |G|^2 with G = exp(-u^2/4s^2): sqrt(2 pi) s per axis.
    out.mass = z * cell / std::pow(std::sqrt(2.0 * std::numbers::pi) * s, static_cast<double>(dims));
    for (std::size_t a = 0; a < dims; ++a) {
        double mean = m1[a] / z;
        out.mean.push_back(mean);
        out.variance.push_back(m2[a] / z - mean * mean);
    }
    return out;
}

}  // namespace cheshire::oracle
