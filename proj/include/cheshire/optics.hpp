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

// The Mach-Zehnder apparatus: beam splitters, a half-wave plate in arm 2, a
// polarising beam splitter and three detectors. A D1 click post-selects the
// in-arm state (|1>|H> + |2>|V>)/sqrt2.
//
// All elements act on the same 4-dimensional mode space. Inside the
// interferometer the path index is the arm; after the output beam splitter
// it is the port (arm 1 slot = left, arm 2 slot = right); after the PBS the
// polarisation index is linear (+ slot = H, - slot = V).

#include <map>
#include <string>
#include <vector>

#include "cheshire/qstate.hpp"
#include "cheshire/result.hpp"

namespace cheshire {

enum class ElementKind { BeamSplitterIn, HalfWavePlate, BeamSplitterOut, PolarisingBS };

struct OpticalElement {
    ElementKind kind;
    Arm arm = Arm::Two;  // only meaningful for HalfWavePlate

    static OpticalElement beam_splitter_in() {
        return {ElementKind::BeamSplitterIn};
    }
    static OpticalElement half_wave_plate(Arm arm) {
        return {ElementKind::HalfWavePlate, arm};
    }
    static OpticalElement beam_splitter_out() {
        return {ElementKind::BeamSplitterOut};
    }
    static OpticalElement polarising_bs() {
        return {ElementKind::PolarisingBS};
    }
};

enum class Detector { D1, D2, D3 };

inline const char *detector_name(Detector d) {
    switch (d) {
        case Detector::D1:
            return "D1";
        case Detector::D2:
            return "D2";
        case Detector::D3:
            return "D3";
    }
    return "?";
}

inline constexpr Detector kAllDetectors[] = {Detector::D1, Detector::D2, Detector::D3};

/// The three physical output modes after the PBS. The right port is not split by polarisation.
enum class OutputMode { LeftH, LeftV, Right };

inline Operator output_mode_projector(OutputMode mode) {
    switch (mode) {
        case OutputMode::LeftH:
            return basis_projector({Arm::One, Polarisation::Plus});
        case OutputMode::LeftV:
            return basis_projector({Arm::One, Polarisation::Minus});
        case OutputMode::Right:
            return arm_projector(Arm::Two);
    }
    return Operator::zero();
}

namespace detail {

// Real balanced mixer on the path index: |1> -> (|1>+|2>)/sqrt2, |2> -> (|1>-|2>)/sqrt2,
// identity on polarisation.
inline Operator path_mixer() {
    Operator op;
    for (std::size_t p = 0; p < 2; ++p) {
        op(0 + p, 0 + p) = kInvSqrt2;
        op(0 + p, 2 + p) = kInvSqrt2;
        op(2 + p, 0 + p) = kInvSqrt2;
        op(2 + p, 2 + p) = -kInvSqrt2;
    }
    return op;
}

// Circular -> linear polarisation basis change in both ports.
inline Operator circular_to_linear() {
    Operator op;
    for (std::size_t base : {0u, 2u}) {
        op(base + 0, base + 0) = kInvSqrt2;
        op(base + 0, base + 1) = kInvSqrt2;
        op(base + 1, base + 0) = kInvSqrt2;
        op(base + 1, base + 1) = -kInvSqrt2;
    }
    return op;
}

}  // namespace detail

inline Operator element_unitary(const OpticalElement &e) {
    switch (e.kind) {
        case ElementKind::BeamSplitterIn:
        case ElementKind::BeamSplitterOut:
            return detail::path_mixer();
        case ElementKind::HalfWavePlate: {
            // H <-> V in one arm is diag(1, -1) on the circular basis of that arm.
            std::array<Complex, kDim> d{1.0, 1.0, 1.0, 1.0};
            d[BasisLabel{e.arm, Polarisation::Minus}.index()] = -1.0;
            return Operator::diagonal(d);
        }
        case ElementKind::PolarisingBS:
            return detail::circular_to_linear();
    }
    return Operator::identity();
}

struct Circuit {
    std::vector<OpticalElement> elements;
    std::map<OutputMode, Detector> detectors;

    /// Product of element unitaries, first element applied first.
    Operator unitary() const {
        Operator u = Operator::identity();
        for (const auto &e : elements) {
            u = element_unitary(e) * u;
        }
        return u;
    }

    bool detector_map_is_bijection() const {
        if (detectors.size() != 3) {
            return false;
        }
        std::map<Detector, int> seen;
        for (const auto &[mode, det] : detectors) {
            ++seen[det];
        }
        return seen.size() == 3;
    }

    Operator detector_projector(Detector d) const {
        Operator p;
        for (const auto &[mode, det] : detectors) {
            if (det == d) {
                p = p + output_mode_projector(mode);
            }
        }
        return p;
    }

    /// U^dagger P_d U: the in-arm projector whose expectation is the click probability of d.
    Operator detector_effect(Detector d) const {
        Operator u = unitary();
        return u.adjoint() * detector_projector(d) * u;
    }
};

/// Half-wave plate in arm 2, output beam splitter, PBS. Left H -> D1, left V -> D3, right -> D2.
inline Circuit cheshire_circuit() {
    return Circuit{
        {OpticalElement::half_wave_plate(Arm::Two), OpticalElement::beam_splitter_out(),
         OpticalElement::polarising_bs()},
        {{OutputMode::LeftH, Detector::D1},
         {OutputMode::LeftV, Detector::D3},
         {OutputMode::Right, Detector::D2}},
    };
}

/// Horizontally polarised photon entering input port 1 of the first beam splitter.
inline Ket source_state() {
    Ket in = horizontal(Arm::One);
    return apply(element_unitary(OpticalElement::beam_splitter_in()), in).normalized_copy();
}

/// The in-arm state that reaches the given output mode with certainty. For the
/// unsplit right port this is the preimage of its H component.
inline Ket mode_preimage(const Circuit &circuit, OutputMode mode) {
    Ket e = basis_ket(mode == OutputMode::LeftH   ? BasisLabel{Arm::One, Polarisation::Plus}
                      : mode == OutputMode::LeftV ? BasisLabel{Arm::One, Polarisation::Minus}
                                                  : BasisLabel{Arm::Two, Polarisation::Plus});
    return apply(circuit.unitary().adjoint(), e).normalized_copy();
}

/// State post-selected inside the arms by a D1 click.
inline Ket postselected_state(const Circuit &circuit = cheshire_circuit()) {
    for (const auto &[mode, det] : circuit.detectors) {
        if (det == Detector::D1) {
            return mode_preimage(circuit, mode);
        }
    }
    return Ket();
}

struct DetectionResult {
    std::map<Detector, double> probabilities;
    /// Normalized output-mode state conditioned on each click (absent when probability is 0).
    std::map<Detector, Ket> conditional_states;
    /// The conditional states propagated back inside the interferometer.
    std::map<Detector, Ket> traced_back;
};

inline Result<DetectionResult> run_interferometer(const Ket &state_inside,
                                                  const Circuit &circuit = cheshire_circuit()) {
    if (!state_inside.finite() || std::abs(state_inside.norm_squared() - 1.0) > kAlgebraTol) {
        return make_error(ErrorCode::UnnormalizedState,
                          "interferometer input must be a normalized state");
    }
    if (!circuit.detector_map_is_bijection()) {
        return make_error(ErrorCode::InvalidArgument, "detector map is not a bijection");
    }
    const Operator u = circuit.unitary();
    const Ket out = apply(u, state_inside);
    DetectionResult result;
    for (Detector d : kAllDetectors) {
        Ket projected = apply(circuit.detector_projector(d), out);
        double p = projected.norm_squared();
        result.probabilities[d] = p;
        if (p > kAlgebraTol) {
            Ket conditional = projected.normalized_copy();
            result.conditional_states[d] = conditional;
            result.traced_back[d] = apply(u.adjoint(), conditional).normalized_copy();
        }
    }
    return result;
}

}  // namespace cheshire
