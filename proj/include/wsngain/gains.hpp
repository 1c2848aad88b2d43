// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>

#include "wsngain/model.hpp"

namespace wsngain {

/// ||a||^2 = N.
struct FixedEnergy {
    friend bool operator==(const FixedEnergy&, const FixedEnergy&) = default;
};

/// |a_i| = 1.
struct PhaseOnly {
    friend bool operator==(const PhaseOnly&, const PhaseOnly&) = default;
};

/// a_i in {exp(j 2 pi q / levels)}.
struct QuantizedPhase {
    int levels = 2;
    friend bool operator==(const QuantizedPhase&, const QuantizedPhase&) = default;
};

/// At most `active` sensors transmit. Energy mode keeps ||a||^2 = N; phase
/// mode gives every active sensor modulus sqrt(N / active).
struct SensorSelect {
    enum class Mode { Energy, Phase };
    int active = 1;
    Mode mode = Mode::Energy;
    friend bool operator==(const SensorSelect&, const SensorSelect&) = default;
};

using ConstraintSpec = std::variant<FixedEnergy, PhaseOnly, QuantizedPhase, SensorSelect>;

/// Parses the CLI form: energy | phase | quant:Q | select:K[:phase].
ConstraintSpec parse_constraint(const std::string& text);
std::string to_string(const ConstraintSpec& c);

/// Range checks that depend on the sensor count (Q >= 2, 1 <= K < N).
void validate_constraint(const ConstraintSpec& c, int num_sensors);

/// True when `a` lies in the constraint set: energies within `tol`
/// relative, alphabet membership within `tol` absolute on the phase.
bool satisfies(const CVector& a, const ConstraintSpec& c, double tol = 1e-12);

/// A gain vector tagged with the constraint it was designed for.
struct GainVector {
    CVector values;
    ConstraintSpec constraint = FixedEnergy{};

    int size() const { return static_cast<int>(values.size()); }
};

}  // namespace wsngain
