#pragma once

// Paper circuits built in code, so the low-level tests do not depend on the
// config loader. Values mirror presets/table1_*.json.

#include <array>

#include "zeldovich/circuit.hpp"

namespace fixtures {

inline zeldovich::Profile r_m_profile(double offset) {
    return zeldovich::Profile({600.0, 1181.0, 1300.0, 2600.0},
                             {5.0 + offset, 32.46 + offset, 59.5 + offset, 150.5 + offset});
}

inline std::array<zeldovich::PhaseCircuit, 3> table1(bool low_r, double R_i = 4.54) {
    using zeldovich::PhaseCircuit;
    PhaseCircuit p1{"P1", 149.9e-9, 71.6, r_m_profile(0.0), R_i, low_r ? 1.2 : 22.4, 0.131, 12.69e-3, 0.013};
    PhaseCircuit p2{"P2", 149.7e-9, 71.4, r_m_profile(6.3), R_i, low_r ? 1.0 : 27.0, 0.131, 12.70e-3, -2.0915};
    PhaseCircuit p3{"P3", 149.7e-9, 71.4, r_m_profile(0.0), R_i, low_r ? 1.1 : 23.7, 0.131, 12.67e-3, 2.0975};
    return {p1, p2, p3};
}

inline zeldovich::CylinderParams calibrated_cylinder() {
    zeldovich::CylinderParams p;
    p.coupling_A = 0.4465;
    return p;
}

}  // namespace fixtures
