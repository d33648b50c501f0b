#include "vqclab/targets.hpp"

#include <cmath>

namespace vqc {

GateSequence toffoli() {
    const int a = 0;
    const int b = 1;
    const int t = 2;
    GateSequence s(3);
    s.h(t).cx(b, t).tdg(t).cx(a, t).t(t).cx(b, t).tdg(t).cx(a, t);
    s.t(b).t(t).h(t);
    s.cx(a, b).t(a).tdg(b).cx(a, b);
    return s;
}

void append_controlled_phase(GateSequence& s, int control, int target, double phi) {
    s.phase(control, phi / 2.0);
    s.cx(control, target);
    s.phase(target, -phi / 2.0);
    s.cx(control, target);
    s.phase(target, phi / 2.0);
}

GateSequence qft(int n) {
    if (n < 1) throw DimensionError("QFT needs at least one qubit");
    GateSequence s(n);
    for (int j = 0; j < n; ++j) {
        s.h(j);
        for (int k = j + 1; k < n; ++k) append_controlled_phase(s, k, j, 2.0 * kPi / std::pow(2.0, k - j + 1));
    }
    for (int j = 0; j < n / 2; ++j) {
        const int k = n - 1 - j;
        s.cx(j, k).cx(k, j).cx(j, k);
    }
    return s;
}

GateSequence w_state_prep() {
    GateSequence s(3);
    s.ry(0, 2.0 * std::acos(std::sqrt(1.0 / 3.0)));
    // controlled Ry(pi/2) from q0 onto q1
    s.ry(1, kPi / 4.0).cx(0, 1).ry(1, -kPi / 4.0).cx(0, 1);
    s.cx(1, 2).cx(0, 1).x(0);
    return s;
}

}  // namespace vqc
