#pragma once

#include <vector>

#include "qkt/gates.hpp"

namespace qkt {

/// Compile an arbitrary single-qutrit unitary into native pulses: at most six
/// X/Y half/pi pulses plus virtual Z gates. The product of the returned gates
/// (in application order, qutrit index `target`) equals u up to global phase.
std::vector<Gate> decompose_su3(const Mat& u, int target = 0, double tol = 1e-10);

/// product of a gate list on one qutrit, in application order
Mat gate_list_unitary(const std::vector<Gate>& gates);

/// number of non-virtual pulses (everything except Z gates)
int pulse_count(const std::vector<Gate>& gates);

}  // namespace qkt
