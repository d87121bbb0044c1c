#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkt/gates.hpp"

namespace qkt {

/// Ordered list of gate applications on labeled qutrits.
struct Circuit {
    int n_qutrits = 0;
    std::vector<Gate> ops;
    std::uint64_t seed = 0;
    std::string label;

    explicit Circuit(int n = 0) : n_qutrits(n) {}

    Circuit& add(Gate g);
    bool has_channel() const;

    /// product of all gate matrices embedded on n_qutrits (throws on channels)
    Mat unitary() const;

    std::string to_json() const;
    static Circuit from_json(const std::string& text);
};

/// embed a k-local operator acting on `targets` into the full 3^n space
Mat embed(const Mat& op, const std::vector<int>& targets, int n_qutrits);

}  // namespace qkt
