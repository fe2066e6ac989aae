#pragma once

#include <cstddef>
#include <vector>

namespace meshless {

/// Nodal capital (k) and technology (A) at one time level.
struct State {
    std::vector<double> k;
    std::vector<double> A;
    double time = 0.0;

    std::size_t size() const noexcept { return k.size(); }
};

inline State uniform_state(std::size_t n, double k, double A) {
    return State{std::vector<double>(n, k), std::vector<double>(n, A), 0.0};
}

}  // namespace meshless
