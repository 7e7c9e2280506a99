#pragma once

#include <chrono>
#include <cstddef>
#include <optional>

#include "tattoo/error.hpp"

namespace tattoo {

inline constexpr std::size_t kDefaultMaxStates = 10000;

/// Wall-clock budget shared by the fixpoint loops of one analysis job.
class Deadline {
public:
    Deadline() = default;
    explicit Deadline(std::chrono::milliseconds budget)
        : until_(std::chrono::steady_clock::now() + budget) {}

    static Deadline none() { return {}; }

    void check() const {
        if (until_ && std::chrono::steady_clock::now() > *until_)
            throw ResourceLimitError("analysis exceeded its wall-clock budget");
    }

private:
    std::optional<std::chrono::steady_clock::time_point> until_;
};

} // namespace tattoo
