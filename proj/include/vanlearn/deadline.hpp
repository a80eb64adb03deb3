#pragma once

#include <chrono>
#include <optional>

#include "vanlearn/error.hpp"

namespace vanlearn {

// Wall-clock budget handed to long-running fits. Fits poll it once per
// iteration (or per tree node) and abort with E_TIMEOUT once it has passed.
class Deadline {
public:
    using clock = std::chrono::steady_clock;

    Deadline() = default;
    explicit Deadline(clock::time_point at) : at_(at) {}

    static Deadline none() { return Deadline{}; }
    static Deadline after(clock::duration budget) { return Deadline{clock::now() + budget}; }

    bool expired() const { return at_ && clock::now() >= *at_; }

    void check() const {
        if (expired()) throw Error(errc::timeout, "fit exceeded its wall-clock budget");
    }

private:
    std::optional<clock::time_point> at_;
};

}  // namespace vanlearn
