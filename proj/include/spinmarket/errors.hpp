#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spinmarket {

/// Thrown when a trajectory does not contain one complete ordered+disordered
/// cycle after censoring. Carries the raw transition count so callers can
/// report how close the run came.
class insufficient_data_error : public std::runtime_error {
public:
    insufficient_data_error(const std::string& what, std::int64_t transitions)
        : std::runtime_error(what), transitions_(transitions) {}

    std::int64_t transitions() const { return transitions_; }

private:
    std::int64_t transitions_;
};

}  // namespace spinmarket
