#pragma once

#include <stdexcept>
#include <string>

namespace hsiu {

/// Two cubes (or feature maps, or weight tensors) do not have matching shapes.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scalar argument is outside its admissible domain (negative sigma, p > 1, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input too small or otherwise degenerate for the requested computation.
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed HSIC or UWT1 file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced during the unfolding iterations.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, std::string update)
        : std::runtime_error("non-finite value after " + update + "-update in iteration " +
                             std::to_string(iteration)),
          iteration_(iteration),
          update_(std::move(update)) {}

    int iteration() const noexcept { return iteration_; }
    const std::string& update() const noexcept { return update_; }

private:
    int iteration_;
    std::string update_;
};

}  // namespace hsiu
