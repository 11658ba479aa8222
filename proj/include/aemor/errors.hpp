#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aemor {

/// Violated call contract: shape mismatch, bad argument, missing precondition.
class contract_error : public std::invalid_argument {
public:
    explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: singular system, non-converged iteration, non-finite value.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Training aborted (non-finite loss or gradient); carries where it happened.
class training_error : public numerical_error {
public:
    training_error(const std::string& what, std::size_t epoch, double last_finite_loss)
        : numerical_error(what), epoch(epoch), last_finite_loss(last_finite_loss) {}
    std::size_t epoch;
    double last_finite_loss;
};

/// Problem with input data content (wrong widths, unknown preset, missing snapshot).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed run configuration: unknown key, missing key, wrong value type.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// File-level failure. `kind` distinguishes what the reader tripped on.
class io_error : public std::runtime_error {
public:
    enum class kind_t { open, magic, version, structure, checksum, truncated };

    io_error(kind_t kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
    io_error(kind_t kind, const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), kind(kind) {}
    kind_t kind;
};

inline std::string shape_str(std::size_t rows, std::size_t cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace aemor
