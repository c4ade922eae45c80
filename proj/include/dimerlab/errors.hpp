#ifndef DIMERLAB_ERRORS_HPP
#define DIMERLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dimerlab {

/// Malformed input: bad GraphSpec, shape mismatch, precondition of a move violated.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A matrix that had to be inverted turned out to be singular.
class singular_matrix : public std::runtime_error {
public:
    explicit singular_matrix(const std::string& msg) : std::runtime_error(msg) {}
};

/// Kasteleyn determinant and enumeration oracle disagree, or a move lost its invariant.
class certificate_mismatch : public std::runtime_error {
public:
    explicit certificate_mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

/// Enumeration would exceed the configured cover/coloring cap.
class cap_exceeded : public std::runtime_error {
public:
    explicit cap_exceeded(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dimerlab

#endif
