#pragma once

#include <stdexcept>
#include <string>

namespace fairjudge {

// Malformed or inconsistent input data (files, ids, value ranges).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The fixed-point loop exceeded its iteration budget. Convergence is
// guaranteed for valid inputs, so this signals a defect.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fairjudge
