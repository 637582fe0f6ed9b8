#pragma once

#include <stdexcept>
#include <string>

namespace tmodes {

/// Malformed or inconsistent caller input (bad dimensions, bad file, inadmissible parameters).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to produce a usable result (e.g. no start converged).
class solve_error : public std::runtime_error {
public:
    explicit solve_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tmodes
