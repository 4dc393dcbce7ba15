#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fiber {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// A constraint point where the reference tangent vanishes.
class DegenerateConstraint : public Error {
public:
    DegenerateConstraint(int point, double position, const std::string& what)
        : Error(what), point_(point), position_(position) {}
    int point() const { return point_; }
    double position() const { return position_; }

private:
    int point_;
    double position_;
};

class RankDeficientConstraints : public Error {
public:
    RankDeficientConstraints(std::vector<int> rows, const std::string& what)
        : Error(what), rows_(std::move(rows)) {}
    const std::vector<int>& rows() const { return rows_; }

private:
    std::vector<int> rows_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ArmijoFailure : public Error {
public:
    using Error::Error;
};

} // namespace fiber
