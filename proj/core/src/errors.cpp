#include "pdqrng/errors.hpp"

#include <sstream>

namespace pdqrng {

namespace {

std::string with_time(double time, const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (at t = " << time << " s)";
    return os.str();
}

std::string with_bracket(double lower, double upper, const std::string& what) {
    std::ostringstream os;
    os.precision(10);
    os << what << " (bracket [" << lower << ", " << upper << "])";
    return os.str();
}

} // namespace

DivergenceError::DivergenceError(double time, const std::string& what)
    : Error(with_time(time, what)), time_(time) {}

NoSolutionError::NoSolutionError(double lower, double upper, const std::string& what)
    : Error(with_bracket(lower, upper, what)), lower_(lower), upper_(upper) {}

} // namespace pdqrng
