#pragma once

#include <fiber/time_stepper.hpp>

#include <string>
#include <vector>

namespace fiber::cli {

// SVG with one polyline per requested time (fiber sampled at the nodes,
// component 2 horizontal, component 1 vertical), axes and a time legend.
std::string render_svg(const Trajectory& traj, const std::vector<double>& times);

std::vector<double> parse_time_list(const std::string& text);

} // namespace fiber::cli
