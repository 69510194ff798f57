#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "platoon/simulator.hpp"

namespace platoon {

struct PlotAnnotations {
    std::optional<std::pair<int, int>> attack_window;  // inclusive [onset, end], shaded
    std::optional<double> d_min;                       // dashed guides on the gap chart
    std::optional<double> d_max;
};

/// Render velocity.svg, position.svg and gaps.svg into `out_dir`: one
/// polyline per vehicle over the step axis, legend, optional window shading.
void emit_plots(const SimulationTrace& trace, const std::filesystem::path& out_dir,
                const PlotAnnotations& notes = {});

}  // namespace platoon
