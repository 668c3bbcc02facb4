#pragma once

#include <string>

#include "gdpx/queueing.hpp"

namespace gdpx::svg {

/// Renders a queueing diagram as a standalone SVG document: actual arrivals
/// as a solid step curve, counterfactual demand dashed, counterfactual
/// service dotted, with the excess-delay area (service vs actual) and the
/// airborne-increase area (demand vs service) shaded. Output is a pure
/// function of the diagram, so equal diagrams produce identical bytes. An
/// empty diagram renders as a valid axes-only document.
std::string render_diagram_svg(const QueueingDiagram& diagram);

}  // namespace gdpx::svg
