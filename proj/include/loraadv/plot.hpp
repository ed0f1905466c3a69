#pragma once

#include <string>
#include <vector>

#include "loraadv/attack.hpp"

namespace loraadv {

/// Success probability against PSR for one (target, dnn): one polyline per
/// attack variant. Output depends only on the rows.
std::string success_plot_svg(const std::vector<SweepRow>& rows, TargetClassifier target, Arch dnn);

}  // namespace loraadv
