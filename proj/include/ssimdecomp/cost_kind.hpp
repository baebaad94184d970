#pragma once

#include <optional>
#include <string_view>

namespace ssimdecomp {

/// Cost function driving a decomposition.
enum class CostKind { MSE, SSIM, PCC };

/// Target of the SSIM scheme: +1 (maximize) or -1 (minimize).
enum class Orientation { maximize, minimize };

std::string_view to_string(CostKind kind) noexcept;
std::optional<CostKind> parse_cost_kind(std::string_view text) noexcept;

}  // namespace ssimdecomp
