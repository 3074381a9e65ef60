#pragma once

#include <array>
#include <string_view>

namespace nsbench {

enum class ShiftKind : int { Stationary = 0, MeanShift = 1, VarianceShift = 2, Trend = 3 };

inline constexpr std::array<ShiftKind, 4> kShiftKinds{
    ShiftKind::Stationary, ShiftKind::MeanShift, ShiftKind::VarianceShift, ShiftKind::Trend};

std::string_view to_string(ShiftKind kind) noexcept;
// Throws ValidationError for unknown names.
ShiftKind shift_kind_from_string(std::string_view name);

}  // namespace nsbench
