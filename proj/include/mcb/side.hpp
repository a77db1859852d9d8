#pragma once

namespace mcb {

enum class TailSide { UpperTail, LowerTail };

inline const char* side_name(TailSide s) {
    return s == TailSide::UpperTail ? "upper" : "lower";
}

}  // namespace mcb
