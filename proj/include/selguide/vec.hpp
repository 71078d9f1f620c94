#pragma once

#include <vector>

namespace selguide {

using Vec = std::vector<double>;

}  // namespace selguide
