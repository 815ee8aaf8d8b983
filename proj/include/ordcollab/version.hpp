#pragma once

#include <string_view>

namespace ordcollab {

std::string_view version();
std::string_view git_describe();

}  // namespace ordcollab
