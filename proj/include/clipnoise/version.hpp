#ifndef CLIPNOISE_VERSION_HPP
#define CLIPNOISE_VERSION_HPP

#include <string_view>

namespace clipnoise {

inline constexpr std::string_view kToolName = "clipnoise";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace clipnoise

#endif
