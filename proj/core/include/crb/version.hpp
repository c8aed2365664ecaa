#ifndef CRB_VERSION_HPP
#define CRB_VERSION_HPP

namespace crb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crb

#endif
