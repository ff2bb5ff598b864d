// Constellations shared by several test programs.
#pragma once

#include "radialcap/constellation.hpp"

#include <string>

namespace testsupport {

inline radialcap::Constellation make(int m, const std::string& w, const std::string& g,
                                     const std::string& lambda, const std::string& h,
                                     radialcap::Tangency t, int n = 0) {
    using namespace radialcap;
    return Constellation(n > 0 ? n : m, ModelSpace(m, parse(w)), parse(g), parse(lambda), parse(h), t);
}

inline radialcap::Constellation euclid(int m, radialcap::Tangency t = radialcap::Tangency::Lower) {
    return make(m, "r", "1", "0", "0", t);
}

inline radialcap::Constellation hyperbolic(int m, radialcap::Tangency t = radialcap::Tangency::Lower) {
    return make(m, "sinh(r)", "1", "0", "0", t);
}

} // namespace testsupport
