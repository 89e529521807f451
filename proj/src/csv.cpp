#include "stodyn/csv.hpp"

#include <cmath>
#include <cstdio>

namespace stodyn {

double log_scale(LogBase base) {
    return base == LogBase::two ? 1.0 / std::log(2.0) : 1.0;
}

std::string csv_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

}  // namespace stodyn
