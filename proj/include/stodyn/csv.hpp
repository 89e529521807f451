#pragma once

#include <string>

namespace stodyn {

/// Display base for entropy values. Values are nats internally; conversion
/// happens only at the output layer.
enum class LogBase { natural, two };

/// Multiplier taking nats to the display base.
double log_scale(LogBase base);

/// Number formatting used in every CSV surface: 15 significant digits.
std::string csv_num(double x);

}  // namespace stodyn
