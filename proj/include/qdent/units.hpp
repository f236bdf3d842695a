#pragma once

namespace qdent::units {

// Energies and rates are ħ-scaled and stored in μeV; times are in ps.
inline constexpr double kHbar = 658.2119569;  // μeV·ps

inline constexpr double kMicroEvPerEv = 1e6;

}  // namespace qdent::units
