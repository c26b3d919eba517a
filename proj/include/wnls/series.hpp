#pragma once

#include <string>

namespace wnls {

enum class SeriesId { S1, S2 };
SeriesId series_from_string(const std::string& s);
std::string to_string(SeriesId id);

/// Partial sums over 2-d integer vectors of Euclidean norm <= K.
///
///   S1: sum_{l,m != 0} |l|^-2 |m|^-2 sum_{k != 0, l+m} |k|^beta |l+m-k|^-2
///   S2: sum_{k != 0} sum_{m != k, 2m != k} |k|^beta |k-m|^-4 |k-2m|^-2
///
/// Requires beta < 0 and K >= 2.
double lattice_series_partial_sum(SeriesId id, int K, double beta);

}  // namespace wnls
