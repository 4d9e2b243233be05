#pragma once

#include <string>
#include <vector>

#include "fpa/distributions.hpp"

namespace fpa {

/// Loads a bid log (one nonnegative decimal per line, or CSV with a `bid`
/// column), drops the values at or above the empirical `quantile` order
/// statistic (rank ceil(q*n); quantile = 1 keeps everything), and rescales
/// the survivors by their maximum so the support ends at 1. Returns the
/// sorted normalized samples.
/// Throws ParseError (with line number), EmptyAfterFilterError.
EmpiricalSamples load_and_normalize(const std::string& path, Prob quantile = 0.9);

/// Same filter/normalize step on in-memory values.
std::vector<double> filter_and_normalize(std::vector<double> values, Prob quantile);

/// Writes one value per line, 12 significant digits — the `empirical:@path`
/// format.
void write_empirical_file(const std::string& path, const std::vector<double>& values);

}  // namespace fpa
