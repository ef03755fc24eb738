#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ivspectral/dgp.hpp"

namespace ivspectral {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Reads a dataset from CSV with mandatory header `y,x1..xG,z1..zK` (any
/// column order, no extra or missing columns, no missing values). Throws
/// data_error on malformed input.
Dataset read_dataset_csv(const std::string& path);

/// Reads one value per line (blank lines and '#' comments skipped).
std::vector<double> read_value_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ivspectral
