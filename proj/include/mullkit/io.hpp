#pragma once

#include "mullkit/dataset.hpp"
#include "mullkit/lp.hpp"
#include "mullkit/selection.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mullkit {

// Header row required. The response column is removed; the remaining columns are
// features in file order. Empty, NA and non-numeric cells are rejected with their
// line and column.
Dataset read_dataset_csv(std::istream& in, Task task, const std::string& response = "y");
Dataset read_dataset_csv(const std::string& path, Task task, const std::string& response = "y");

void write_dataset_csv(std::ostream& os, const MatrixXd& features, const VectorXd& response,
                       const std::vector<std::string>& names = {}, const std::string& response_name = "y");

// index,name,value with the intercept (if any) as index 0 and beta_j as index j.
void write_coefficients_csv(std::ostream& os, const Coefficients& c, const std::vector<std::string>& names = {});
Coefficients read_coefficients_csv(std::istream& in);

// Flat "key = value" lines; '#' starts a comment; later keys override earlier ones.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values_file(const std::string& path);

std::vector<double> parse_list(const std::string& s);

// Grid file keys: lambda, gamma, threshold (comma-separated lists), folds, seed.
// Keys that are absent keep the values of `base`.
CvGrid read_grid(std::istream& in, CvGrid base = {});
CvGrid read_grid_file(const std::string& path, CvGrid base = {});

// Triplet CSV with header block,row,col,value. Block c uses col, block b uses row,
// block A uses both. Indices are 0-based; sizes are the largest index seen plus one.
LinearProgram read_lp_csv(std::istream& in);
LinearProgram read_lp_csv(const std::string& path);

}  // namespace mullkit
