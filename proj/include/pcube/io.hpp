#pragma once

// Plain-text table formats.
//
// Truth table:   header "n p", then 2^n values, one per line, in mask order.
// Product table: header "n", then one line per factor "arity p_1 .. p_arity",
//                then one value per line in mixed-radix order (factor 0 fastest).
// Polynomial:    one "mask coefficient" pair per line.
//
// Blank lines and lines starting with '#' are ignored everywhere.

#include <iosfwd>
#include <string>

#include "pcube/cube.hpp"
#include "pcube/invariance.hpp"
#include "pcube/product.hpp"

namespace pcube {

CubeFunction read_truth_table(std::istream& in);
CubeFunction read_truth_table_file(const std::string& path);
void write_truth_table(std::ostream& out, const CubeFunction& f);

ProductFunction read_product_table(std::istream& in);
ProductFunction read_product_table_file(const std::string& path);
void write_product_table(std::ostream& out, const ProductFunction& f);

/// n < 0 infers the variable count from the highest mask bit.
MultilinearPoly read_poly(std::istream& in, int n = -1);
MultilinearPoly read_poly_file(const std::string& path, int n = -1);
void write_poly(std::ostream& out, const MultilinearPoly& f);

}  // namespace pcube
