#include "pcube/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pcube {

namespace {

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        if (line[i] == '#') continue;
        return true;
    }
    return false;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return in;
}

}  // namespace

CubeFunction read_truth_table(std::istream& in) {
    std::string line;
    if (!next_data_line(in, line)) throw std::invalid_argument("truth table: missing header");
    int n;
    double p;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> p)) throw std::invalid_argument("truth table: bad header, expected \"n p\"");
    }
    BiasedCube cube = BiasedCube::make(n, p);
    std::vector<double> values;
    values.reserve(cube.size());
    while (values.size() < cube.size()) {
        if (!next_data_line(in, line))
            throw std::invalid_argument("truth table: too few values");
        std::istringstream vs(line);
        double v;
        while (vs >> v) values.push_back(v);
    }
    if (values.size() != cube.size()) throw std::invalid_argument("truth table: too many values");
    return CubeFunction(cube, std::move(values));
}

CubeFunction read_truth_table_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_truth_table(in);
}

void write_truth_table(std::ostream& out, const CubeFunction& f) {
    out << f.cube.n << ' ' << fmt(f.cube.p) << '\n';
    for (double v : f.values) out << fmt(v) << '\n';
}

ProductFunction read_product_table(std::istream& in) {
    std::string line;
    if (!next_data_line(in, line)) throw std::invalid_argument("product table: missing header");
    int n;
    {
        std::istringstream hs(line);
        if (!(hs >> n)) throw std::invalid_argument("product table: bad header, expected \"n\"");
    }
    if (n < 1) throw std::invalid_argument("product table: need at least one factor");
    std::vector<std::vector<double>> factors;
    for (int t = 0; t < n; ++t) {
        if (!next_data_line(in, line))
            throw std::invalid_argument("product table: missing factor line");
        std::istringstream fs(line);
        int arity;
        if (!(fs >> arity) || arity < 2)
            throw std::invalid_argument("product table: bad factor arity");
        std::vector<double> probs(arity);
        for (int k = 0; k < arity; ++k)
            if (!(fs >> probs[k])) throw std::invalid_argument("product table: short factor line");
        factors.push_back(std::move(probs));
    }
    ProductSpace space = ProductSpace::make(factors);
    std::vector<double> values;
    values.reserve(space.points);
    while (values.size() < space.points) {
        if (!next_data_line(in, line))
            throw std::invalid_argument("product table: too few values");
        std::istringstream vs(line);
        double v;
        while (vs >> v) values.push_back(v);
    }
    if (values.size() != space.points)
        throw std::invalid_argument("product table: too many values");
    return ProductFunction(std::move(space), std::move(values));
}

ProductFunction read_product_table_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_product_table(in);
}

void write_product_table(std::ostream& out, const ProductFunction& f) {
    out << f.space.n() << '\n';
    for (const auto& factor : f.space.factors) {
        out << factor.probs.size();
        for (double p : factor.probs) out << ' ' << fmt(p);
        out << '\n';
    }
    for (double v : f.values) out << fmt(v) << '\n';
}

MultilinearPoly read_poly(std::istream& in, int n) {
    std::vector<PolyTerm> terms;
    std::string line;
    mask_t seen = 0;
    while (next_data_line(in, line)) {
        std::istringstream ts(line);
        unsigned long mask;
        double coeff;
        if (!(ts >> mask >> coeff))
            throw std::invalid_argument("polynomial: expected \"mask coefficient\" lines");
        terms.push_back({static_cast<mask_t>(mask), coeff});
        seen |= static_cast<mask_t>(mask);
    }
    if (n < 0) {
        n = 0;
        while (n < 31 && (seen >> n)) ++n;
        n = std::max(n, 1);
    }
    return MultilinearPoly::make(n, std::move(terms));
}

MultilinearPoly read_poly_file(const std::string& path, int n) {
    auto in = open_or_throw(path);
    return read_poly(in, n);
}

void write_poly(std::ostream& out, const MultilinearPoly& f) {
    for (const auto& t : f.terms) out << t.vars << ' ' << fmt(t.coeff) << '\n';
}

}  // namespace pcube
