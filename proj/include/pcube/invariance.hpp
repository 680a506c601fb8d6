#pragma once

// Multilinear polynomials over interchangeable input ensembles: distributional
// closeness under smooth test functions, with the error controlled by
// generalized influences.  Exact enumeration for small discrete ensembles,
// deterministic counter-based Monte Carlo otherwise.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pcube/cube.hpp"

namespace pcube {

struct PolyTerm {
    mask_t vars = 0;
    double coeff = 0.0;
};

/// Sparse multilinear polynomial in formal variables v_0..v_{n-1}.
struct MultilinearPoly {
    int n = 0;
    std::vector<PolyTerm> terms;  // sorted by mask, masks unique

    static MultilinearPoly make(int n, std::vector<PolyTerm> terms);
    int degree() const;
    /// Sum of squared coefficients over every term set.
    double total_weight() const;
    double evaluate(const std::vector<double>& x) const;
};

/// Reinterpret a character expansion as a polynomial in the characters.
MultilinearPoly poly_from_spectral(const SpectralForm& F);

/// One input coordinate: a discrete distribution or a standard gaussian,
/// normalized to mean 0 and variance 1, with a third-moment control
/// sigma such that E|X|^3 <= 1/sigma.
struct EnsembleCoordinate {
    bool gaussian = false;
    std::vector<double> values;  // empty for gaussian coordinates
    std::vector<double> probs;
    double sigma = 0.0;
};

struct Ensemble {
    std::vector<EnsembleCoordinate> coords;

    int n() const { return static_cast<int>(coords.size()); }
    bool all_discrete() const;
    std::vector<double> sigmas() const;

    static Ensemble biased_characters(int n, double p);
    static Ensemble uniform_characters(int n);
    static Ensemble gaussians(int n, double sigma = default_gaussian_sigma());
    static Ensemble custom_discrete(int n, const std::vector<double>& values,
                                    const std::vector<double>& probs);
    static double default_gaussian_sigma();
};

/// First t coordinates from y, the rest from x.
Ensemble hybrid_ensemble(const Ensemble& x, const Ensemble& y, int t);

/// Parse "biased:p=0.3", "uniform", "gaussian" or "gaussian:sigma=0.5".
Ensemble ensemble_from_spec(int n, const std::string& spec);

struct PolyInfluenceTable {
    std::vector<std::pair<mask_t, double>> entries;  // sorted by mask

    double at(mask_t S) const;
    double max_nonempty() const;
};

/// I_S = (sum of squared coefficients over supersets of S) * prod sigma_i^{-2}.
PolyInfluenceTable poly_influences(const MultilinearPoly& f, const std::vector<double>& sigmas);
PolyInfluenceTable poly_influences(const MultilinearPoly& f, const Ensemble& e);

/// Smooth scalar test function with a certified sup bound on its third
/// derivative.  Custom functions carry a caller-supplied certificate.
struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
    double third_derivative_bound = 0.0;
    double range_width = 0.0;  // sup - inf, used for the vacuity flag

    static TestFunction smooth_step(double center, double width);
    static TestFunction smooth_sigmoid(double center, double width);
    static TestFunction custom(std::string name, std::function<double(double)> eval,
                               double third_derivative_bound, double range_width);
};

TestFunction test_function_from_spec(const std::string& spec);

struct DistributionDiff {
    double estimate = 0.0;  // |E phi(f(X)) - E phi(f(Y))|
    double signed_diff = 0.0;
    double mc_error = 0.0;  // 0 in exact mode
    bool exact = false;
    std::size_t samples_used = 0;
};

/// Largest discrete joint support the exact path will enumerate.
inline constexpr std::size_t exact_mode_support_cap = std::size_t{1} << 24;

bool exact_mode_available(const MultilinearPoly& f, const Ensemble& x, const Ensemble& y);

/// E[f(X)^k] by exact enumeration; the ensemble must be all-discrete.
double exact_moment(const MultilinearPoly& f, const Ensemble& x, int k);

DistributionDiff hybrid_distribution_diff(const MultilinearPoly& f, const Ensemble& x,
                                          const Ensemble& y, const TestFunction& phi,
                                          std::size_t samples = 200000,
                                          std::uint64_t seed = 1);

struct InvarianceReport {
    int degree = 0;
    double epsilon = 0.0;       // max nonempty influence, pessimistic over both ensembles
    double total_weight = 0.0;  // sum of squared coefficients
    double lhs = 0.0;
    double mc_error = 0.0;
    bool exact = false;
    double rhs = 0.0;         // asserted bound, constant 2^{12d}
    double rhs_stated = 0.0;  // reported bound, constant 2^{5d}
    bool pass = false;
    bool stated_pass = false;
    bool vacuous = false;  // asserted bound exceeds the range of phi
};

InvarianceReport invariance_bound_check(const MultilinearPoly& f, const Ensemble& x,
                                        const Ensemble& y, const TestFunction& phi,
                                        std::size_t samples = 200000, std::uint64_t seed = 1);

}  // namespace pcube
