// Sparse multivariate polynomials over complex coefficients: evaluation,
// differentiation, support extraction, and the line-oriented text format
// used by the CLI.

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace nbcc {

using Complex = std::complex<double>;
using Exponents = std::vector<int>;

int exponents_degree(const Exponents& e);

/// Graded-lexicographic order on exponent vectors (degree first, then lex).
/// Terms of a Polynomial are stored in this order so iteration is
/// deterministic across runs.
bool grlex_less(const Exponents& a, const Exponents& b);

/// kKeep retains monomials whose accumulated coefficient is zero. Such terms
/// never affect values, but they do enter the support and therefore the
/// Newton polytopes seen by the mixed-volume machinery. The distance-equation
/// builder relies on this: the path counts it must reproduce correspond to
/// the supports of the expansion as written, cancellations included.
enum class ZeroPolicy { kDrop, kKeep };

class Polynomial {
public:
    Polynomial() = default;

    /// Builds from (exponents, coefficient) pairs. Duplicate monomials are
    /// accumulated; terms with zero coefficient are dropped under kDrop.
    Polynomial(int nvars, std::vector<std::pair<Exponents, Complex>> terms,
               ZeroPolicy policy = ZeroPolicy::kDrop);

    int nvars() const { return nvars_; }
    int degree() const { return degree_; }
    bool is_zero() const { return exponents_.empty(); }
    std::size_t term_count() const { return exponents_.size(); }

    const std::vector<Exponents>& exponents() const { return exponents_; }
    const std::vector<Complex>& coefficients() const { return coefficients_; }

    Complex eval(std::span<const Complex> point) const;
    Polynomial derivative(int var) const;

    /// The stored monomials: exactly those with nonzero coefficient under
    /// the default policy, plus any kKeep structural zeros.
    std::vector<Exponents> support() const { return exponents_; }

    bool operator==(const Polynomial& other) const = default;

private:
    int nvars_ = 0;
    int degree_ = 0;
    std::vector<Exponents> exponents_;   // grlex-sorted, parallel to coefficients_
    std::vector<Complex> coefficients_;
};

/// Scratch space for system evaluation; reuse across calls to avoid
/// per-evaluation allocation. One workspace per thread.
struct EvalWorkspace {
    std::vector<Complex> powers;  // nvars x (maxdeg+1), row-major
};

/// A square (or rectangular) system of sparse polynomials sharing one
/// variable set. Immutable after construction and safe to share across
/// threads; all operations are pure.
class PolySystem {
public:
    PolySystem() = default;
    PolySystem(int nvars, std::vector<Polynomial> polys);

    int nvars() const { return nvars_; }
    int size() const { return static_cast<int>(polys_.size()); }
    bool square() const { return size() == nvars_; }
    const Polynomial& poly(int i) const { return polys_[i]; }
    const std::vector<Polynomial>& polys() const { return polys_; }
    int max_degree(int var) const { return max_deg_[var]; }

    void eval(std::span<const Complex> point, std::span<Complex> out,
              EvalWorkspace& ws) const;
    std::vector<Complex> eval(std::span<const Complex> point) const;

    /// Entry (i,j) = d polys[i] / d x_j at the point.
    void jacobian_eval(std::span<const Complex> point, Eigen::MatrixXcd& jac,
                       EvalWorkspace& ws) const;
    Eigen::MatrixXcd jacobian_eval(std::span<const Complex> point) const;

    std::vector<std::vector<Exponents>> supports() const;

    /// Product of the per-equation degrees (the Bezout number). Throws on
    /// overflow of 64 bits and on non-square systems.
    unsigned long long total_degree() const;

    bool operator==(const PolySystem& other) const = default;

private:
    void prepare_tables();

    int nvars_ = 0;
    std::vector<Polynomial> polys_;
    std::vector<int> max_deg_;  // per variable, over the whole system

    // Flattened term tables for fast evaluation: per polynomial, terms as
    // (coefficient, slice of packed (var,exp) factors).
    struct TermRef {
        Complex coeff;
        std::uint32_t begin, end;  // range in factors_
    };
    std::vector<std::vector<TermRef>> terms_;
    std::vector<std::pair<std::uint16_t, std::uint16_t>> factors_;

    friend class PolySystemEval;
};

// --- text format ---------------------------------------------------------
//
// One polynomial per line, terms as `re,im:e1,e2,...,en` separated by ` + `.
// Blank lines and lines starting with '#' are ignored.

std::string to_text(const PolySystem& system);
PolySystem system_from_text(const std::string& text);
void save_system(const PolySystem& system, const std::string& path);
PolySystem load_system(const std::string& path);

}  // namespace nbcc
