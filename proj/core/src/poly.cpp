#include "nbcc/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nbcc {

int exponents_degree(const Exponents& e) {
    int d = 0;
    for (int v : e) d += v;
    return d;
}

bool grlex_less(const Exponents& a, const Exponents& b) {
    int da = exponents_degree(a), db = exponents_degree(b);
    if (da != db) return da < db;
    return a < b;
}

Polynomial::Polynomial(int nvars, std::vector<std::pair<Exponents, Complex>> terms,
                       ZeroPolicy policy)
    : nvars_(nvars) {
    std::map<Exponents, Complex> acc;
    for (auto& [e, c] : terms) {
        if (static_cast<int>(e.size()) != nvars)
            throw std::invalid_argument("Polynomial: exponent length != nvars");
        for (int v : e)
            if (v < 0) throw std::invalid_argument("Polynomial: negative exponent");
        acc[e] += c;
    }
    std::vector<Exponents> keep;
    for (auto& [e, c] : acc)
        if (c != Complex(0.0, 0.0) || policy == ZeroPolicy::kKeep) keep.push_back(e);
    std::sort(keep.begin(), keep.end(), grlex_less);
    for (auto& e : keep) {
        exponents_.push_back(e);
        coefficients_.push_back(acc[e]);
        degree_ = std::max(degree_, exponents_degree(e));
    }
}

Complex Polynomial::eval(std::span<const Complex> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("Polynomial::eval: dimension mismatch");
    Complex sum = 0.0;
    for (std::size_t t = 0; t < exponents_.size(); ++t) {
        Complex m = coefficients_[t];
        const Exponents& e = exponents_[t];
        for (int j = 0; j < nvars_; ++j)
            for (int p = 0; p < e[j]; ++p) m *= point[j];
        sum += m;
    }
    return sum;
}

Polynomial Polynomial::derivative(int var) const {
    std::vector<std::pair<Exponents, Complex>> terms;
    for (std::size_t t = 0; t < exponents_.size(); ++t) {
        if (exponents_[t][var] == 0) continue;
        Exponents e = exponents_[t];
        Complex c = coefficients_[t] * static_cast<double>(e[var]);
        e[var] -= 1;
        terms.emplace_back(std::move(e), c);
    }
    return Polynomial(nvars_, std::move(terms));
}

PolySystem::PolySystem(int nvars, std::vector<Polynomial> polys)
    : nvars_(nvars), polys_(std::move(polys)) {
    for (const auto& p : polys_)
        if (p.nvars() != nvars_ && !p.is_zero())
            throw std::invalid_argument("PolySystem: mixed variable counts");
    prepare_tables();
}

void PolySystem::prepare_tables() {
    max_deg_.assign(nvars_, 0);
    terms_.resize(polys_.size());
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        const auto& p = polys_[i];
        for (std::size_t t = 0; t < p.exponents().size(); ++t) {
            const Exponents& e = p.exponents()[t];
            TermRef ref;
            ref.coeff = p.coefficients()[t];
            ref.begin = static_cast<std::uint32_t>(factors_.size());
            for (int j = 0; j < nvars_; ++j) {
                if (e[j] > 0) {
                    factors_.emplace_back(static_cast<std::uint16_t>(j),
                                          static_cast<std::uint16_t>(e[j]));
                    max_deg_[j] = std::max(max_deg_[j], e[j]);
                }
            }
            ref.end = static_cast<std::uint32_t>(factors_.size());
            terms_[i].push_back(ref);
        }
    }
}

namespace {
// Fill the per-variable power table powers[j*(maxd+1)+p] = x_j^p.
inline void fill_powers(std::span<const Complex> x, const std::vector<int>& max_deg,
                        int stride, std::vector<Complex>& powers) {
    const int nv = static_cast<int>(max_deg.size());
    powers.resize(static_cast<std::size_t>(nv) * stride);
    for (int j = 0; j < nv; ++j) {
        Complex* row = powers.data() + static_cast<std::size_t>(j) * stride;
        row[0] = 1.0;
        for (int p = 1; p <= max_deg[j]; ++p) row[p] = row[p - 1] * x[j];
    }
}
}  // namespace

void PolySystem::eval(std::span<const Complex> point, std::span<Complex> out,
                      EvalWorkspace& ws) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("PolySystem::eval: dimension mismatch");
    int stride = 1;
    for (int d : max_deg_) stride = std::max(stride, d + 1);
    fill_powers(point, max_deg_, stride, ws.powers);
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        Complex sum = 0.0;
        for (const TermRef& t : terms_[i]) {
            Complex m = t.coeff;
            for (std::uint32_t f = t.begin; f < t.end; ++f)
                m *= ws.powers[static_cast<std::size_t>(factors_[f].first) * stride +
                               factors_[f].second];
            sum += m;
        }
        out[i] = sum;
    }
}

std::vector<Complex> PolySystem::eval(std::span<const Complex> point) const {
    EvalWorkspace ws;
    std::vector<Complex> out(polys_.size());
    eval(point, out, ws);
    return out;
}

void PolySystem::jacobian_eval(std::span<const Complex> point, Eigen::MatrixXcd& jac,
                               EvalWorkspace& ws) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("PolySystem::jacobian_eval: dimension mismatch");
    int stride = 1;
    for (int d : max_deg_) stride = std::max(stride, d + 1);
    fill_powers(point, max_deg_, stride, ws.powers);
    jac.setZero(static_cast<Eigen::Index>(polys_.size()), nvars_);
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        for (const TermRef& t : terms_[i]) {
            // d/dx_j of the term: e_j * x_j^{e_j-1} * prod_{l != j} x_l^{e_l}
            for (std::uint32_t fd = t.begin; fd < t.end; ++fd) {
                const auto [vj, ej] = factors_[fd];
                Complex m = t.coeff * static_cast<double>(ej);
                for (std::uint32_t f = t.begin; f < t.end; ++f) {
                    const auto [vl, el] = factors_[f];
                    int p = (f == fd) ? el - 1 : el;
                    m *= ws.powers[static_cast<std::size_t>(vl) * stride + p];
                }
                jac(static_cast<Eigen::Index>(i), vj) += m;
            }
        }
    }
}

Eigen::MatrixXcd PolySystem::jacobian_eval(std::span<const Complex> point) const {
    EvalWorkspace ws;
    Eigen::MatrixXcd jac;
    jacobian_eval(point, jac, ws);
    return jac;
}

std::vector<std::vector<Exponents>> PolySystem::supports() const {
    std::vector<std::vector<Exponents>> out;
    out.reserve(polys_.size());
    for (const auto& p : polys_) out.push_back(p.support());
    return out;
}

unsigned long long PolySystem::total_degree() const {
    if (!square()) throw std::logic_error("total_degree: system not square");
    unsigned long long prod = 1;
    for (const auto& p : polys_) {
        unsigned long long d = static_cast<unsigned long long>(p.degree());
        if (d != 0 && prod > ~0ULL / d)
            throw std::overflow_error("total_degree: exceeds 64 bits");
        prod *= d;
    }
    return prod;
}

// --- text format ---------------------------------------------------------

namespace {
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string to_text(const PolySystem& system) {
    std::ostringstream os;
    for (int i = 0; i < system.size(); ++i) {
        const auto& p = system.poly(i);
        if (p.is_zero()) {
            os << "0,0:";
            for (int j = 0; j < system.nvars(); ++j) os << (j ? "," : "") << 0;
            os << "\n";
            continue;
        }
        for (std::size_t t = 0; t < p.exponents().size(); ++t) {
            if (t) os << " + ";
            os << format_double(p.coefficients()[t].real()) << ","
               << format_double(p.coefficients()[t].imag()) << ":";
            const auto& e = p.exponents()[t];
            for (std::size_t j = 0; j < e.size(); ++j) os << (j ? "," : "") << e[j];
        }
        os << "\n";
    }
    return os.str();
}

PolySystem system_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<Polynomial> polys;
    int nvars = -1;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::pair<Exponents, Complex>> terms;
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t next = line.find(" + ", pos);
            std::string tok = line.substr(pos, next == std::string::npos
                                                   ? std::string::npos
                                                   : next - pos);
            pos = next == std::string::npos ? line.size() : next + 3;
            std::size_t colon = tok.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("system_from_text: malformed term '" + tok + "'");
            std::size_t comma = tok.find(',');
            if (comma == std::string::npos || comma > colon)
                throw std::runtime_error("system_from_text: malformed coefficient");
            double re = std::stod(tok.substr(0, comma));
            double im = std::stod(tok.substr(comma + 1, colon - comma - 1));
            Exponents e;
            std::stringstream es(tok.substr(colon + 1));
            std::string piece;
            while (std::getline(es, piece, ',')) e.push_back(std::stoi(piece));
            if (nvars < 0) nvars = static_cast<int>(e.size());
            if (static_cast<int>(e.size()) != nvars)
                throw std::runtime_error("system_from_text: inconsistent variable count");
            terms.emplace_back(std::move(e), Complex(re, im));
        }
        // kKeep so explicitly written zero-coefficient terms round-trip
        polys.emplace_back(nvars, std::move(terms), ZeroPolicy::kKeep);
    }
    if (nvars < 0) throw std::runtime_error("system_from_text: empty input");
    return PolySystem(nvars, std::move(polys));
}

void save_system(const PolySystem& system, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << to_text(system);
}

PolySystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return system_from_text(ss.str());
}

}  // namespace nbcc
