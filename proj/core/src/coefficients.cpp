#include "qbm/coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qbm {

TimeDomain CoefficientSet::domain() const {
    return p.domain()
        .intersect(q.domain())
        .intersect(r.domain())
        .intersect(s.domain());
}

CoefficientSet::Values CoefficientSet::eval(double t) const {
    return {p.eval(t), q.eval(t), r.eval(t), s.eval(t)};
}

bool CoefficientSet::is_constant() const {
    return p.is_constant() && q.is_constant() && r.is_constant() &&
           s.is_constant();
}

CoefficientSet make_coefficients(double m, double hbar, Profile p, Profile q,
                                 Profile r, Profile s) {
    if (!(m > 0.0) || !std::isfinite(m))
        throw InvalidParameterError("mass m must be finite and > 0");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw InvalidParameterError("hbar must be finite and > 0");
    CoefficientSet cs{m, hbar, std::move(p), std::move(q), std::move(r),
                      std::move(s)};
    if (cs.domain().empty())
        throw InvalidParameterError(
            "coefficient profiles have no common time domain");
    return cs;
}

CoefficientSet from_physical(double m, double hbar, Profile omega2,
                             Profile gamma, Profile h, Profile f) {
    Profile p = m * omega2;
    Profile q = 2.0 * gamma;
    Profile r = (hbar * m) * (gamma * h);
    Profile s = hbar * (gamma * f);
    return make_coefficients(m, hbar, std::move(p), std::move(q), std::move(r),
                             std::move(s));
}

double lambda_const(const CoefficientSet& cs) {
    if (!cs.is_constant())
        throw NotConstantError(
            "lambda is defined for constant coefficient sets only");
    const double p = cs.p.constant_value();
    const double q = cs.q.constant_value();
    const double disc = 4.0 * p - cs.m * q * q;
    if (!(disc > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "overdamped/critical regime: 4p - m q^2 = %.12g <= 0",
                      disc);
        throw OverdampedError(buf);
    }
    return std::sqrt(disc);
}

Profile parse_profile_spec(const std::string& spec, const std::string& base_dir,
                           Interp interp) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParseError("profile spec '" + spec +
                         "' lacks a form prefix (const:/exp:/table:)");
    const std::string form = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);

    auto parse_number = [&](const std::string& what) {
        try {
            size_t pos = 0;
            const double v = std::stod(arg, &pos);
            if (pos != arg.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ParseError("profile spec '" + spec + "': cannot parse " +
                             what + " '" + arg + "'");
        }
    };

    if (form == "const") return Profile::constant(parse_number("value"));
    if (form == "exp") return Profile::exponential(1.0, parse_number("rate"));
    if (form == "table") {
        namespace fs = std::filesystem;
        fs::path path(arg);
        if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
        std::ifstream in(path);
        if (!in)
            throw ParseError("profile table '" + path.string() + "' cannot be opened");
        std::vector<double> ts, vs;
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream row(line);
            double t, v;
            if (!(row >> t >> v))
                throw ParseError("profile table '" + path.string() +
                                     "': expected two numeric columns",
                                 line_no);
            std::string extra;
            if (row >> extra)
                throw ParseError("profile table '" + path.string() +
                                     "': more than two columns",
                                 line_no);
            ts.push_back(t);
            vs.push_back(v);
        }
        if (ts.size() < 2)
            throw ParseError("profile table '" + path.string() +
                             "' needs at least two samples");
        try {
            return Profile::tabulated(ts, vs, interp);
        } catch (const InvalidParameterError& e) {
            throw ParseError("profile table '" + path.string() + "': " + e.what());
        }
    }
    throw ParseError("profile spec '" + spec + "': unknown form '" + form +
                     "' (expected const:, exp: or table:)");
}

} // namespace qbm
