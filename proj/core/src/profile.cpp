#include "qbm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qbm {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

TimeDomain TimeDomain::all() {
    return {-std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
}

bool TimeDomain::contains(double t) const {
    // Tiny slack so that t_end computed as n*dt may land on the boundary.
    const double span = t_max - t_min;
    const double eps = 1e-12 * std::max(1.0, span);
    return t >= t_min - eps && t <= t_max + eps;
}

TimeDomain TimeDomain::intersect(const TimeDomain& other) const {
    return {std::max(t_min, other.t_min), std::min(t_max, other.t_max)};
}

// ---------------------------------------------------------------------------
// Expression nodes
// ---------------------------------------------------------------------------

struct Profile::Node {
    enum class Kind { Constant, Exp, Piecewise, Sum, Product };

    Kind kind;

    // Constant: a; Exp: a * e^(b t)
    double a = 0.0;
    double b = 0.0;

    // Piecewise polynomial on breaks[0..n]: on [breaks[i], breaks[i+1]] the
    // value is sum_k coefs[i][k] * (t - breaks[i])^k.
    std::vector<double> breaks;
    std::vector<std::vector<double>> coefs;

    std::shared_ptr<const Node> lhs, rhs;

    double eval(double t) const;
    TimeDomain domain() const;
    std::shared_ptr<const Node> derivative() const;
    std::string to_string() const;
};

namespace {

using Node = Profile::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->a = v;
    return n;
}

NodePtr make_exp(double amp, double rate) {
    if (amp == 0.0 || rate == 0.0) return make_constant(amp);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Exp;
    n->a = amp;
    n->b = rate;
    return n;
}

NodePtr make_sum(NodePtr a, NodePtr b) {
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
        return make_constant(a->a + b->a);
    if (a->kind == Node::Kind::Constant && a->a == 0.0) return b;
    if (b->kind == Node::Kind::Constant && b->a == 0.0) return a;
    // e^(bt) terms with equal rate combine exactly.
    if (a->kind == Node::Kind::Exp && b->kind == Node::Kind::Exp && a->b == b->b)
        return make_exp(a->a + b->a, a->b);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sum;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr make_product(NodePtr a, NodePtr b) {
    if (a->kind == Node::Kind::Constant && b->kind == Node::Kind::Constant)
        return make_constant(a->a * b->a);
    if (a->kind == Node::Kind::Constant) {
        if (a->a == 0.0) return make_constant(0.0);
        if (a->a == 1.0) return b;
        if (b->kind == Node::Kind::Exp) return make_exp(a->a * b->a, b->b);
    }
    if (b->kind == Node::Kind::Constant) return make_product(b, a);
    if (a->kind == Node::Kind::Exp && b->kind == Node::Kind::Exp)
        return make_exp(a->a * b->a, a->b + b->b);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Product;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

} // namespace

double Node::eval(double t) const {
    switch (kind) {
    case Kind::Constant:
        return a;
    case Kind::Exp:
        return a * std::exp(b * t);
    case Kind::Piecewise: {
        if (t < breaks.front() || t > breaks.back()) {
            const double span = breaks.back() - breaks.front();
            if (t < breaks.front() - 1e-12 * std::max(1.0, span) ||
                t > breaks.back() + 1e-12 * std::max(1.0, span))
                throw DomainError("profile evaluated at t=" + fmt_double(t) +
                                  " outside declared domain [" +
                                  fmt_double(breaks.front()) + ", " +
                                  fmt_double(breaks.back()) + "]");
            t = std::clamp(t, breaks.front(), breaks.back());
        }
        // Last interval is closed on the right.
        auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        size_t i = (it == breaks.begin()) ? 0 : size_t(it - breaks.begin()) - 1;
        if (i >= coefs.size()) i = coefs.size() - 1;
        const double u = t - breaks[i];
        const auto& c = coefs[i];
        double v = 0.0;
        for (size_t k = c.size(); k-- > 0;) v = v * u + c[k];
        return v;
    }
    case Kind::Sum:
        return lhs->eval(t) + rhs->eval(t);
    case Kind::Product:
        return lhs->eval(t) * rhs->eval(t);
    }
    throw Error("corrupt profile node");
}

TimeDomain Node::domain() const {
    switch (kind) {
    case Kind::Constant:
    case Kind::Exp:
        return TimeDomain::all();
    case Kind::Piecewise:
        return {breaks.front(), breaks.back()};
    case Kind::Sum:
    case Kind::Product:
        return lhs->domain().intersect(rhs->domain());
    }
    throw Error("corrupt profile node");
}

NodePtr Node::derivative() const {
    switch (kind) {
    case Kind::Constant:
        return make_constant(0.0);
    case Kind::Exp:
        return make_exp(a * b, b);
    case Kind::Piecewise: {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Piecewise;
        n->breaks = breaks;
        n->coefs.reserve(coefs.size());
        for (const auto& c : coefs) {
            std::vector<double> d;
            for (size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
            if (d.empty()) d.push_back(0.0);
            n->coefs.push_back(std::move(d));
        }
        return n;
    }
    case Kind::Sum:
        return make_sum(lhs->derivative(), rhs->derivative());
    case Kind::Product:
        return make_sum(make_product(lhs->derivative(), rhs),
                        make_product(lhs, rhs->derivative()));
    }
    throw Error("corrupt profile node");
}

std::string Node::to_string() const {
    switch (kind) {
    case Kind::Constant:
        return fmt_double(a);
    case Kind::Exp:
        if (a == 1.0) return "exp(" + fmt_double(b) + "*t)";
        return fmt_double(a) + "*exp(" + fmt_double(b) + "*t)";
    case Kind::Piecewise:
        return "piecewise[" + fmt_double(breaks.front()) + ", " +
               fmt_double(breaks.back()) + "]";
    case Kind::Sum:
        return "(" + lhs->to_string() + " + " + rhs->to_string() + ")";
    case Kind::Product:
        return "(" + lhs->to_string() + " * " + rhs->to_string() + ")";
    }
    throw Error("corrupt profile node");
}

// ---------------------------------------------------------------------------
// Profile facade
// ---------------------------------------------------------------------------

Profile::Profile() : node_(make_constant(0.0)) {}
Profile::Profile(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Profile Profile::constant(double v) {
    if (!std::isfinite(v))
        throw InvalidParameterError("constant profile value must be finite");
    return Profile(make_constant(v));
}

Profile Profile::exponential(double amp, double rate) {
    if (!std::isfinite(amp) || !std::isfinite(rate))
        throw InvalidParameterError("exponential profile parameters must be finite");
    return Profile(make_exp(amp, rate));
}

Profile Profile::tabulated(const std::vector<double>& t,
                           const std::vector<double>& v, Interp interp) {
    const size_t n = t.size();
    if (n < 2 || v.size() != n)
        throw InvalidParameterError(
            "tabulated profile needs >= 2 samples with matching value count");
    for (size_t i = 0; i < n; ++i)
        if (!std::isfinite(t[i]) || !std::isfinite(v[i]))
            throw InvalidParameterError("tabulated profile samples must be finite");
    for (size_t i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1]))
            throw InvalidParameterError(
                "tabulated profile abscissae must be strictly increasing");

    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Piecewise;
    node->breaks = t;

    if (interp == Interp::Linear || n == 2) {
        for (size_t i = 0; i + 1 < n; ++i) {
            const double h = t[i + 1] - t[i];
            node->coefs.push_back({v[i], (v[i + 1] - v[i]) / h});
        }
        return Profile(node);
    }

    // Natural cubic spline: solve the tridiagonal system for the second
    // derivatives m_i (m_0 = m_{n-1} = 0), then convert to local cubics.
    std::vector<double> h(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) h[i] = t[i + 1] - t[i];

    std::vector<double> diag(n, 2.0), sub(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        sub[i] = h[i - 1] / (h[i - 1] + h[i]);
        sup[i] = h[i] / (h[i - 1] + h[i]);
        rhs[i] = 6.0 *
                 ((v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1]) /
                 (h[i - 1] + h[i]);
    }
    // Thomas algorithm on rows 1..n-2 (rows 0 and n-1 are identity).
    std::vector<double> m(n, 0.0), cp(n, 0.0), dp(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double denom = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / denom;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / denom;
    }
    for (size_t i = n - 2; i >= 1; --i) {
        m[i] = dp[i] - cp[i] * m[i + 1];
        if (i == 1) break;
    }

    for (size_t i = 0; i + 1 < n; ++i) {
        const double hi = h[i];
        const double c0 = v[i];
        const double c2 = m[i] / 2.0;
        const double c3 = (m[i + 1] - m[i]) / (6.0 * hi);
        const double c1 = (v[i + 1] - v[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0;
        node->coefs.push_back({c0, c1, c2, c3});
    }
    return Profile(node);
}

double Profile::eval(double t) const { return node_->eval(t); }

Profile Profile::derivative() const { return Profile(node_->derivative()); }

TimeDomain Profile::domain() const { return node_->domain(); }

bool Profile::is_constant() const {
    return node_->kind == Node::Kind::Constant;
}

double Profile::constant_value() const {
    if (!is_constant())
        throw NotConstantError("profile '" + to_string() + "' is not constant");
    return node_->a;
}

std::string Profile::to_string() const { return node_->to_string(); }

Profile operator+(const Profile& a, const Profile& b) {
    return Profile(make_sum(a.node_, b.node_));
}

Profile operator-(const Profile& a, const Profile& b) {
    return Profile(make_sum(a.node_, make_product(make_constant(-1.0), b.node_)));
}

Profile operator*(const Profile& a, const Profile& b) {
    return Profile(make_product(a.node_, b.node_));
}

Profile operator*(double c, const Profile& p) {
    return Profile(make_product(make_constant(c), p.node_));
}

} // namespace qbm
