#include <fiber/errors.hpp>
#include <fiber/quadrature.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace fiber {

namespace {

template <unsigned N>
QuadratureRule make_rule()
{
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        pts.emplace_back(x[i], w[i]);
        if (x[i] != 0.0)
            pts.emplace_back(-x[i], w[i]);
    }
    std::sort(pts.begin(), pts.end());
    QuadratureRule out;
    for (const auto& [xi, wi] : pts) {
        out.nodes.push_back(0.5 * (xi + 1.0));
        out.weights.push_back(0.5 * wi);
    }
    return out;
}

} // namespace

const QuadratureRule& gauss_legendre_unit(int points)
{
    static const QuadratureRule r2 = make_rule<2>(), r3 = make_rule<3>(), r4 = make_rule<4>(),
                                r5 = make_rule<5>(), r6 = make_rule<6>(), r7 = make_rule<7>(),
                                r8 = make_rule<8>(), r9 = make_rule<9>(), r10 = make_rule<10>(),
                                r15 = make_rule<15>(), r20 = make_rule<20>();
    switch (points) {
    case 2: return r2;
    case 3: return r3;
    case 4: return r4;
    case 5: return r5;
    case 6: return r6;
    case 7: return r7;
    case 8: return r8;
    case 9: return r9;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    default:
        throw InvalidConfiguration("unsupported Gauss-Legendre point count " + std::to_string(points));
    }
}

} // namespace fiber
