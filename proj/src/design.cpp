// Latin hypercube and Sobol point sets.
#include "spheroid/design.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spheroid/error.hpp"

namespace spheroid {

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, Draws& draws) {
    if (n == 0 || dim == 0) throw InputError("latin hypercube needs n >= 1 and dim >= 1");
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> strata(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        // fisher-yates driven by the caller's stream
        for (std::size_t i = n; i > 1; --i) {
            auto j = static_cast<std::size_t>(draws.uniform() * static_cast<double>(i));
            if (j >= i) j = i - 1;
            std::swap(strata[i - 1], strata[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double u = draws.uniform();
            pts[i][d] = (static_cast<double>(strata[i]) + u) / static_cast<double>(n);
        }
    }
    return pts;
}

std::vector<std::vector<double>> sobol_points(std::size_t n, std::size_t dim, Draws& draws) {
    if (n == 0 || dim == 0) throw InputError("sobol sequence needs n >= 1 and dim >= 1");
    boost::random::sobol engine(dim);  // 64-bit lattice
    std::vector<std::uint64_t> shift(dim);
    for (auto& s : shift) {
        auto word = static_cast<std::uint64_t>(draws.uniform() * 4294967296.0);
        if (word > 0xFFFFFFFFull) word = 0xFFFFFFFFull;
        s = word << 32;  // align with the engine's high bits
    }
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim, 0.0));
    // the engine emits one component per invocation, cycling dimensions
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            auto raw = static_cast<std::uint64_t>(engine());
            // top 53 bits convert to double exactly, keeping values below 1
            pts[i][d] = std::ldexp(static_cast<double>((raw ^ shift[d]) >> 11), -53);
        }
    }
    return pts;
}

std::vector<double> scale_to_box(const std::vector<double>& unit, const std::vector<Bounds>& box) {
    if (unit.size() != box.size()) throw InputError("design point and box dimensions differ");
    std::vector<double> out(unit.size());
    for (std::size_t d = 0; d < unit.size(); ++d)
        out[d] = box[d].lo + (box[d].hi - box[d].lo) * unit[d];
    return out;
}

}  // namespace spheroid
