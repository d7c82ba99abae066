#include "qagg/rng.hpp"

#include "qagg/stats.hpp"

namespace qagg {

double Rng::normal() {
    // Keep u strictly inside (0,1); uniform() can return exactly 0.
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return norm_quantile(u);
}

} // namespace qagg
