#include "ibrt/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "ibrt/error.hpp"

namespace ibrt {

namespace {

double decoder_distance(const DecoderRoot& r, std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t y = 0; y < r.ny(); ++y) d = std::max(d, std::abs(r.decoders(y, a) - r.decoders(y, b)));
    return d;
}

}  // namespace

ReductionReport reduce_root(const DecoderRoot& root, double delta1, double delta2) {
    if (!(delta1 > 0.0 && delta1 < 1.0) || !(delta2 > 0.0 && delta2 < 1.0))
        throw InputError("reduction thresholds must lie in (0, 1)");
    if (root.clusters() == 0) throw EmptyRoot("cannot reduce a root without clusters");

    ReductionReport rep;
    std::vector<std::size_t> alive;
    for (std::size_t t = 0; t < root.clusters(); ++t) {
        if (root.marginal[t] < delta1)
            rep.removed.push_back(t);
        else
            alive.push_back(t);
    }
    if (alive.empty()) throw EmptyRoot("every cluster has mass below delta1");

    std::vector<double> mass;
    for (std::size_t t : alive) mass.push_back(root.marginal[t]);

    bool again = true;
    while (again) {
        again = false;
        for (std::size_t i = 0; i < alive.size() && !again; ++i)
            for (std::size_t j = i + 1; j < alive.size(); ++j)
                if (decoder_distance(root, alive[i], alive[j]) < delta2) {
                    rep.merged.emplace_back(alive[i], alive[j]);
                    mass[i] += mass[j];
                    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(j));
                    mass.erase(mass.begin() + static_cast<std::ptrdiff_t>(j));
                    again = true;
                    break;
                }
    }

    rep.changed = !rep.removed.empty() || !rep.merged.empty();
    if (!rep.changed) {
        rep.root = root;
        return rep;
    }
    double total = 0.0;
    for (double m : mass) total += m;
    rep.root.beta = root.beta;
    rep.root.decoders = Matrix(root.ny(), alive.size());
    rep.root.marginal.resize(alive.size());
    for (std::size_t k = 0; k < alive.size(); ++k) {
        for (std::size_t y = 0; y < root.ny(); ++y) rep.root.decoders(y, k) = root.decoders(y, alive[k]);
        rep.root.marginal[k] = mass[k] / total;
    }
    return rep;
}

std::size_t effective_cardinality(const DecoderRoot& root, double delta1, double delta2) {
    return reduce_root(root, delta1, delta2).root.clusters();
}

}  // namespace ibrt
