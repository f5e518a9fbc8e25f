#include "dynlab/cloud.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dynlab/stats.hpp"

namespace dynlab {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::BackwardWalk: return "backward_walk";
        case Provenance::IteratedFiber: return "iterated_fiber";
        case Provenance::PeriodicPoints: return "periodic_points";
        case Provenance::Pullback: return "pullback";
        case Provenance::Loaded: return "loaded";
    }
    return "?";
}

double WeightedCloud::total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void WeightedCloud::require_probability(double tol) const {
    if (points.size() != weights.size())
        throw NumericalError("cloud: point/weight size mismatch");
    for (double w : weights)
        if (!(w >= 0.0)) throw NumericalError("cloud: negative weight");
    if (std::abs(total_mass() - 1.0) > tol)
        throw NumericalError("cloud: weights sum to " + fmt_g17(total_mass()) +
                             ", expected 1");
}

cplx integrate(const WeightedCloud& c, const Obs& f) {
    cplx s = 0.0;
    for (size_t i = 0; i < c.points.size(); ++i) s += c.weights[i] * f(c.points[i]);
    return s;
}

double integrate_real(const WeightedCloud& c, const std::function<double(const Point&)>& f) {
    double s = 0.0;
    for (size_t i = 0; i < c.points.size(); ++i) s += c.weights[i] * f(c.points[i]);
    return s;
}

void save_cloud(const WeightedCloud& c, std::ostream& os) {
    os << "# cloud v1\n";
    os << "# dimension " << c.k << "\n";
    os << "# count " << c.points.size() << "\n";
    os << "# seed " << c.seed << "\n";
    os << "# provenance " << provenance_name(c.provenance) << "\n";
    os << "# walkers " << c.walkers << "\n";
    os << "# per_walker " << c.per_walker << "\n";
    os << "# burn_in " << c.burn_in << "\n";
    os << "# kept_walkers " << c.kept_walkers << "\n";
    os << "# start_law " << (c.start_law.empty() ? "-" : c.start_law) << "\n";
    for (size_t i = 0; i < c.points.size(); ++i) {
        os << fmt_g17(c.points[i].c[0].real()) << ',' << fmt_g17(c.points[i].c[0].imag());
        if (c.k == 2)
            os << ',' << fmt_g17(c.points[i].c[1].real()) << ','
               << fmt_g17(c.points[i].c[1].imag());
        os << ',' << fmt_g17(c.weights[i]) << "\n";
    }
}

WeightedCloud load_cloud(std::istream& is) {
    WeightedCloud c;
    c.provenance = Provenance::Loaded;
    std::string line;
    size_t expect = 0;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream h(line.substr(1));
            std::string key;
            h >> key;
            if (key == "cloud") {
                seen_header = true;
            } else if (key == "dimension") {
                h >> c.k;
            } else if (key == "count") {
                h >> expect;
            } else if (key == "seed") {
                h >> c.seed;
            } else if (key == "provenance") {
                std::string v;
                h >> v;
                for (Provenance p : {Provenance::BackwardWalk, Provenance::IteratedFiber,
                                     Provenance::PeriodicPoints, Provenance::Pullback,
                                     Provenance::Loaded})
                    if (provenance_name(p) == v) c.provenance = p;
            } else if (key == "walkers") {
                h >> c.walkers;
            } else if (key == "per_walker") {
                h >> c.per_walker;
            } else if (key == "burn_in") {
                h >> c.burn_in;
            } else if (key == "kept_walkers") {
                h >> c.kept_walkers;
            } else if (key == "start_law") {
                h >> c.start_law;
                if (c.start_law == "-") c.start_law.clear();
            }
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        size_t need = (c.k == 2) ? 5 : 3;
        if (vals.size() != need)
            throw ConfigError("cloud file: row has wrong number of columns");
        Point p(cplx(vals[0], vals[1]));
        if (c.k == 2) p.c[1] = cplx(vals[2], vals[3]);
        c.points.push_back(p);
        c.weights.push_back(vals[need - 1]);
    }
    if (!seen_header) throw ConfigError("cloud file: missing header");
    if (expect != 0 && expect != c.points.size())
        throw ConfigError("cloud file: count header disagrees with rows");
    return c;
}

void save_cloud_file(const WeightedCloud& c, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for write: " + path);
    save_cloud(c, os);
}

WeightedCloud load_cloud_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open: " + path);
    return load_cloud(is);
}

}  // namespace dynlab
