#include "dynlab/experiment.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynlab/exceptional.hpp"
#include "dynlab/geometry.hpp"
#include "dynlab/green1d.hpp"
#include "dynlab/measure.hpp"
#include "dynlab/parallel.hpp"
#include "dynlab/periodic.hpp"
#include "dynlab/spectrum.hpp"

namespace dynlab {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok) throw ConfigError(ctx + ": unknown field \"" + it.key() + "\"");
    }
}

cplx get_cplx(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(ctx + ": expected [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Point get_point(const json& v, int k, const std::string& ctx) {
    if (!v.is_array() || v.size() != 2 * static_cast<size_t>(k))
        throw ConfigError(ctx + ": expected " + fmt_int(2 * k) + " reals");
    for (const auto& x : v)
        if (!x.is_number()) throw ConfigError(ctx + ": expected reals");
    Point p(cplx(0.0), cplx(0.0));
    for (int i = 0; i < k; ++i)
        p.c[i] = cplx(v[2 * i].get<double>(), v[2 * i + 1].get<double>());
    return p;
}

// Strict, default-filling accessor for the experiment-specific params block;
// every key must be consumed by a getter, and the consumed values (defaults
// included) land in `resolved` for the manifest.
class Params {
  public:
    Params(const json& raw, std::string ctx) : raw_(raw), ctx_(std::move(ctx)) {
        if (!raw_.is_object()) throw ConfigError(ctx_ + ": params must be an object");
        resolved = json::object();
    }

    long long integer(const char* key, long long dflt, long long lo, long long hi) {
        long long v = dflt;
        if (mark(key)) {
            const json& x = raw_.at(key);
            if (!x.is_number_integer() && !x.is_number_unsigned())
                throw ConfigError(ctx_ + "." + key + ": expected an integer");
            v = x.get<long long>();
        }
        if (v < lo || v > hi)
            throw ConfigError(ctx_ + "." + key + ": out of range [" + fmt_int(lo) + ", " +
                              fmt_int(hi) + "]");
        resolved[key] = v;
        return v;
    }

    double real(const char* key, double dflt, double lo, double hi) {
        double v = dflt;
        if (mark(key)) {
            const json& x = raw_.at(key);
            if (!x.is_number()) throw ConfigError(ctx_ + "." + key + ": expected a number");
            v = x.get<double>();
        }
        if (!(v >= lo && v <= hi)) throw ConfigError(ctx_ + "." + key + ": out of range");
        resolved[key] = v;
        return v;
    }

    bool boolean(const char* key, bool dflt) {
        bool v = dflt;
        if (mark(key)) {
            const json& x = raw_.at(key);
            if (!x.is_boolean()) throw ConfigError(ctx_ + "." + key + ": expected a boolean");
            v = x.get<bool>();
        }
        resolved[key] = v;
        return v;
    }

    std::string str(const char* key, const char* dflt) {
        std::string v = dflt;
        if (mark(key)) {
            const json& x = raw_.at(key);
            if (!x.is_string()) throw ConfigError(ctx_ + "." + key + ": expected a string");
            v = x.get<std::string>();
        }
        resolved[key] = v;
        return v;
    }

    bool has(const char* key) const { return raw_.contains(key); }

    const json& node(const char* key) {
        mark(key);
        resolved[key] = raw_.at(key);
        return raw_.at(key);
    }

    void finish() const {
        for (auto it = raw_.begin(); it != raw_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError(ctx_ + ": unknown field \"" + it.key() + "\"");
    }

    json resolved;

  private:
    bool mark(const char* key) {
        if (!raw_.contains(key)) return false;
        used_.insert(key);
        return true;
    }

    const json& raw_;
    std::string ctx_;
    std::set<std::string> used_;
};

class Csv {
  public:
    explicit Csv(const char* header) : body_(header) { body_ += '\n'; }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) body_ += ',';
            body_ += c;
            first = false;
        }
        body_ += '\n';
    }
    const std::string& str() const { return body_; }

  private:
    std::string body_;
};

struct Run {
    MapSpec map;
    Domain V;
    uint64_t seed = 1;
    int workers = 1;
    json raw_params;
    // outputs
    std::string csv;
    std::string cloud;  // written to <prefix>.cloud when nonempty
    json params;        // resolved params for the manifest
    json results;
};

json domain_json(const Domain& V) {
    json d;
    switch (V.shape) {
        case Shape::Ball: d["shape"] = "Ball"; break;
        case Shape::Polydisc: d["shape"] = "Polydisc"; break;
        case Shape::Annulus2D: d["shape"] = "Annulus2D"; break;
    }
    json c = json::array();
    for (int i = 0; i < V.k; ++i)
        c.push_back(json::array({V.center[i].real(), V.center[i].imag()}));
    d["center"] = c;
    d["radii"] = V.radii;
    return d;
}

WeightedCloud walk_cloud(Run& r, Params& p, long long dw, long long dpw) {
    SampleOptions so;
    so.walkers = p.integer("walkers", dw, 1, 1000000);
    so.per_walker = p.integer("per_walker", dpw, 1, 1000000);
    so.burn_in = p.integer("burn_in", -1, -1, 100000);
    so.workers = r.workers;
    return sample_equilibrium(r.map, r.V, so, r.seed);
}

Point default_target(const Domain& V) {
    const double r = V.outer_radius();
    Point z = V.center;
    z.c[0] += cplx(0.30 * r, 0.17 * r);
    if (V.k == 2) z.c[1] += cplx(-0.31 * r, 0.14 * r);
    return z;
}

void run_validate(Run& r) {
    Params p(r.raw_params, "validate");
    const int bs = static_cast<int>(p.integer("boundary_samples", 256, 16, 100000));
    const double mf = p.real("margin_fraction", 0.01, 0.0, 0.5);
    p.finish();
    const ValidationReport rep = validate_polynomial_like(r.map, r.V, bs, mf);

    Csv csv("quantity,value");
    csv.row({"polynomial_like", fmt_int(rep.is_polynomial_like ? 1 : 0)});
    csv.row({"margin", fmt_g17(rep.margin)});
    csv.row({"required_margin", fmt_g17(rep.required_margin)});
    csv.row({"max_preimage_radius", fmt_g17(rep.max_preimage_radius)});
    csv.row({"outer_radius", fmt_g17(r.V.outer_radius())});
    csv.row({"lojasiewicz_ell", fmt_g17(rep.lojasiewicz_estimate.ell)});
    csv.row({"lojasiewicz_lambda", fmt_g17(rep.lojasiewicz_estimate.lambda)});
    csv.row({"topological_degree", fmt_int(r.map.dt)});
    r.csv = csv.str();

    r.params = p.resolved;
    r.results["polynomial_like"] = rep.is_polynomial_like;
    r.results["margin"] = rep.margin;
    r.results["required_margin"] = rep.required_margin;
    r.results["max_preimage_radius"] = rep.max_preimage_radius;
    r.results["lojasiewicz"] = {{"ell", rep.lojasiewicz_estimate.ell},
                                {"lambda", rep.lojasiewicz_estimate.lambda}};
    r.results["topological_degree"] = r.map.dt;
}

// Per-observable cloud integrals with block standard errors (blocks follow
// the walker layout so autocorrelation along a walk is respected).
void observable_rows(const WeightedCloud& c, const Domain& V, uint64_t seed,
                     long long count, Csv& csv, json& results) {
    auto fns = default_observables(c.k, V, seed, static_cast<int>(count));
    const size_t block =
        (c.provenance == Provenance::BackwardWalk && c.per_walker > 0)
            ? static_cast<size_t>(c.per_walker)
            : 1;
    json table = json::array();
    for (const auto& [name, fn] : fns) {
        if (c.provenance == Provenance::BackwardWalk) {
            std::vector<double> re(c.size()), im(c.size());
            for (size_t i = 0; i < c.size(); ++i) {
                const cplx v = fn(c.points[i]);
                re[i] = v.real();
                im[i] = v.imag();
            }
            const MeanSe mr = batch_mean_se(re, block);
            const MeanSe mi = batch_mean_se(im, block);
            csv.row({name, fmt_g17(mr.mean), fmt_g17(mi.mean), fmt_g17(mr.se),
                     fmt_g17(mi.se)});
            table.push_back({{"name", name},
                             {"re", mr.mean},
                             {"im", mi.mean},
                             {"se_re", mr.se},
                             {"se_im", mi.se}});
        } else {
            const cplx v = integrate(c, fn);
            csv.row({name, fmt_g17(v.real()), fmt_g17(v.imag()), fmt_g17(0.0),
                     fmt_g17(0.0)});
            table.push_back(
                {{"name", name}, {"re", v.real()}, {"im", v.imag()}, {"se_re", 0.0},
                 {"se_im", 0.0}});
        }
    }
    results["observables"] = table;
}

void run_sample(Run& r) {
    Params p(r.raw_params, "sample");
    const long long exact_n = p.integer("exact_n", 0, 0, 60);
    const long long cap = p.integer("cap", 1000000, 1, 1LL << 40);
    const long long nobs = p.integer("observables", 12, 0, 64);

    WeightedCloud c;
    if (exact_n > 0) {
        Point target = p.has("start") ? get_point(p.node("start"), r.map.k, "sample.start")
                                      : default_target(r.V);
        const long long total = degree_pow(r.map, static_cast<int>(exact_n), cap);
        const PreimageSet ps =
            iterated_fiber(r.map, target, static_cast<int>(exact_n), cap);
        c.k = r.map.k;
        c.provenance = Provenance::IteratedFiber;
        c.seed = r.seed;
        c.points.reserve(ps.points.size());
        c.weights.reserve(ps.points.size());
        for (const auto& pt : ps.points) {
            c.points.push_back(pt.w);
            c.weights.push_back(static_cast<double>(pt.multiplicity) /
                                static_cast<double>(total));
        }
        r.results["exact_n"] = exact_n;
    } else {
        SampleOptions so;
        so.walkers = p.integer("walkers", 100, 1, 1000000);
        so.per_walker = p.integer("per_walker", 100, 1, 1000000);
        so.burn_in = p.integer("burn_in", -1, -1, 100000);
        so.start_law = p.str("start_law", "uniform");
        if (p.has("start")) {
            so.start_point = get_point(p.node("start"), r.map.k, "sample.start");
            so.start_law = "point";
            p.resolved["start_law"] = "point";
        }
        so.workers = r.workers;
        c = sample_equilibrium(r.map, r.V, so, r.seed);
        r.results["kept_walkers"] = c.kept_walkers;
        r.results["burn_in"] = c.burn_in;
        r.results["start_law"] = c.start_law;
    }
    p.finish();

    Csv csv("name,re,im,se_re,se_im");
    observable_rows(c, r.V, r.seed, nobs, csv, r.results);
    r.csv = csv.str();

    std::ostringstream oss;
    save_cloud(c, oss);
    r.cloud = oss.str();

    r.params = p.resolved;
    r.results["count"] = static_cast<long long>(c.size());
    r.results["total_mass"] = c.total_mass();
}

void run_invariance(Run& r) {
    Params p(r.raw_params, "invariance");
    WeightedCloud c = walk_cloud(r, p, 100, 100);
    const long long nobs = p.integer("observables", 12, 1, 64);
    p.finish();

    auto fns = default_observables(r.map.k, r.V, r.seed, static_cast<int>(nobs));
    auto rows = invariance_report(r.map, c, fns);

    Csv csv("name,push_residual,push_se,pull_residual,pull_se");
    double worst = 0.0;
    json table = json::array();
    for (const auto& row : rows) {
        csv.row({row.name, fmt_g17(row.push_residual), fmt_g17(row.push_se),
                 fmt_g17(row.pull_residual), fmt_g17(row.pull_se)});
        if (row.push_se > 0) worst = std::max(worst, row.push_residual / row.push_se);
        if (row.pull_se > 0) worst = std::max(worst, row.pull_residual / row.pull_se);
        table.push_back({{"name", row.name},
                         {"push_residual", row.push_residual},
                         {"push_se", row.push_se},
                         {"pull_residual", row.pull_residual},
                         {"pull_se", row.pull_se}});
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["rows"] = table;
    r.results["max_sigmas"] = worst;
    r.results["count"] = static_cast<long long>(c.size());
}

void run_lyapunov(Run& r) {
    Params p(r.raw_params, "lyapunov");
    WeightedCloud c = walk_cloud(r, p, 100, 100);
    LyapOptions lo;
    lo.orbit_length = static_cast<int>(p.integer("orbit_length", 300, 2, 100000));
    lo.samples = static_cast<int>(p.integer("samples", 150, 1, 1000000));
    lo.workers = r.workers;
    p.finish();

    const LyapSpectrum s = lyapunov(r.map, c, lo, r.seed);

    Csv csv("quantity,value,stderr");
    for (size_t i = 0; i < s.exponents.size(); ++i)
        csv.row({"exponent_" + fmt_int(static_cast<long long>(i) + 1),
                 fmt_g17(s.exponents[i]), fmt_g17(s.se[i])});
    csv.row({"exponent_sum", fmt_g17(s.sum), fmt_g17(s.sum_se)});
    csv.row({"jacobian_integral", fmt_g17(s.jacobian_integral),
             fmt_g17(s.jacobian_integral_se)});
    csv.row({"log_real_jacobian", fmt_g17(2.0 * s.jacobian_integral),
             fmt_g17(2.0 * s.jacobian_integral_se)});
    csv.row({"log_degree", fmt_g17(std::log(static_cast<double>(r.map.dt))),
             fmt_g17(0.0)});
    r.csv = csv.str();

    r.params = p.resolved;
    r.results["exponents"] = s.exponents;
    r.results["se"] = s.se;
    r.results["exponent_sum"] = s.sum;
    r.results["jacobian_integral"] = s.jacobian_integral;
    r.results["jacobian_integral_se"] = s.jacobian_integral_se;
    r.results["log_real_jacobian"] = 2.0 * s.jacobian_integral;
    r.results["samples_used"] = s.samples_used;
    r.results["discarded"] = s.discarded;
}

void run_mixing(Run& r) {
    Params p(r.raw_params, "mixing");
    WeightedCloud c = walk_cloud(r, p, 200, 100);
    const int n_max = static_cast<int>(p.integer("n_max", 8, 1, 200));
    const long long nobs = p.integer("observables", 8, 1, 64);
    p.finish();

    auto fns = default_observables(r.map.k, r.V, r.seed, static_cast<int>(nobs));
    Csv csv("name,n,value,stderr");
    json rates = json::object();
    for (const auto& [name, fn] : fns) {
        const DecaySeries ds = mixing_decay(r.map, r.V, c, fn, fn, n_max);
        for (const auto& row : ds.rows)
            csv.row({name, fmt_int(row.n), fmt_g17(row.v), fmt_g17(row.se)});
        rates[name] = {{"fitted_rate", ds.fitted_rate},
                       {"fit_points", ds.fit_points},
                       {"fit_residual", ds.fit_residual}};
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["decay"] = rates;
    r.results["count"] = static_cast<long long>(c.size());
}

void run_entropy(Run& r) {
    Params p(r.raw_params, "entropy");
    WeightedCloud c = walk_cloud(r, p, 2000, 100);
    const int n_max = static_cast<int>(p.integer("n_max", 12, 2, 64));
    std::vector<double> eps;
    if (p.has("eps")) {
        for (const auto& e : p.node("eps")) {
            if (!e.is_number() || e.get<double>() <= 0.0)
                throw ConfigError("entropy.eps: expected positive reals");
            eps.push_back(e.get<double>());
        }
        if (eps.empty()) throw ConfigError("entropy.eps: empty");
    } else {
        const double R = r.V.outer_radius();
        for (double f : {0.30, 0.22, 0.16, 0.12}) eps.push_back(f * R);
        p.resolved["eps"] = eps;
    }
    p.finish();

    EntropyDetail det;
    const double est = entropy_estimate(r.map, r.V, c, eps, n_max, &det);

    Csv csv("epsilon,n,count");
    for (size_t e = 0; e < det.eps.size(); ++e)
        for (size_t j = 0; j < det.counts[e].size(); ++j)
            csv.row({fmt_g17(det.eps[e]), fmt_int(static_cast<long long>(j) + 1),
                     fmt_int(det.counts[e][j])});
    r.csv = csv.str();

    r.params = p.resolved;
    r.results["estimate"] = est;
    r.results["log_degree"] = std::log(static_cast<double>(r.map.dt));
    r.results["slopes"] = det.slopes;
    r.results["fit_lo"] = det.fit_lo;
    r.results["fit_hi"] = det.fit_hi;
    r.results["orbits"] = static_cast<long long>(c.size());
}

void run_periodic(Run& r) {
    Params p(r.raw_params, "periodic");
    const int n_min = static_cast<int>(p.integer("n_min", 1, 1, 40));
    const int n_max = static_cast<int>(p.integer("n_max", 6, 1, 40));
    if (n_max < n_min) throw ConfigError("periodic: n_max < n_min");
    const bool repelling_only = p.boolean("repelling_only", false);
    PeriodicOptions po;
    po.neutral_tol = p.real("neutral_tol", 1e-6, 0.0, 0.1);
    po.direct_degree_cap = static_cast<int>(p.integer("direct_degree_cap", 512, 2, 65536));
    po.count_cap = p.integer("count_cap", 2000000, 2, 1LL << 40);
    po.seed = r.seed;
    const long long sw = p.integer("walkers", 200, 1, 1000000);
    const long long spw = p.integer("per_walker", 100, 1, 1000000);
    p.finish();

    WeightedCloud seeds;
    bool have_seeds = false;

    Csv csv(r.map.k == 1 ? "period,re,im,mult1,class"
                         : "period,re1,im1,re2,im2,mult1,mult2,class");
    json periods = json::array();
    for (int n = n_min; n <= n_max; ++n) {
        PeriodicPointSet s;
        try {
            s = periodic_points(r.map, n, po);
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (!have_seeds && msg.find("no seed cloud") != std::string::npos) {
                SampleOptions so;
                so.walkers = sw;
                so.per_walker = spw;
                so.workers = r.workers;
                seeds = sample_equilibrium(r.map, r.V, so, r.seed);
                po.seeds = &seeds;
                have_seeds = true;
                s = periodic_points(r.map, n, po);
            } else {
                throw;
            }
        }
        long long repelling_mult = 0;
        for (const auto& pt : s.points) {
            if (pt.cls == PointClass::Repelling)
                repelling_mult += pt.multiplicity;
            if (repelling_only && pt.cls != PointClass::Repelling) continue;
            if (r.map.k == 1) {
                csv.row({fmt_int(n), fmt_g17(pt.z.c[0].real()), fmt_g17(pt.z.c[0].imag()),
                         fmt_g17(pt.mult_mod[0]), point_class_name(pt.cls)});
            } else {
                csv.row({fmt_int(n), fmt_g17(pt.z.c[0].real()), fmt_g17(pt.z.c[0].imag()),
                         fmt_g17(pt.z.c[1].real()), fmt_g17(pt.z.c[1].imag()),
                         fmt_g17(pt.mult_mod[0]), fmt_g17(pt.mult_mod[1]),
                         point_class_name(pt.cls)});
            }
        }
        periods.push_back({{"period", n},
                           {"expected", s.expected},
                           {"total", s.total},
                           {"distinct", static_cast<long long>(s.points.size())},
                           {"exact", s.exact},
                           {"count_lower_bound", s.count_lower_bound},
                           {"repelling_multiplicity", repelling_mult}});
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["periods"] = periods;
}

void append_degree_rows(Csv& csv, const DegreeTable& t) {
    for (const auto& row : t.rows)
        csv.row({fmt_int(t.l), fmt_int(row.n), fmt_g17(row.estimate), fmt_g17(row.se),
                 fmt_int(row.survivors)});
}

json degree_summary(const DegreeTable& t) {
    return {{"l", t.l},
            {"growth_rate", t.growth_rate},
            {"fit_rows", t.fit_rows},
            {"truncated", t.truncated},
            {"truncation_reason", t.truncation_reason}};
}

void run_degrees(Run& r) {
    Params p(r.raw_params, "degrees");
    const int n_max = static_cast<int>(p.integer("n_max", 5, 0, 64));
    const long long samples = p.integer("samples", 200000, 100, 1LL << 33);
    const double min_acc = p.real("min_acceptance", 1e-4, 0.0, 1.0);
    std::vector<int> ls;
    if (p.has("l")) {
        const json& lv = p.node("l");
        if (lv.is_number_integer() || lv.is_number_unsigned()) {
            ls.push_back(lv.get<int>());
        } else if (lv.is_array()) {
            for (const auto& x : lv) {
                if (!x.is_number_integer() && !x.is_number_unsigned())
                    throw ConfigError("degrees.l: expected integers");
                ls.push_back(x.get<int>());
            }
        } else {
            throw ConfigError("degrees.l: expected an integer or an array");
        }
        for (int l : ls)
            if (l < 0 || l > r.map.k) throw ConfigError("degrees.l: out of range");
    } else {
        for (int l = 0; l <= r.map.k; ++l) ls.push_back(l);
        p.resolved["l"] = ls;
    }
    p.finish();

    Csv csv("l,n,estimate,stderr,samples");
    json summary = json::array();
    for (int l : ls) {
        const DegreeTable t =
            degree_table(r.map, r.V, l, n_max, samples, r.seed, r.workers, min_acc);
        append_degree_rows(csv, t);
        summary.push_back(degree_summary(t));
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["tables"] = summary;
    r.results["log_degree"] = std::log(static_cast<double>(r.map.dt));
}

void run_plb(Run& r) {
    Params p(r.raw_params, "plb");
    const int n_max = static_cast<int>(p.integer("n_max", 6, 1, 64));
    const long long samples = p.integer("samples", 200000, 100, 1LL << 33);
    const double min_acc = p.real("min_acceptance", 1e-4, 0.0, 1.0);
    p.finish();

    const DegreeTable t =
        degree_table(r.map, r.V, 1, n_max, samples, r.seed, r.workers, min_acc);
    Csv csv("l,n,estimate,stderr,samples");
    append_degree_rows(csv, t);
    r.csv = csv.str();

    DecaySeries ds;
    double dn = 1.0;
    for (const auto& row : t.rows) {
        ds.rows.push_back({row.n, row.estimate / dn, row.se / dn});
        dn *= static_cast<double>(r.map.dt);
    }
    fit_decay(ds);
    json norm = json::array();
    for (const auto& row : ds.rows)
        norm.push_back({{"n", row.n}, {"v", row.v}, {"se", row.se}});

    const int ad = algebraic_degree(r.map);
    const double adk = std::pow(static_cast<double>(ad), r.map.k - 1);
    r.params = p.resolved;
    r.results["table"] = degree_summary(t);
    r.results["normalized"] = norm;
    r.results["fitted_rate"] = ds.fitted_rate;
    r.results["algebraic_degree"] = ad;
    r.results["alpha"] = adk / static_cast<double>(r.map.dt);
    r.results["alpha_applicable"] = static_cast<double>(r.map.dt) > adk;
}

void run_green(Run& r) {
    Params p(r.raw_params, "green");
    if (r.map.k != 1) throw ConfigError("green: one-dimensional maps only");
    const int n_max = static_cast<int>(p.integer("n_max", 200, 1, 100000));
    const double tol = p.real("tol", 1e-12, 1e-16, 1e-3);
    std::vector<cplx> pts;
    if (p.has("points")) {
        for (const auto& v : p.node("points")) pts.push_back(get_cplx(v, "green.points"));
        if (pts.empty()) throw ConfigError("green.points: empty");
    } else {
        const long long nx = p.integer("nx", 24, 1, 4096);
        const long long ny = p.integer("ny", 24, 1, 4096);
        const double R = r.V.outer_radius();
        const double re0 = p.real("re_min", r.V.center[0].real() - R, -1e6, 1e6);
        const double re1 = p.real("re_max", r.V.center[0].real() + R, -1e6, 1e6);
        const double im0 = p.real("im_min", r.V.center[0].imag() - R, -1e6, 1e6);
        const double im1 = p.real("im_max", r.V.center[0].imag() + R, -1e6, 1e6);
        if (re1 < re0 || im1 < im0) throw ConfigError("green: empty grid box");
        for (long long iy = 0; iy < ny; ++iy)
            for (long long ix = 0; ix < nx; ++ix) {
                const double x =
                    nx == 1 ? re0 : re0 + (re1 - re0) * static_cast<double>(ix) /
                                              static_cast<double>(nx - 1);
                const double y =
                    ny == 1 ? im0 : im0 + (im1 - im0) * static_cast<double>(iy) /
                                              static_cast<double>(ny - 1);
                pts.emplace_back(x, y);
            }
    }
    p.finish();

    std::vector<GreenValue> vals(pts.size());
    parallel_for(pts.size(), r.workers,
                 [&](size_t i) { vals[i] = green(r.map, pts[i], n_max, tol); });

    Csv csv("re,im,green_value,converged");
    long long conv = 0;
    double vmax = 0.0;
    for (const auto& g : vals) {
        csv.row({fmt_g17(g.z.real()), fmt_g17(g.z.imag()), fmt_g17(g.value),
                 fmt_int(g.converged ? 1 : 0)});
        if (g.converged) ++conv;
        vmax = std::max(vmax, g.value);
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["points"] = static_cast<long long>(pts.size());
    r.results["converged"] = conv;
    r.results["max_value"] = vmax;
}

void run_hausdorff(Run& r) {
    Params p(r.raw_params, "hausdorff");
    if (r.map.k != 1) throw ConfigError("hausdorff: one-dimensional maps only");
    WeightedCloud c = walk_cloud(r, p, 200, 100);
    p.finish();

    const HausdorffResult h = hausdorff_dimension(r.map, c);
    Csv csv("quantity,value,stderr");
    csv.row({"integral_log_deriv", fmt_g17(h.integral), fmt_g17(h.integral_se)});
    csv.row({"dimension", fmt_g17(h.hd), fmt_g17(h.se)});
    csv.row({"log_degree", fmt_g17(std::log(static_cast<double>(r.map.dt))), fmt_g17(0.0)});
    r.csv = csv.str();

    r.params = p.resolved;
    r.results["dimension"] = h.hd;
    r.results["se"] = h.se;
    r.results["integral_log_deriv"] = h.integral;
    r.results["integral_se"] = h.integral_se;
    r.results["count"] = static_cast<long long>(c.size());
}

AlgebraicSet parse_set(const json& sv, int k) {
    if (!sv.is_object()) throw ConfigError("exceptional.set: expected an object");
    check_keys(sv, "exceptional.set", {"lines", "points"});
    AlgebraicSet X;
    X.k = k;
    if (sv.contains("lines")) {
        if (k != 2) throw ConfigError("exceptional.set.lines: lines need two dimensions");
        for (const auto& lv : sv["lines"]) {
            if (!lv.is_object()) throw ConfigError("exceptional.set.lines: expected objects");
            check_keys(lv, "exceptional.set.lines", {"coord", "value"});
            if (!lv.contains("coord") || !lv.contains("value"))
                throw ConfigError("exceptional.set.lines: needs coord and value");
            AxisLine ln;
            ln.coord = lv["coord"].get<int>();
            if (ln.coord < 0 || ln.coord >= k)
                throw ConfigError("exceptional.set.lines: coord out of range");
            ln.value = get_cplx(lv["value"], "exceptional.set.lines.value");
            X.lines.push_back(ln);
        }
    }
    if (sv.contains("points"))
        for (const auto& pv : sv["points"])
            X.points.push_back(get_point(pv, k, "exceptional.set.points"));
    if (X.empty()) throw ConfigError("exceptional.set: empty");
    return X;
}

void run_exceptional(Run& r) {
    Params p(r.raw_params, "exceptional");
    if (!p.has("set")) throw ConfigError("exceptional: missing \"set\"");
    const AlgebraicSet X = parse_set(p.node("set"), r.map.k);
    const int n_max = static_cast<int>(p.integer("n_max", 6, 0, 30));
    const double tol = p.real("tol", 1e-8, 1e-15, 1e-2);
    const long long cap = p.integer("cap", 1000000, 1, 1LL << 40);
    std::vector<Point> probes;
    if (p.has("probe_points")) {
        for (const auto& v : p.node("probe_points"))
            probes.push_back(get_point(v, r.map.k, "exceptional.probe_points"));
        if (probes.empty()) throw ConfigError("exceptional.probe_points: empty");
    } else {
        const long long np = p.integer("probes", 20, 1, 10000);
        probes = probes_on_set(X, r.V, static_cast<int>(np), r.seed);
    }
    p.finish();

    const auto verdicts = exceptional_verdicts(r.map, X, probes, n_max, tol, cap, r.workers);

    Csv csv(r.map.k == 1 ? "probe_re,probe_im,n,count,ratio,verdict"
                         : "probe_re1,probe_im1,probe_re2,probe_im2,n,count,ratio,verdict");
    json table = json::array();
    long long members = 0;
    for (const auto& v : verdicts) {
        const char* verdict = v.member ? "MEMBER" : "NONMEMBER";
        for (const auto& row : v.rows) {
            if (r.map.k == 1)
                csv.row({fmt_g17(v.probe.c[0].real()), fmt_g17(v.probe.c[0].imag()),
                         fmt_int(row.n), fmt_int(row.count), fmt_g17(row.ratio), verdict});
            else
                csv.row({fmt_g17(v.probe.c[0].real()), fmt_g17(v.probe.c[0].imag()),
                         fmt_g17(v.probe.c[1].real()), fmt_g17(v.probe.c[1].imag()),
                         fmt_int(row.n), fmt_int(row.count), fmt_g17(row.ratio), verdict});
        }
        if (v.member) ++members;
        table.push_back({{"member", v.member}, {"drop_n", v.drop_n}, {"tau", v.tau}});
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["probes"] = static_cast<long long>(probes.size());
    r.results["members"] = members;
    r.results["verdicts"] = table;
}

void run_sweep(Run& r) {
    Params p(r.raw_params, "sweep");
    const std::string param = p.str("param", "");
    if (param != "c" && param != "lambda")
        throw ConfigError("sweep.param: expected \"c\" or \"lambda\"");
    const double dre0 = param == "c" ? -2.25 : 1.2;
    const double dre1 = param == "c" ? 0.75 : 4.6;
    const double dim0 = param == "c" ? -1.1 : -0.8;
    const double dim1 = param == "c" ? 1.1 : 0.8;
    const double re0 = p.real("re_min", dre0, -1e6, 1e6);
    const double re1 = p.real("re_max", dre1, -1e6, 1e6);
    const double im0 = p.real("im_min", dim0, -1e6, 1e6);
    const double im1 = p.real("im_max", dim1, -1e6, 1e6);
    const long long nx = p.integer("nx", 7, 1, 256);
    const long long ny = p.integer("ny", 7, 1, 256);
    if (re1 < re0 || im1 < im0) throw ConfigError("sweep: empty grid box");
    SweepOptions so;
    so.walkers = p.integer("walkers", 40, 1, 1000000);
    so.per_walker = p.integer("per_walker", 50, 1, 1000000);
    so.orbit_length = static_cast<int>(p.integer("orbit_length", 150, 2, 100000));
    so.samples = static_cast<int>(p.integer("samples", 60, 1, 1000000));
    so.workers = r.workers;

    std::vector<cplx> grid;
    for (long long iy = 0; iy < ny; ++iy)
        for (long long ix = 0; ix < nx; ++ix) {
            const double x = nx == 1 ? re0
                                     : re0 + (re1 - re0) * static_cast<double>(ix) /
                                                 static_cast<double>(nx - 1);
            const double y = ny == 1 ? im0
                                     : im0 + (im1 - im0) * static_cast<double>(iy) /
                                                 static_cast<double>(ny - 1);
            grid.emplace_back(x, y);
        }

    int center_index = -1;
    std::vector<int> ring;
    if (p.has("submean")) {
        const json& sm = p.node("submean");
        if (!sm.is_object()) throw ConfigError("sweep.submean: expected an object");
        check_keys(sm, "sweep.submean", {"center", "radius", "points"});
        if (!sm.contains("center") || !sm.contains("radius"))
            throw ConfigError("sweep.submean: needs center and radius");
        const cplx ctr = get_cplx(sm["center"], "sweep.submean.center");
        const double rad = sm["radius"].get<double>();
        if (!(rad > 0.0)) throw ConfigError("sweep.submean.radius: must be positive");
        const int npts = sm.contains("points") ? sm["points"].get<int>() : 8;
        if (npts < 3 || npts > 256) throw ConfigError("sweep.submean.points: out of range");
        center_index = static_cast<int>(grid.size());
        grid.push_back(ctr);
        for (int j = 0; j < npts; ++j) {
            const double a = 2.0 * std::numbers::pi * j / npts;
            ring.push_back(static_cast<int>(grid.size()));
            grid.push_back(ctr + rad * cplx(std::cos(a), std::sin(a)));
        }
    }
    p.finish();

    const SweepResult res = lyapunov_sweep(r.map, param, grid, center_index, ring, so, r.seed);

    Csv csv("s_re,s_im,h,stderr,valid");
    json notes = json::array();
    long long valid = 0;
    for (const auto& row : res.rows) {
        csv.row({fmt_g17(row.s.real()), fmt_g17(row.s.imag()), fmt_g17(row.h),
                 fmt_g17(row.se), fmt_int(row.valid ? 1 : 0)});
        if (row.valid)
            ++valid;
        else if (!row.note.empty())
            notes.push_back({{"s_re", row.s.real()}, {"s_im", row.s.imag()},
                             {"note", row.note}});
    }
    r.csv = csv.str();
    r.params = p.resolved;
    r.results["grid_points"] = static_cast<long long>(res.rows.size());
    r.results["valid"] = valid;
    r.results["invalid_notes"] = notes;
    if (res.has_center) {
        r.results["submean"] = {{"center_h", res.center_h},
                                {"center_se", res.center_se},
                                {"ring_mean", res.ring_mean},
                                {"ring_se", res.ring_se},
                                {"submean_ok", res.submean_ok}};
    }
}

MapSpec load_map(const json& mv, const fs::path& base_dir) {
    if (mv.is_string()) {
        fs::path p = mv.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open map file " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_map_spec(ss.str());
    }
    if (mv.is_object()) return parse_map_spec(mv.dump());
    throw ConfigError("map: expected a file path or an inline object");
}

void dispatch(const std::string& exp, Run& r) {
    if (exp == "validate") return run_validate(r);
    if (exp == "sample") return run_sample(r);
    if (exp == "invariance") return run_invariance(r);
    if (exp == "lyapunov") return run_lyapunov(r);
    if (exp == "mixing") return run_mixing(r);
    if (exp == "entropy") return run_entropy(r);
    if (exp == "periodic") return run_periodic(r);
    if (exp == "degrees") return run_degrees(r);
    if (exp == "plb") return run_plb(r);
    if (exp == "green") return run_green(r);
    if (exp == "hausdorff") return run_hausdorff(r);
    if (exp == "exceptional") return run_exceptional(r);
    if (exp == "sweep") return run_sweep(r);
    throw ConfigError("config: unknown experiment \"" + exp + "\"");
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw NumericalError("cannot write " + p.string());
    out << body;
    out.flush();
    if (!out) throw NumericalError("write failed for " + p.string());
}

void remove_outputs(const fs::path& prefix_csv, const fs::path& prefix_cloud,
                    const fs::path& prefix_manifest) {
    std::error_code ec;
    fs::remove(prefix_csv, ec);
    fs::remove(prefix_cloud, ec);
    fs::remove(prefix_manifest, ec);
}

}  // namespace

int run_experiment(const CliOptions& opts, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::path csv_path, cloud_path, manifest_path;
    try {
        std::ifstream in(opts.config_path);
        if (!in) throw ConfigError("cannot open config " + opts.config_path);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config parse: ") + e.what());
        }
        if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
        check_keys(cfg, "config", {"experiment", "map", "seed", "out", "workers", "params"});
        if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
            throw ConfigError("config: missing experiment name");
        const std::string exp = cfg["experiment"].get<std::string>();
        if (!cfg.contains("map")) throw ConfigError("config: missing \"map\"");

        Run r;
        r.map = load_map(cfg["map"], fs::absolute(fs::path(opts.config_path)).parent_path());
        r.V = resolve_domain(r.map);
        if (!r.map.has_domain) {
            r.map.domain = r.V;
            r.map.has_domain = true;
        }

        r.seed = 1;
        if (cfg.contains("seed")) {
            if (!cfg["seed"].is_number_integer() && !cfg["seed"].is_number_unsigned())
                throw ConfigError("config.seed: expected an integer");
            r.seed = cfg["seed"].get<uint64_t>();
        }
        if (opts.seed) r.seed = *opts.seed;

        std::string prefix = exp;
        if (cfg.contains("out")) {
            if (!cfg["out"].is_string()) throw ConfigError("config.out: expected a string");
            prefix = cfg["out"].get<std::string>();
        }
        if (opts.out_prefix) prefix = *opts.out_prefix;
        if (prefix.empty()) throw ConfigError("config.out: empty output prefix");

        json workers_requested = 1;
        if (cfg.contains("workers")) workers_requested = cfg["workers"];
        if (opts.workers) {
            const std::string& w = *opts.workers;
            if (w == "auto") {
                workers_requested = "auto";
            } else {
                try {
                    size_t pos = 0;
                    const int v = std::stoi(w, &pos);
                    if (pos != w.size() || v < 1) throw std::invalid_argument(w);
                    workers_requested = v;
                } catch (const std::exception&) {
                    throw ConfigError("--workers: expected a positive integer or \"auto\"");
                }
            }
        }
        if (workers_requested.is_string()) {
            if (workers_requested.get<std::string>() != "auto")
                throw ConfigError("config.workers: expected a positive integer or \"auto\"");
            r.workers = resolve_workers(0);
        } else if (workers_requested.is_number_integer() ||
                   workers_requested.is_number_unsigned()) {
            const int v = workers_requested.get<int>();
            if (v < 1) throw ConfigError("config.workers: must be >= 1");
            r.workers = v;
        } else {
            throw ConfigError("config.workers: expected a positive integer or \"auto\"");
        }

        r.raw_params = cfg.contains("params") ? cfg["params"] : json::object();

        csv_path = prefix + ".csv";
        cloud_path = prefix + ".cloud";
        manifest_path = prefix + ".manifest";

        dispatch(exp, r);

        write_file(csv_path, r.csv);
        if (!r.cloud.empty()) write_file(cloud_path, r.cloud);

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json manifest;
        manifest["version"] = kVersion;
        manifest["experiment"] = exp;
        manifest["seed"] = r.seed;
        manifest["workers"] = r.workers;
        manifest["workers_requested"] = workers_requested;
        manifest["map"] = json::parse(serialize_map_spec(r.map));
        manifest["resolved_domain"] = domain_json(r.V);
        manifest["params"] = r.params;
        json outputs;
        outputs["csv"] = csv_path.string();
        if (!r.cloud.empty())
            outputs["cloud"] = cloud_path.string();
        else
            outputs["cloud"] = nullptr;
        manifest["outputs"] = outputs;
        manifest["results"] = r.results;
        manifest["wall_time_s"] = wall;
        manifest["status"] = "ok";
        write_file(manifest_path, manifest.dump(2) + "\n");
        return 0;
    } catch (const ConfigError& e) {
        remove_outputs(csv_path, cloud_path, manifest_path);
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        remove_outputs(csv_path, cloud_path, manifest_path);
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        remove_outputs(csv_path, cloud_path, manifest_path);
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace dynlab
