// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "output.hpp"
#include "vf/characteristics.hpp"
#include "vf/collision.hpp"
#include "vf/error.hpp"
#include "vf/grazing.hpp"
#include "vf/kinetic.hpp"
#include "vf/transport.hpp"

namespace vf::cli {

namespace {

constexpr double pi = std::numbers::pi;

const char* kCertWarning =
    "warning: the continuity windows delta_T, delta_X, delta_V are inputs; they parameterize "
    "the certificate rather than being derived from the bounds";

[[noreturn]] void config_fail(const RunConfig& cfg, const std::string& msg)
{
    throw Error(Errc::config_error, cfg.path + ": " + msg);
}

void need(const RunConfig& cfg, bool present, const std::string& block)
{
    if (!present)
        throw Error(Errc::config_error,
                    cfg.path + ":1: missing required table [" + block + "]");
}

Vec to_vec(const std::vector<double>& a)
{
    Vec v;
    for (std::size_t i = 0; i < a.size() && i < 3; ++i)
        v[i] = a[i];
    return v;
}

int domain_dim(const RunConfig& cfg) { return make_domain(*cfg.domain).dim(); }

Kernel make_kernel(const RunConfig& cfg) { return build_kernel(*cfg.kernel); }

void check_dim(const RunConfig& cfg, const std::vector<double>& a, int dim, const std::string& key)
{
    if (!a.empty() && static_cast<int>(a.size()) != dim)
        config_fail(cfg, key + " must have " + std::to_string(dim) + " components");
}

void check_positive(const RunConfig& cfg, double x, const std::string& key)
{
    if (!(x > 0) || !std::isfinite(x))
        config_fail(cfg, key + " must be positive");
}

Vec domain_middle(const RunConfig& cfg, const ConvexDomain& dom)
{
    return dom.is_torus() ? 0.5 * to_vec(cfg.domain->period) : dom.center();
}

McSpec mc_spec(const RunConfig& cfg, std::uint64_t samples)
{
    McSpec mc;
    mc.samples = samples;
    mc.seed = cfg.seed;
    return mc;
}

json kernel_json(const Kernel& k)
{
    const KernelParams& p = k.params();
    json j;
    j["name"] = p.name;
    j["dim"] = p.dim;
    j["gamma"] = p.gamma;
    j["nu"] = p.nu;
    j["b0"] = p.b0;
    j["cutoff"] = k.is_cutoff();
    return j;
}

//! Integral values print without a fractional part
json exact_number(double x)
{
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15)
        return static_cast<std::int64_t>(x);
    return x;
}

// ---------------------------------------------------------------- trace

void cmd_trace(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    ConvexDomain dom = make_domain(*cfg.domain);
    const TraceOpts& o = *cfg.trace;
    int d = dom.dim();
    ReboundChain chain = rebound_sequence(dom, to_vec(o.x), to_vec(o.v), o.horizon, o.max_rebounds);

    CsvWriter csv(out.file("trace.csv"));
    std::vector<std::string> cols{"k", "t_k"};
    for (int i = 0; i < d; ++i)
        cols.push_back("x_k" + std::to_string(i));
    for (int i = 0; i < d; ++i)
        cols.push_back("v_k" + std::to_string(i));
    cols.push_back("class");
    csv.header(cols);
    for (const auto& e : chain.events)
    {
        csv.cell(static_cast<long long>(e.k)).cell(e.t);
        for (int i = 0; i < d; ++i)
            csv.cell(e.x[i]);
        for (int i = 0; i < d; ++i)
            csv.cell(e.v[i]);
        std::string cls = "stop";
        if (std::isfinite(e.t))
            cls = to_string(classify_boundary(dom, e.x, specular_reflect(e.v, dom.normal_at(e.x))));
        csv.cell(cls);
        csv.end_row();
    }
    csv.close();

    int rebounds = static_cast<int>(chain.events.size()) - (chain.stopped ? 1 : 0);
    json j = envelope(cfg, "trace");
    json r;
    r["domain"] = dom.name();
    r["rebounds"] = rebounds;
    r["truncated"] = chain.truncated;
    r["stopped"] = chain.stopped;
    j["result"] = r;
    out.write_json("trace.json", j);
    log << "trace: " << rebounds << " rebounds within horizon " << fmt_num(o.horizon) << "\n";
}

// ---------------------------------------------------------------- classify

void cmd_classify(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    ConvexDomain dom = make_domain(*cfg.domain);
    const ClassifyOpts& o = *cfg.classify;
    int d = dom.dim();
    std::vector<std::pair<Vec, Vec>> pairs;
    for (const auto& row : o.pairs)
        pairs.emplace_back(to_vec({row.begin(), row.begin() + d}),
                           to_vec({row.begin() + d, row.end()}));
    CounterRng rng(cfg.seed, 0xC1A55);
    for (int i = 0; i < o.random; ++i)
    {
        BoundarySample b = dom.sample_boundary(rng);
        pairs.emplace_back(b.x, rng.unit_vector(d));
    }

    CsvWriter csv(out.file("classify.csv"));
    std::vector<std::string> cols{"index"};
    for (int i = 0; i < d; ++i)
        cols.push_back("x" + std::to_string(i));
    for (int i = 0; i < d; ++i)
        cols.push_back("v" + std::to_string(i));
    cols.push_back("class");
    cols.push_back("t_min");
    csv.header(cols);
    json counts = {{"rebounds", 0}, {"rolling", 0}, {"stop", 0}, {"line", 0}};
    for (std::size_t q = 0; q < pairs.size(); ++q)
    {
        const auto& [x, v] = pairs[q];
        BoundaryClass c;
        try
        {
            c = classify_boundary(dom, x, v);
        }
        catch (const Error& e)
        {
            if (e.code() == Errc::not_on_boundary || e.code() == Errc::zero_velocity)
                config_fail(cfg, "classify pair " + std::to_string(q) + ": " + e.what());
            throw;
        }
        counts[to_string(c)] = counts[to_string(c)].get<int>() + 1;
        csv.cell(static_cast<long long>(q));
        for (int i = 0; i < d; ++i)
            csv.cell(x[i]);
        for (int i = 0; i < d; ++i)
            csv.cell(v[i]);
        csv.cell(std::string(to_string(c))).cell(t_min_backward(dom, x, v));
        csv.end_row();
    }
    csv.close();
    json j = envelope(cfg, "classify");
    j["result"] = {{"domain", dom.name()}, {"pairs", pairs.size()}, {"counts", counts}};
    out.write_json("classify.json", j);
    log << "classify: " << pairs.size() << " pairs\n";
}

// ---------------------------------------------------------------- transport

PhaseField make_u0(const RunConfig& cfg, const ConvexDomain& dom)
{
    const TransportOpts& o = *cfg.transport;
    Vec x0 = o.x0.empty() ? domain_middle(cfg, dom) : to_vec(o.x0);
    Vec v0 = to_vec(o.v0);
    if (o.u0 == "gaussian")
        return gaussian_field(x0, o.sigma_x, v0, o.sigma_v);
    if (o.u0 == "bump")
        return bump_field(x0, o.radius_x, v0, o.radius_v);
    if (o.u0 == "indicator")
        return indicator_field(x0, o.radius_x, v0, o.radius_v);
    if (o.u0 == "polynomial")
        return polynomial_field(o.a, o.b, o.c);
    config_fail(cfg, "transport.u0 must be gaussian, bump, indicator or polynomial");
}

void cmd_transport(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    ConvexDomain dom = make_domain(*cfg.domain);
    const TransportOpts& o = *cfg.transport;
    PhaseField u0 = make_u0(cfg, dom);
    QuadratureSpec q;
    q.nx = o.nx;
    q.nv = o.nv;
    q.rv = o.rv;
    if (o.tol >= 0)
        q.tol = o.tol;
    L2Report rep = l2_report(dom, u0, o.times, q);

    CsvWriter csv(out.file("transport.csv"));
    csv.header({"t", "l2", "drift", "truncated"});
    json entries = json::array();
    for (const auto& e : rep.entries)
    {
        csv.cell(e.t).cell(e.l2).cell(e.drift).cell(static_cast<long long>(e.truncated));
        csv.end_row();
        entries.push_back({{"t", e.t}, {"l2", e.l2}, {"drift", e.drift}, {"truncated", e.truncated}});
    }
    csv.close();
    json j = envelope(cfg, "transport");
    json r;
    r["domain"] = dom.name();
    r["u0"] = o.u0;
    r["nx"] = o.nx;
    r["nv"] = o.nv;
    r["rv"] = o.rv;
    r["max_drift"] = rep.max_drift;
    r["error_estimate"] = rep.error_estimate;
    r["entries"] = entries;
    j["result"] = r;
    out.write_json("transport.json", j);
    log << "transport: max L2 drift " << fmt_num(rep.max_drift) << "\n";
}

// ---------------------------------------------------------------- lemma-check

struct LemmaValue
{
    double estimate = 0;
    double stderr_ = 0;
};

LemmaValue bound_constant(const RunConfig& cfg, const Kernel& k, int nv)
{
    const LemmaOpts& o = *cfg.lemma_check;
    int d = k.dim();
    VelocityGrid g{d, o.rv, nv};
    validate(g);
    GridFunction m(g, [d](const Vec& v) { return std::exp(-norm2(v) / 2) / std::pow(2 * pi, d / 2.0); });
    std::vector<Vec> probes;
    for (Vec p : {Vec(0, 0, 0), Vec(1, 0, 0), Vec(0, 2, 0), Vec(1.5, 1.5, 0)})
        if (norm(p) < o.rv)
            probes.push_back(p);
    BoundFit f = fit_bound_constants(k, o.eps, m, m, probes, mc_spec(cfg, o.samples));
    if (o.lemma == "loss_bound")
        return {f.c_loss, 0};
    if (o.lemma == "s_bound")
        return {f.c_s, f.c_s * f.s_rel_se};
    return {f.c_q1, f.c_q1 * f.q1_rel_se};
}

void cmd_lemma(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    const LemmaOpts& o = *cfg.lemma_check;
    Kernel k = make_kernel(cfg);
    json params;
    params["kernel"] = kernel_json(k);
    params["rv"] = o.rv;
    params["nv"] = o.nv;
    params["samples"] = o.samples;
    params["target_rel_se"] = o.target_rel_se;
    LemmaValue v;
    bool pass = false;
    std::string constant;
    json extra;
    if (o.lemma == "spreading")
    {
        Vec vbar = to_vec(o.vbar);
        params["vbar"] = vec_json(vbar, k.dim());
        params["r"] = o.r;
        params["R"] = o.R;
        params["xi"] = o.xi;
        VelocityGrid g{k.dim(), o.rv, o.nv};
        validate(g);
        SpreadingResult s = spreading_constant(k, vbar, o.r, o.R, o.xi, g, mc_spec(cfg, o.samples),
                                               o.target_rel_se);
        v = {s.estimate, s.stderr_};
        pass = s.estimate > 0 && s.max_rel_se <= o.target_rel_se;
        extra["min_value"] = s.min_value;
        extra["scale"] = s.scale;
        extra["argmin"] = vec_json(s.argmin, k.dim());
        extra["nodes"] = s.nodes;
        extra["max_rel_se"] = s.max_rel_se;
        constant = "cst_Q";
    }
    else
    {
        params["eps"] = o.eps;
        v = bound_constant(cfg, k, o.nv);
        pass = v.estimate > 0 && std::isfinite(v.estimate)
               && v.stderr_ <= o.target_rel_se * v.estimate;
        if (o.nv_refined > 0)
        {
            LemmaValue fine = bound_constant(cfg, k, o.nv_refined);
            double change = std::abs(fine.estimate - v.estimate) / v.estimate;
            params["nv_refined"] = o.nv_refined;
            extra["estimate_refined"] = fine.estimate;
            extra["stderr_refined"] = fine.stderr_;
            extra["relative_change"] = change;
            pass = pass && change <= 0.2;
        }
        constant = o.lemma == "loss_bound" ? "cst_L" : "cst_nco";
    }
    json j = envelope(cfg, "lemma-check");
    json r;
    r["lemma"] = o.lemma;
    r["params"] = params;
    r["estimate"] = v.estimate;
    r["stderr"] = v.stderr_;
    r["pass"] = pass;
    if (!extra.empty())
        r["details"] = extra;
    j["result"] = r;
    out.write_json("lemma_check.json", j);
    if (!o.write_calibration.empty())
    {
        std::filesystem::path p(o.write_calibration);
        if (p.is_absolute() || p.has_parent_path())
            config_fail(cfg, "lemma_check.write_calibration must be a plain file name");
        std::ostringstream toml;
        toml << "# calibration from lemma-check " << o.lemma << ", config sha256 " << cfg.hash << "\n"
             << constant << " = " << fmt_num(v.estimate) << "\n";
        out.write_text(o.write_calibration, toml.str());
    }
    log << "lemma-check " << o.lemma << ": estimate " << fmt_num(v.estimate) << " +- "
        << fmt_num(v.stderr_) << (pass ? " PASS" : " FAIL") << "\n";
}

// ---------------------------------------------------------------- certificate

std::vector<std::string> defaulted_constants(const CertConstants& c)
{
    std::vector<std::string> out;
    for (const char* name : {"cst_Q", "cst_L", "C_e", "C_f_tilde", "cst_nco"})
        if (std::find(c.calibrated.begin(), c.calibrated.end(), name) == c.calibrated.end())
            out.push_back(name);
    return out;
}

void cmd_certificate(const RunConfig& cfg, OutputSet& out, std::ostream& log, std::ostream& err)
{
    ConvexDomain dom = make_domain(*cfg.domain);
    Kernel k = make_kernel(cfg);
    const CertificateOpts& o = *cfg.certificate;
    CertificateOptions opt;
    opt.upheaval.v1_norm = o.v1_norm;
    opt.upheaval.dx_frac = o.dx_frac;
    opt.upheaval.dv_frac = o.dv_frac;
    opt.upheaval.max_anchors = o.max_anchors;
    opt.constants = cfg.constants;
    opt.grazing.boundary_samples = o.grazing_samples;
    opt.grazing.seed = cfg.seed;
    opt.delta.values = o.delta;
    opt.xi = o.xi;
    opt.n_iter = o.n_iter;
    opt.K_margin = o.K_margin;
    err << kCertWarning << "\n";
    Certificate c = run_certificate(*cfg.bounds, k, dom, o.tau, opt);

    CsvWriter csv(out.file("certificate_audit.csv"));
    csv.header({"stage", "n", "r_n", "log_a_n", "a_n", "aux"});
    for (const auto& a : c.audit)
    {
        csv.cell(a.stage).cell(static_cast<long long>(a.n)).cell(a.r).cell(a.log_a)
            .cell(std::exp(a.log_a)).cell(a.aux);
        csv.end_row();
    }
    csv.close();

    std::vector<std::string> defaulted = c.defaulted.empty() ? defaulted_constants(cfg.constants)
                                                             : c.defaulted;
    json j = envelope(cfg, "certificate", defaulted);
    j["warnings"] = json::array({kCertWarning});
    json r;
    r["kind"] = c.kind == CertKind::maxwellian ? "maxwellian" : "exponential";
    r["domain"] = dom.name();
    r["kernel"] = kernel_json(k);
    r["tau"] = c.tau;
    r["r_V"] = c.r_V;
    r["log_a_ball"] = c.log_a_ball;
    if (c.kind == CertKind::maxwellian)
    {
        r["rho"] = c.rho;
        r["log_rho"] = c.log_rho;
        r["log_rho_prime"] = c.log_rho_prime;
        r["theta"] = c.theta;
        r["fit_r2"] = c.fit_r2;
    }
    else
    {
        r["C1"] = c.C1;
        r["log_C1"] = c.log_C1;
        r["C2"] = c.C2;
        r["K"] = exact_number(c.K);
        r["K_threshold"] = exact_number(c.K_threshold);
        r["finite_iterates"] = c.finite_iterates;
    }
    const CertConstants& cc = cfg.constants;
    r["constants"] = {{"cst_Q", cc.cst_Q}, {"cst_L", cc.cst_L}, {"C_e", cc.C_e},
                      {"C_f_tilde", cc.C_f_tilde}, {"cst_nco", cc.cst_nco}, {"eps0", cc.eps0}};
    r["audit_rows"] = c.audit.size();
    j["result"] = r;
    out.write_json("certificate.json", j);
    log << "certificate: " << r["kind"].get<std::string>() << " at tau " << fmt_num(c.tau) << "\n";
}

// ---------------------------------------------------------------- grazing

void cmd_grazing(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    ConvexDomain dom = make_domain(*cfg.domain);
    const GrazingOpts& o = *cfg.grazing;
    GrazingOptions opt;
    opt.boundary_samples = o.samples;
    opt.azimuths = o.azimuths;
    opt.seed = cfg.seed;
    GrazingConstants gc = grazing_constants(dom, o.eps, o.v_m, o.v_M, o.tau2, opt, o.p);
    int d = dom.dim();

    CsvWriter csv(out.file("grazing.csv"));
    std::vector<std::string> cols{"p", "sup_h_p"};
    for (int i = 0; i < d; ++i)
        cols.push_back("argmax" + std::to_string(i));
    csv.header(cols);
    json table = json::array();
    for (const auto& row : gc.table)
    {
        csv.cell(row.p).cell(row.sup_h);
        for (int i = 0; i < d; ++i)
            csv.cell(row.argmax[i]);
        csv.end_row();
        table.push_back({{"p", row.p}, {"sup_h_p", row.sup_h}, {"argmax", vec_json(row.argmax, d)}});
    }
    csv.close();

    json j = envelope(cfg, "grazing");
    json r;
    r["domain"] = dom.name();
    r["eps"] = gc.eps;
    r["v_m"] = gc.v_m;
    r["v_M"] = gc.v_M;
    r["tau2"] = gc.tau2;
    r["p_eps"] = gc.p_eps;
    r["alpha_x"] = gc.alpha_x;
    r["t_eps"] = gc.t_eps;
    r["l_eps"] = gc.l_eps;
    r["table"] = table;
    if (o.trials > 0)
    {
        FalsificationReport f = falsify_grazing(dom, gc, static_cast<std::uint64_t>(o.trials), cfg.seed);
        r["falsification"] = {{"trials", f.trials},
                              {"hypothesis_held", f.hypothesis_held},
                              {"counterexamples", f.counterexamples},
                              {"max_drift_held", f.max_drift_held}};
        log << "grazing: " << f.counterexamples << " counterexamples in " << f.trials << " trials\n";
    }
    j["result"] = r;
    out.write_json("grazing.json", j);
    log << "grazing: p_eps " << gc.p_eps << ", t_eps " << fmt_num(gc.t_eps) << ", l_eps "
        << fmt_num(gc.l_eps) << "\n";
}

// ---------------------------------------------------------------- simulate

void certificate_lb(const RunConfig& cfg, double& rho, double& theta)
{
    const SimulateOpts& o = *cfg.simulate;
    rho = o.lb_rho;
    theta = o.lb_theta;
    if (o.certificate_json.empty())
        return;
    std::ifstream in(o.certificate_json);
    if (!in)
        config_fail(cfg, "cannot read simulate.certificate_json '" + o.certificate_json + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    validate_artifact(ss.str());
    json c = json::parse(ss.str());
    const json& r = c["result"];
    if (!r.contains("kind") || r["kind"] != "maxwellian")
        config_fail(cfg, "simulate.certificate_json must hold a maxwellian certificate");
    rho = r["rho"].get<double>();
    theta = r["theta"].get<double>();
}

void cmd_simulate(const RunConfig& cfg, OutputSet& out, std::ostream& log)
{
    const SimulateOpts& o = *cfg.simulate;
    Kernel k = make_kernel(cfg);
    int d = k.dim();
    VelocityGrid vg{d, o.rv, o.nv};
    validate(vg);
    SimOptions so;
    so.T = o.T;
    so.dt = o.dt;
    so.collisions = o.collisions;
    so.snapshot_every = o.snapshot_every;
    certificate_lb(cfg, so.rho, so.theta);

    Vec c = to_vec(o.center);
    std::function<double(const Vec&)> fv;
    if (o.initial == "ball")
        fv = [c, r = o.radius, h = o.height](const Vec& v) { return norm(v - c) <= r ? h : 0.0; };
    else
        fv = [c, d, rho = o.density, T = o.temperature](const Vec& v) {
            return rho / std::pow(2 * pi * T, d / 2.0) * std::exp(-norm2(v - c) / (2 * T));
        };

    Trajectory tr;
    std::string domain_name = "none";
    if (o.mode == "homogeneous")
        tr = homogeneous_solve(k, GridFunction(vg, fv), so);
    else
    {
        ConvexDomain dom = make_domain(*cfg.domain);
        domain_name = dom.name();
        Vec mid = domain_middle(cfg, dom);
        std::function<double(const Vec&)> fx;
        if (o.spatial == "uniform")
            fx = [](const Vec&) { return 1.0; };
        else if (o.spatial == "half")
            fx = [mid](const Vec& x) { return x[0] > mid[0] ? 1.0 : 0.0; };
        else
            fx = [mid, s = o.sigma_x](const Vec& x) { return std::exp(-norm2(x - mid) / (2 * s * s)); };
        tr = inhomogeneous_solve(dom, k, [&](const Vec& x, const Vec& v) { return fx(x) * fv(v); },
                                 o.nx, vg, so);
    }

    CsvWriter csv(out.file("simulate.csv"));
    csv.header({"t", "mass", "energy", "min_f", "lb_ratio", "mass_drift", "energy_drift", "clip_events"});
    for (const auto& s : tr.series)
    {
        csv.cell(s.t).cell(s.mass).cell(s.energy).cell(s.min_f).cell(s.lb_ratio).cell(s.mass_drift)
            .cell(s.energy_drift).cell(static_cast<long long>(s.clip_events));
        csv.end_row();
    }
    csv.close();

    json snaps = json::array();
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
    {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%04zu.bin", i);
        write_snapshot(out.file(name).string(), tr.snapshots[i]);
        snaps.push_back({{"file", name}, {"t", tr.snapshots[i].t}});
    }

    json j = envelope(cfg, "simulate");
    json r;
    r["mode"] = o.mode;
    r["domain"] = domain_name;
    r["kernel"] = kernel_json(k);
    r["nv"] = o.nv;
    r["rv"] = o.rv;
    if (o.mode == "spatial")
        r["nx"] = o.nx;
    r["T"] = o.T;
    r["dt"] = o.dt;
    r["steps"] = tr.series.empty() ? 0 : tr.series.size() - 1;
    r["max_mass_drift"] = tr.max_mass_drift;
    r["max_energy_drift"] = tr.max_energy_drift;
    r["clip_events"] = tr.clip_events;
    r["final_min_f"] = state_min(tr.final_state);
    if (so.rho > 0)
        r["lower_bound"] = {{"rho", so.rho},
                            {"theta", so.theta},
                            {"final_ratio", tr.series.back().lb_ratio}};
    r["snapshots"] = snaps;
    j["result"] = r;
    out.write_json("simulate.json", j);
    log << "simulate: mass drift " << fmt_num(tr.max_mass_drift) << ", clip events "
        << tr.clip_events << "\n";
}

using Handler = void (*)(const RunConfig&, OutputSet&, std::ostream&);

}  // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> s{"trace",       "classify", "transport", "lemma-check",
                                            "certificate", "grazing",  "simulate"};
    return s;
}

void validate_for(const RunConfig& cfg, const std::string& sub)
{
    auto guarded = [&](auto&& fn) {
        try
        {
            fn();
        }
        catch (const Error& e)
        {
            if (e.code() == Errc::config_error)
                throw;
            throw Error(Errc::config_error, cfg.path + ": " + e.what());
        }
    };
    if (sub == "trace" || sub == "classify" || sub == "transport" || sub == "certificate"
        || sub == "grazing")
        need(cfg, cfg.domain.has_value(), "domain");
    if (cfg.domain)
        guarded([&] { make_domain(*cfg.domain); });
    if (sub == "lemma-check" || sub == "certificate" || sub == "simulate")
    {
        need(cfg, cfg.kernel.has_value(), "kernel");
        guarded([&] { make_kernel(cfg); });
    }

    if (sub == "trace")
    {
        need(cfg, cfg.trace.has_value(), "trace");
        int d = domain_dim(cfg);
        if (static_cast<int>(cfg.trace->x.size()) != d || static_cast<int>(cfg.trace->v.size()) != d)
            config_fail(cfg, "trace.x and trace.v must have " + std::to_string(d) + " components");
        if (norm(to_vec(cfg.trace->v)) == 0)
            config_fail(cfg, "trace.v must be nonzero");
        if (!(cfg.trace->horizon >= 0))
            config_fail(cfg, "trace.horizon must be nonnegative");
        if (make_domain(*cfg.domain).is_torus())
            config_fail(cfg, "trace needs a bounded domain");
    }
    else if (sub == "classify")
    {
        need(cfg, cfg.classify.has_value(), "classify");
        int d = domain_dim(cfg);
        if (make_domain(*cfg.domain).is_torus())
            config_fail(cfg, "classify needs a bounded domain");
        for (const auto& row : cfg.classify->pairs)
            if (static_cast<int>(row.size()) != 2 * d)
                config_fail(cfg, "classify.pairs rows must have " + std::to_string(2 * d) + " numbers");
        if (cfg.classify->random < 0)
            config_fail(cfg, "classify.random must be nonnegative");
        if (cfg.classify->pairs.empty() && cfg.classify->random == 0)
            config_fail(cfg, "classify needs 'pairs' or 'random'");
    }
    else if (sub == "transport")
    {
        need(cfg, cfg.transport.has_value(), "transport");
        const TransportOpts& o = *cfg.transport;
        int d = domain_dim(cfg);
        check_dim(cfg, o.x0, d, "transport.x0");
        check_dim(cfg, o.v0, d, "transport.v0");
        if (o.u0 != "gaussian" && o.u0 != "bump" && o.u0 != "indicator" && o.u0 != "polynomial")
            config_fail(cfg, "transport.u0 must be gaussian, bump, indicator or polynomial");
        if (o.times.empty())
            config_fail(cfg, "transport.times must not be empty");
        for (double t : o.times)
            if (!(t >= 0))
                config_fail(cfg, "transport.times must be nonnegative");
        if (o.nx < 2 || o.nv < 2)
            config_fail(cfg, "transport.nx and transport.nv must be at least 2");
        check_positive(cfg, o.rv, "transport.rv");
        check_positive(cfg, o.sigma_x, "transport.sigma_x");
        check_positive(cfg, o.sigma_v, "transport.sigma_v");
        check_positive(cfg, o.radius_x, "transport.radius_x");
        check_positive(cfg, o.radius_v, "transport.radius_v");
    }
    else if (sub == "lemma-check")
    {
        need(cfg, cfg.lemma_check.has_value(), "lemma_check");
        const LemmaOpts& o = *cfg.lemma_check;
        Kernel k = make_kernel(cfg);
        if (o.lemma != "spreading" && o.lemma != "loss_bound" && o.lemma != "s_bound"
            && o.lemma != "q1_bound")
            config_fail(cfg, "lemma_check.lemma must be spreading, loss_bound, s_bound or q1_bound");
        if ((o.lemma == "s_bound" || o.lemma == "q1_bound") && k.is_cutoff())
            config_fail(cfg, "lemma_check." + o.lemma + " needs a non-cutoff kernel (nu >= 0)");
        check_dim(cfg, o.vbar, k.dim(), "lemma_check.vbar");
        check_positive(cfg, o.r, "lemma_check.r");
        check_positive(cfg, o.R, "lemma_check.R");
        check_positive(cfg, o.rv, "lemma_check.rv");
        check_positive(cfg, o.target_rel_se, "lemma_check.target_rel_se");
        if (!(o.xi > 0 && o.xi < 1))
            config_fail(cfg, "lemma_check.xi must lie in (0, 1)");
        if (o.samples < 100)
            config_fail(cfg, "lemma_check.samples must be at least 100");
        if (o.nv < 2 || o.nv % 2 || (o.nv_refined && (o.nv_refined < 2 || o.nv_refined % 2)))
            config_fail(cfg, "lemma_check.nv and nv_refined must be even and at least 2");
    }
    else if (sub == "certificate")
    {
        need(cfg, cfg.bounds.has_value(), "bounds");
        need(cfg, cfg.certificate.has_value(), "certificate");
        Kernel k = make_kernel(cfg);
        if (k.dim() != domain_dim(cfg))
            config_fail(cfg, "kernel.dim must match the domain dimension");
        guarded([&] { validate_bounds(*cfg.bounds, k); });
        const CertificateOpts& o = *cfg.certificate;
        check_positive(cfg, o.tau, "certificate.tau");
        if (o.n_iter < 3)
            config_fail(cfg, "certificate.n_iter must be at least 3");
        if (o.grazing_samples < 8)
            config_fail(cfg, "certificate.grazing_samples must be at least 8");
        if (o.max_anchors < 1)
            config_fail(cfg, "certificate.max_anchors must be at least 1");
        check_positive(cfg, o.dx_frac, "certificate.dx_frac");
        check_positive(cfg, o.dv_frac, "certificate.dv_frac");
        if (!o.delta.empty())
            guarded([&] { DeltaSchedule{o.delta}.validate(); });
        for (double x : o.xi)
            if (!(x > 0 && x < 1))
                config_fail(cfg, "certificate.xi entries must lie in (0, 1)");
    }
    else if (sub == "grazing")
    {
        need(cfg, cfg.grazing.has_value(), "grazing");
        const GrazingOpts& o = *cfg.grazing;
        if (make_domain(*cfg.domain).is_torus())
            config_fail(cfg, "grazing needs a bounded domain");
        check_positive(cfg, o.eps, "grazing.eps");
        check_positive(cfg, o.v_m, "grazing.v_m");
        check_positive(cfg, o.tau2, "grazing.tau2");
        if (!(o.v_M >= o.v_m))
            config_fail(cfg, "grazing.v_M must be at least grazing.v_m");
        for (double p : o.p)
            if (!(p >= 1))
                config_fail(cfg, "grazing.p entries must be at least 1");
        if (o.samples < 8 || o.azimuths < 1 || o.trials < 0)
            config_fail(cfg, "grazing.samples >= 8, azimuths >= 1 and trials >= 0 required");
    }
    else if (sub == "simulate")
    {
        need(cfg, cfg.simulate.has_value(), "simulate");
        const SimulateOpts& o = *cfg.simulate;
        Kernel k = make_kernel(cfg);
        if (o.mode != "homogeneous" && o.mode != "spatial")
            config_fail(cfg, "simulate.mode must be homogeneous or spatial");
        if (o.initial != "ball" && o.initial != "maxwellian")
            config_fail(cfg, "simulate.initial must be ball or maxwellian");
        if (o.spatial != "uniform" && o.spatial != "half" && o.spatial != "gaussian")
            config_fail(cfg, "simulate.spatial must be uniform, half or gaussian");
        check_dim(cfg, o.center, k.dim(), "simulate.center");
        check_positive(cfg, o.T, "simulate.T");
        check_positive(cfg, o.dt, "simulate.dt");
        check_positive(cfg, o.rv, "simulate.rv");
        check_positive(cfg, o.radius, "simulate.radius");
        check_positive(cfg, o.height, "simulate.height");
        check_positive(cfg, o.density, "simulate.density");
        check_positive(cfg, o.temperature, "simulate.temperature");
        check_positive(cfg, o.sigma_x, "simulate.sigma_x");
        if (o.lb_rho < 0 || o.lb_theta < 0 || (o.lb_rho > 0) != (o.lb_theta > 0))
            config_fail(cfg, "simulate.lb_rho and lb_theta must both be positive or both absent");
        if (o.snapshot_every < 0)
            config_fail(cfg, "simulate.snapshot_every must be nonnegative");
        if (o.nv < 2 || o.nv % 2)
            config_fail(cfg, "simulate.nv must be even and at least 2");
        if (o.mode == "spatial")
        {
            need(cfg, cfg.domain.has_value(), "domain");
            ConvexDomain dom = make_domain(*cfg.domain);
            if (k.dim() != 2 || dom.dim() != 2)
                config_fail(cfg, "spatial simulations are two-dimensional (kernel.dim = 2)");
            if (dom.shape() != Shape::disk && dom.shape() != Shape::torus)
                config_fail(cfg, "spatial simulations support the disk and the torus");
            if (o.nx < 4 || o.nx > 48 || o.nv > 32)
                config_fail(cfg, "spatial simulations need 4 <= nx <= 48 and nv <= 32");
        }
    }
    else
        throw Error(Errc::config_error, "unknown subcommand '" + sub + "'");
}

void validate_artifact(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw Error(Errc::config_error, std::string("artifact is not valid JSON: ") + e.what());
    }
    auto require = [&](bool ok, const std::string& what) {
        if (!ok)
            throw Error(Errc::config_error, "artifact: " + what);
    };
    require(j.is_object(), "top level must be an object");
    require(j.contains("tool") && j["tool"] == "vf", "missing tool tag");
    require(j.contains("subcommand") && j["subcommand"].is_string()
                && std::find(subcommands().begin(), subcommands().end(),
                             j["subcommand"].get<std::string>())
                       != subcommands().end(),
            "unknown subcommand");
    require(j.contains("config_sha256") && j["config_sha256"].is_string(), "missing config_sha256");
    const std::string h = j["config_sha256"];
    require(h.size() == 64 && h.find_first_not_of("0123456789abcdef") == std::string::npos,
            "config_sha256 must be 64 lowercase hex digits");
    require(j.contains("seed") && j["seed"].is_number_unsigned(), "missing seed");
    require(j.contains("calibration") && j["calibration"].is_object(), "missing calibration");
    const json& c = j["calibration"];
    require(c.contains("source") && c["source"].is_string(), "calibration.source missing");
    require(c.contains("calibrated") && c["calibrated"].is_array(), "calibration.calibrated missing");
    require(c.contains("defaulted") && c["defaulted"].is_array(), "calibration.defaulted missing");
    require(j.contains("result") && j["result"].is_object(), "missing result");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Lower-bound certificates and kinetic tools for convex domains", "vf"};
    app.require_subcommand(1);
    std::string config_path, output_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    for (const auto& name : subcommands())
    {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "TOML configuration file")->required();
        sub->add_option("-o,--output", output_dir, "output directory (overrides the config)");
        sub->add_option("-s,--seed", seed, "random seed (overrides the config)")
            ->each([&](const std::string&) { seed_given = true; });
    }
    try
    {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "vf: " << e.what() << "\n" << "run 'vf --help' for usage\n";
        return exit_config;
    }
    std::string sub = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try
    {
        cfg = load_config(config_path);
        if (seed_given)
            cfg.seed = seed;
        if (!output_dir.empty())
            cfg.output = output_dir;
        validate_for(cfg, sub);
    }
    catch (const Error& e)
    {
        err << "vf: " << e.what() << "\n";
        return exit_config;
    }

    try
    {
        OutputSet files(cfg.output);
        if (sub == "certificate")
            cmd_certificate(cfg, files, out, err);
        else
        {
            static const std::map<std::string, Handler> handlers{
                {"trace", cmd_trace},         {"classify", cmd_classify}, {"transport", cmd_transport},
                {"lemma-check", cmd_lemma},   {"grazing", cmd_grazing},   {"simulate", cmd_simulate}};
            handlers.at(sub)(cfg, files, out);
        }
        files.commit();
        for (const auto& f : files.files())
            out << "wrote " << f.string() << "\n";
    }
    catch (const Error& e)
    {
        err << "vf: " << e.what() << "\n";
        return e.code() == Errc::config_error ? exit_config : exit_compute;
    }
    catch (const std::exception& e)
    {
        err << "vf: " << e.what() << "\n";
        return exit_compute;
    }
    return exit_ok;
}

}  // namespace vf::cli
