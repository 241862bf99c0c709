// SPDX-License-Identifier: Apache-2.0
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "vf/cli.hpp"
#include "vf/error.hpp"

namespace vf::cli {

namespace {

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& msg)
{
    throw Error(Errc::config_error, file + ":" + std::to_string(line) + ": " + msg);
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    VF_REQUIRE(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1,
               io_error, "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

//! Typed access to one table; finish() rejects keys that were never read
class Block
{
  public:
    Block(const toml::table& t, std::string name, std::string file)
        : t_(t), name_(std::move(name)), file_(std::move(file))
    {
    }

    bool has(const std::string& key)
    {
        used_.insert(key);
        return t_.contains(key);
    }

    double num(const std::string& key, double def)
    {
        return has(key) ? as_num(key, *t_.get(key)) : def;
    }
    double req_num(const std::string& key)
    {
        require(key);
        return num(key, 0);
    }
    long long integer(const std::string& key, long long def)
    {
        if (!has(key))
            return def;
        const toml::node& n = *t_.get(key);
        if (!n.is_integer())
            fail(file_, line(n), where(key) + " must be an integer");
        return n.as_integer()->get();
    }
    bool boolean(const std::string& key, bool def)
    {
        if (!has(key))
            return def;
        const toml::node& n = *t_.get(key);
        if (!n.is_boolean())
            fail(file_, line(n), where(key) + " must be true or false");
        return n.as_boolean()->get();
    }
    std::string str(const std::string& key, const std::string& def)
    {
        if (!has(key))
            return def;
        const toml::node& n = *t_.get(key);
        if (!n.is_string())
            fail(file_, line(n), where(key) + " must be a string");
        return n.as_string()->get();
    }
    std::string req_str(const std::string& key)
    {
        require(key);
        return str(key, "");
    }
    std::vector<double> vec(const std::string& key, std::vector<double> def)
    {
        if (!has(key))
            return def;
        const toml::node& n = *t_.get(key);
        if (!n.is_array())
            fail(file_, line(n), where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *n.as_array())
            out.push_back(as_num(key, e));
        return out;
    }
    std::vector<double> req_vec(const std::string& key)
    {
        require(key);
        return vec(key, {});
    }
    std::vector<std::vector<double>> mat(const std::string& key)
    {
        if (!has(key))
            return {};
        const toml::node& n = *t_.get(key);
        if (!n.is_array())
            fail(file_, line(n), where(key) + " must be an array of arrays");
        std::vector<std::vector<double>> out;
        for (const auto& row : *n.as_array())
        {
            if (!row.is_array())
                fail(file_, line(row), where(key) + " rows must be arrays");
            std::vector<double> r;
            for (const auto& e : *row.as_array())
                r.push_back(as_num(key, e));
            out.push_back(r);
        }
        return out;
    }
    void finish() const
    {
        for (const auto& [k, v] : t_)
            if (!used_.count(std::string(k.str())))
                fail(file_, line(v), "unknown key '" + where(std::string(k.str())) + "'");
    }
    std::size_t line() const { return line(t_); }

  private:
    static std::size_t line(const toml::node& n) { return n.source().begin.line; }
    std::string where(const std::string& key) const
    {
        return name_.empty() ? key : name_ + "." + key;
    }
    void require(const std::string& key)
    {
        if (!t_.contains(key))
            fail(file_, line(t_), "missing required key '" + where(key) + "'");
    }
    double as_num(const std::string& key, const toml::node& n) const
    {
        if (n.is_integer())
            return static_cast<double>(n.as_integer()->get());
        if (n.is_floating_point())
            return n.as_floating_point()->get();
        fail(file_, line(n), where(key) + " must be a number");
    }

    const toml::table& t_;
    std::string name_;
    std::string file_;
    std::set<std::string> used_;
};

const toml::table& sub_table(const toml::table& root, const std::string& key,
                             const std::string& file)
{
    const toml::node* n = root.get(key);
    if (!n->is_table())
        fail(file, n->source().begin.line, "'" + key + "' must be a table");
    return *n->as_table();
}

DomainSpec parse_domain(Block b)
{
    DomainSpec d;
    d.shape = b.req_str("shape");
    d.center = b.vec("center", {});
    d.radius = b.num("radius", 1);
    d.axes = b.vec("axes", {});
    d.p = static_cast<int>(b.integer("p", 4));
    d.period = b.vec("period", {});
    b.finish();
    return d;
}

int domain_dim(const DomainSpec& d)
{
    for (const auto* v : {&d.center, &d.axes, &d.period})
        if (!v->empty())
            return static_cast<int>(v->size());
    return 2;
}

KernelParams parse_kernel(Block b, int default_dim, const std::string& file)
{
    int dim = static_cast<int>(b.integer("dim", default_dim));
    KernelParams p;
    std::string preset = b.str("preset", "");
    if (!preset.empty())
    {
        try
        {
            p = kernel_preset(preset, dim);
        }
        catch (const Error& e)
        {
            fail(file, b.line(), e.what());
        }
    }
    p.dim = dim;
    p.gamma = b.num("gamma", p.gamma);
    p.nu = b.num("nu", p.nu);
    p.b0 = b.num("b0", p.b0);
    p.c_phi = b.num("c_phi", p.c_phi);
    p.C_phi = b.num("C_phi", p.C_phi);
    p.phi_scale = b.num("phi_scale", p.phi_scale);
    std::string kind = b.str("phi_kind", p.phi_kind == PhiKind::power ? "power" : "mollified");
    if (kind != "power" && kind != "mollified")
        fail(file, b.line(), "kernel.phi_kind must be 'power' or 'mollified'");
    p.phi_kind = kind == "power" ? PhiKind::power : PhiKind::mollified;
    std::string prof = b.str("profile", p.profile == Profile::constant ? "constant" : "power");
    if (prof != "constant" && prof != "power")
        fail(file, b.line(), "kernel.profile must be 'constant' or 'power'");
    p.profile = prof == "constant" ? Profile::constant : Profile::power;
    if (!preset.empty())
        p.name = preset;
    b.finish();
    return p;
}

Bounds parse_bounds(Block b)
{
    Bounds x;
    x.E_f = b.num("E_f", 0);
    x.Eprime_f = b.num("Eprime_f", 0);
    x.Lp_f = b.num("Lp_f", 0);
    x.p_gamma = b.num("p_gamma", 0);
    x.W_f = b.num("W_f", 0);
    x.M = b.num("M", 0);
    x.E = b.num("E", 0);
    x.R_X = b.num("R_X", 0);
    b.finish();
    return x;
}

void parse_calibration(RunConfig& cfg, const std::string& file)
{
    std::ifstream in(file);
    if (!in)
        throw Error(Errc::config_error, "cannot read calibration file '" + file + "'");
    toml::table t;
    try
    {
        t = toml::parse(in, file);
    }
    catch (const toml::parse_error& e)
    {
        fail(file, e.source().begin.line, std::string(e.description()));
    }
    Block b(t, "", file);
    CertConstants& c = cfg.constants;
    struct Slot
    {
        const char* name;
        double* value;
    };
    for (Slot s : {Slot{"cst_Q", &c.cst_Q}, Slot{"cst_L", &c.cst_L}, Slot{"C_e", &c.C_e},
                   Slot{"C_f_tilde", &c.C_f_tilde}, Slot{"cst_nco", &c.cst_nco}})
        if (b.has(s.name))
        {
            *s.value = b.num(s.name, 0);
            if (!(*s.value > 0))
                fail(file, b.line(), std::string(s.name) + " must be positive");
            c.calibrated.push_back(s.name);
        }
    c.eps0 = b.num("eps0", c.eps0);
    b.finish();
}

//! Resolve a relative path against the directory of the config file
std::string relative_to(const std::string& config, const std::string& path)
{
    if (path.empty() || std::filesystem::path(path).is_absolute())
        return path;
    return (std::filesystem::path(config).parent_path() / path).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& name)
{
    RunConfig cfg;
    cfg.path = name;
    cfg.hash = sha256_hex(text);
    toml::table root;
    try
    {
        root = toml::parse(text, name);
    }
    catch (const toml::parse_error& e)
    {
        fail(name, e.source().begin.line, std::string(e.description()));
    }
    Block top(root, "", name);
    cfg.seed = static_cast<std::uint64_t>(top.integer("seed", 1));
    cfg.output = top.str("output", ".");
    cfg.calibration_path = relative_to(name, top.str("calibration", ""));
    if (top.has("domain"))
        cfg.domain = parse_domain(Block(sub_table(root, "domain", name), "domain", name));
    int dim = cfg.domain ? domain_dim(*cfg.domain) : 3;
    if (top.has("kernel"))
        cfg.kernel = parse_kernel(Block(sub_table(root, "kernel", name), "kernel", name), dim, name);
    if (top.has("bounds"))
        cfg.bounds = parse_bounds(Block(sub_table(root, "bounds", name), "bounds", name));

    if (top.has("trace"))
    {
        Block b(sub_table(root, "trace", name), "trace", name);
        TraceOpts o;
        o.x = b.req_vec("x");
        o.v = b.req_vec("v");
        o.horizon = b.req_num("horizon");
        o.max_rebounds = static_cast<int>(b.integer("max_rebounds", o.max_rebounds));
        b.finish();
        cfg.trace = o;
    }
    if (top.has("classify"))
    {
        Block b(sub_table(root, "classify", name), "classify", name);
        ClassifyOpts o;
        o.pairs = b.mat("pairs");
        o.random = static_cast<int>(b.integer("random", 0));
        b.finish();
        cfg.classify = o;
    }
    if (top.has("transport"))
    {
        Block b(sub_table(root, "transport", name), "transport", name);
        TransportOpts o;
        o.u0 = b.str("u0", o.u0);
        o.x0 = b.vec("x0", {});
        o.v0 = b.vec("v0", {});
        o.sigma_x = b.num("sigma_x", o.sigma_x);
        o.sigma_v = b.num("sigma_v", o.sigma_v);
        o.radius_x = b.num("radius_x", o.radius_x);
        o.radius_v = b.num("radius_v", o.radius_v);
        o.a = b.num("a", o.a);
        o.b = b.num("b", o.b);
        o.c = b.num("c", o.c);
        o.times = b.vec("times", o.times);
        o.nx = static_cast<int>(b.integer("nx", o.nx));
        o.nv = static_cast<int>(b.integer("nv", o.nv));
        o.rv = b.num("rv", o.rv);
        o.tol = b.num("tol", o.tol);
        b.finish();
        cfg.transport = o;
    }
    if (top.has("lemma_check"))
    {
        Block b(sub_table(root, "lemma_check", name), "lemma_check", name);
        LemmaOpts o;
        o.lemma = b.req_str("lemma");
        o.vbar = b.vec("vbar", {});
        o.r = b.num("r", o.r);
        o.R = b.num("R", o.R);
        o.xi = b.num("xi", o.xi);
        o.eps = b.num("eps", o.eps);
        o.nv = static_cast<int>(b.integer("nv", o.nv));
        o.nv_refined = static_cast<int>(b.integer("nv_refined", 0));
        o.rv = b.num("rv", o.rv);
        o.samples = static_cast<std::uint64_t>(b.integer("samples", static_cast<long long>(o.samples)));
        o.target_rel_se = b.num("target_rel_se", o.target_rel_se);
        o.write_calibration = b.str("write_calibration", "");
        b.finish();
        cfg.lemma_check = o;
    }
    if (top.has("certificate"))
    {
        Block b(sub_table(root, "certificate", name), "certificate", name);
        CertificateOpts o;
        o.tau = b.req_num("tau");
        o.n_iter = static_cast<int>(b.integer("n_iter", o.n_iter));
        o.K_margin = b.num("K_margin", o.K_margin);
        o.delta = b.vec("delta", {});
        o.xi = b.vec("xi", {});
        o.v1_norm = b.num("v1_norm", o.v1_norm);
        o.dx_frac = b.num("dx_frac", o.dx_frac);
        o.dv_frac = b.num("dv_frac", o.dv_frac);
        o.max_anchors = static_cast<int>(b.integer("max_anchors", o.max_anchors));
        o.grazing_samples = static_cast<int>(b.integer("grazing_samples", o.grazing_samples));
        b.finish();
        cfg.certificate = o;
    }
    if (top.has("grazing"))
    {
        Block b(sub_table(root, "grazing", name), "grazing", name);
        GrazingOpts o;
        o.eps = b.num("eps", o.eps);
        o.v_m = b.num("v_m", o.v_m);
        o.v_M = b.num("v_M", o.v_M);
        o.tau2 = b.num("tau2", o.tau2);
        o.p = b.vec("p", o.p);
        o.samples = static_cast<int>(b.integer("samples", o.samples));
        o.azimuths = static_cast<int>(b.integer("azimuths", o.azimuths));
        o.trials = static_cast<int>(b.integer("trials", o.trials));
        b.finish();
        cfg.grazing = o;
    }
    if (top.has("simulate"))
    {
        Block b(sub_table(root, "simulate", name), "simulate", name);
        SimulateOpts o;
        o.mode = b.str("mode", o.mode);
        o.T = b.num("T", o.T);
        o.dt = b.num("dt", o.dt);
        o.nx = static_cast<int>(b.integer("nx", o.nx));
        o.nv = static_cast<int>(b.integer("nv", o.nv));
        o.rv = b.num("rv", o.rv);
        o.collisions = b.boolean("collisions", o.collisions);
        o.initial = b.str("initial", o.initial);
        o.center = b.vec("center", {});
        o.radius = b.num("radius", o.radius);
        o.height = b.num("height", o.height);
        o.density = b.num("density", o.density);
        o.temperature = b.num("temperature", o.temperature);
        o.spatial = b.str("spatial", o.spatial);
        o.sigma_x = b.num("sigma_x", o.sigma_x);
        o.lb_rho = b.num("lb_rho", 0);
        o.lb_theta = b.num("lb_theta", 0);
        o.certificate_json = relative_to(name, b.str("certificate_json", ""));
        o.snapshot_every = static_cast<int>(b.integer("snapshot_every", 0));
        b.finish();
        cfg.simulate = o;
    }
    top.finish();
    if (!cfg.calibration_path.empty())
        parse_calibration(cfg, cfg.calibration_path);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::config_error, "cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

ConvexDomain make_domain(const DomainSpec& d)
{
    int dim = domain_dim(d);
    auto to_vec = [](const std::vector<double>& a) {
        Vec v{};
        for (std::size_t i = 0; i < a.size() && i < 3; ++i)
            v[static_cast<int>(i)] = a[i];
        return v;
    };
    VF_REQUIRE(dim == 2 || dim == 3, config_error, "domain dimension must be 2 or 3");
    for (const auto* v : {&d.center, &d.axes, &d.period})
        VF_REQUIRE(v->empty() || static_cast<int>(v->size()) == dim, config_error,
                   "domain arrays must share one dimension");
    if (d.shape == "disk" || d.shape == "ball")
        return ConvexDomain::disk(to_vec(d.center), d.radius, dim);
    if (d.shape == "ellipse")
    {
        VF_REQUIRE(!d.axes.empty(), config_error, "ellipse needs 'axes'");
        return ConvexDomain::ellipse(to_vec(d.center), to_vec(d.axes), dim);
    }
    if (d.shape == "superellipse")
    {
        VF_REQUIRE(!d.axes.empty(), config_error, "superellipse needs 'axes'");
        return ConvexDomain::superellipse(to_vec(d.center), to_vec(d.axes), d.p);
    }
    if (d.shape == "torus")
    {
        VF_REQUIRE(!d.period.empty(), config_error, "torus needs 'period'");
        return ConvexDomain::torus(to_vec(d.period), dim);
    }
    throw Error(Errc::config_error, "unknown domain shape '" + d.shape + "'");
}

}  // namespace vf::cli
