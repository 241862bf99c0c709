// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vf/certificate.hpp"
#include "vf/geometry.hpp"
#include "vf/kernel.hpp"

namespace vf::cli {

//! Process exit codes
enum ExitCode : int
{
    exit_ok = 0,
    exit_config = 2,   //!< usage or configuration error
    exit_compute = 3,  //!< numerical or I/O failure after validation
};

struct DomainSpec
{
    std::string shape;
    std::vector<double> center;
    double radius = 1;
    std::vector<double> axes;
    int p = 4;
    std::vector<double> period;
};

struct TraceOpts
{
    std::vector<double> x, v;
    double horizon = 1;
    int max_rebounds = 10000;
};

struct ClassifyOpts
{
    std::vector<std::vector<double>> pairs;  //!< each row is x followed by v
    int random = 0;                          //!< extra random boundary pairs
};

struct TransportOpts
{
    std::string u0 = "gaussian";
    std::vector<double> x0, v0;
    double sigma_x = 0.2, sigma_v = 0.5;
    double radius_x = 0.3, radius_v = 0.5;
    double a = 1, b = 0, c = 0;
    std::vector<double> times{0, 0.5, 1};
    int nx = 32, nv = 16;
    double rv = 2;
    double tol = -1;  //!< negative disables the half-resolution check
};

struct LemmaOpts
{
    std::string lemma;  //!< spreading | loss_bound | s_bound | q1_bound
    std::vector<double> vbar;
    double r = 1, R = 1, xi = 0.25;
    double eps = 0.1;
    int nv = 16, nv_refined = 0;
    double rv = 4;
    std::uint64_t samples = 20000;
    double target_rel_se = 0.02;
    std::string write_calibration;
};

struct CertificateOpts
{
    double tau = 1;
    int n_iter = 64;
    double K_margin = 0.1;
    std::vector<double> delta;
    std::vector<double> xi;
    double v1_norm = 0;
    double dx_frac = 0.1, dv_frac = 0.1;
    int max_anchors = 1024;
    int grazing_samples = 4096;
};

struct GrazingOpts
{
    double eps = 0.1;
    double v_m = 0.5, v_M = 1;
    double tau2 = 1e9;
    std::vector<double> p{2, 4, 8, 16, 32, 64, 128};
    int samples = 4096;
    int azimuths = 32;
    int trials = 0;
};

struct SimulateOpts
{
    std::string mode = "homogeneous";  //!< homogeneous | spatial
    double T = 0.1, dt = 0.01;
    int nx = 16, nv = 16;
    double rv = 4;
    bool collisions = true;
    std::string initial = "ball";  //!< ball | maxwellian
    std::vector<double> center;    //!< ball centre or Maxwellian drift
    double radius = 1, height = 0.25;
    double density = 1, temperature = 1;
    std::string spatial = "uniform";  //!< uniform | half | gaussian
    double sigma_x = 0.3;
    double lb_rho = 0, lb_theta = 0;
    std::string certificate_json;
    int snapshot_every = 0;
};

struct RunConfig
{
    std::string path;
    std::string hash;  //!< SHA-256 of the config bytes
    std::uint64_t seed = 1;
    std::string output = ".";
    std::optional<DomainSpec> domain;
    std::optional<KernelParams> kernel;
    std::optional<Bounds> bounds;
    std::string calibration_path;
    CertConstants constants;
    std::optional<TraceOpts> trace;
    std::optional<ClassifyOpts> classify;
    std::optional<TransportOpts> transport;
    std::optional<LemmaOpts> lemma_check;
    std::optional<CertificateOpts> certificate;
    std::optional<GrazingOpts> grazing;
    std::optional<SimulateOpts> simulate;
};

//! Parse a TOML-style config; throws ConfigError with file:line diagnostics
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& name = "<config>");

//! Check that everything the subcommand needs is present and consistent
void validate_for(const RunConfig& cfg, const std::string& subcommand);

ConvexDomain make_domain(const DomainSpec& d);

//! Throws ConfigError unless the JSON artifact carries the common envelope
void validate_artifact(const std::string& json_text);

const std::vector<std::string>& subcommands();

//! Entry point: args exclude the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vf::cli
