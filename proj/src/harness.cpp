#include "tcsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tcsim {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("invalid seed for " + key + ": '" + v + "'");
    return x;
}

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::Lindblad: return "lindblad";
        case Engine::Mcwf: return "mcwf";
        default: return "both";
    }
}

Engine parse_engine(const std::string& v) {
    if (v == "lindblad") return Engine::Lindblad;
    if (v == "mcwf") return Engine::Mcwf;
    if (v == "both") return Engine::Both;
    throw ConfigError("unknown engine '" + v + "' (lindblad|mcwf|both)");
}

std::string space_name(Space s) { return s == Space::Ladder ? "ladder" : "full"; }

Space parse_space(const std::string& v) {
    if (v == "ladder") return Space::Ladder;
    if (v == "full") return Space::Full;
    throw ConfigError("unknown space '" + v + "' (ladder|full)");
}

std::string signs_name(const SignPattern& s) {
    std::string out;
    for (int v : s.s) out += v > 0 ? '+' : '-';
    return out;
}

SignPattern parse_signs(const std::string& v) {
    if (v.size() != 4 || v.find_first_not_of("+-") != std::string::npos)
        throw ConfigError("sign_pattern must be four of '+'/'-', got '" + v + "'");
    SignPattern out;
    for (int i = 0; i < 4; ++i) out.s[i] = v[i] == '+' ? 1 : -1;
    return out;
}

int laser_suffix(const std::string& key, const char* stem) {
    // rabi_1..rabi_5 / phase_1..phase_5
    const std::size_t n = std::strlen(stem);
    if (key.size() == n + 2 && key.compare(0, n, stem) == 0 && key[n] == '_' &&
        key[n + 1] >= '1' && key[n + 1] <= '5')
        return key[n + 1] - '1';
    return -1;
}

}  // namespace

void RunConfig::validate() const {
    if (p < 0 || q < 0 || k < 0) throw ConfigError("p, q, k must be non-negative");
    if (n_max < 0) throw ConfigError("n_max must be non-negative");
    if (alpha <= 0.0) throw ConfigError("alpha must be positive");
    if (d_tau <= 0.0 || d_tau > 0.1) throw ConfigError("d_tau must be in (0, 0.1]");
    if (n_trajectories < 1) throw ConfigError("n_trajectories must be >= 1");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (ion.gamma <= 0.0) throw ConfigError("gamma must be positive");
    if (ion.nu <= 0.0) throw ConfigError("nu must be positive");
    if (space == Space::Ladder) {
        if (k > n_max) throw ConfigError("initial rung k exceeds the ladder cutoff n_max");
    } else {
        if (k + std::max(p, q) > n_max)
            throw ConfigError("initial Fock triple exceeds the full-space cutoff n_max");
    }
}

void apply_config_key(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value) {
    if (section == "run") {
        if (key == "xi_re") cfg.xi.real(parse_double(key, value));
        else if (key == "xi_im") cfg.xi.imag(parse_double(key, value));
        else if (key == "r") cfg.xi = std::polar(parse_double(key, value), std::arg(cfg.xi));
        else if (key == "phi") cfg.xi = std::polar(std::abs(cfg.xi), parse_double(key, value));
        else if (key == "p") cfg.p = int(parse_long(key, value));
        else if (key == "q") cfg.q = int(parse_long(key, value));
        else if (key == "k") cfg.k = int(parse_long(key, value));
        else if (key == "alpha") cfg.alpha = parse_double(key, value);
        else if (key == "n_max") cfg.n_max = int(parse_long(key, value));
        else if (key == "engine") cfg.engine = parse_engine(value);
        else if (key == "space") cfg.space = parse_space(value);
        else if (key == "d_tau") cfg.d_tau = parse_double(key, value);
        else if (key == "tau_end") cfg.tau_end = parse_double(key, value);
        else if (key == "n_trajectories") cfg.n_trajectories = int(parse_long(key, value));
        else if (key == "record_stride") cfg.record_stride = int(parse_long(key, value));
        else if (key == "master_seed") cfg.master_seed = parse_u64(key, value);
        else throw ConfigError("unknown key 'run." + key + "'");
    } else if (section == "lasers") {
        int i;
        if (key == "eta") cfg.ion.eta = parse_double(key, value);
        else if (key == "gamma") cfg.ion.gamma = parse_double(key, value);
        else if (key == "delta") cfg.ion.delta = parse_double(key, value);
        else if (key == "nu") cfg.ion.nu = parse_double(key, value);
        else if (key == "sign_pattern") cfg.signs = parse_signs(value);
        else if ((i = laser_suffix(key, "rabi")) >= 0) {
            if (!cfg.rabi) cfg.rabi.emplace();
            (*cfg.rabi)[i] = parse_double(key, value);
        } else if ((i = laser_suffix(key, "phase")) >= 0) {
            if (!cfg.phase) cfg.phase.emplace();
            (*cfg.phase)[i] = parse_double(key, value);
        } else throw ConfigError("unknown key 'lasers." + key + "'");
    } else if (section == "output") {
        if (key == "dir") cfg.out_dir = value;
        else throw ConfigError("unknown key 'output." + key + "'");
    } else {
        throw ConfigError("unknown section '" + section + "'");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": key outside a section");
        apply_config_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

std::string config_echo(const RunConfig& cfg) {
    std::ostringstream os;
    os << "run.xi_re=" << format_double(cfg.xi.real())
       << " run.xi_im=" << format_double(cfg.xi.imag())
       << " run.p=" << cfg.p << " run.q=" << cfg.q << " run.k=" << cfg.k
       << " run.alpha=" << format_double(cfg.alpha) << " run.n_max=" << cfg.n_max
       << " run.engine=" << engine_name(cfg.engine)
       << " run.space=" << space_name(cfg.space)
       << " run.d_tau=" << format_double(cfg.d_tau)
       << " run.tau_end=" << format_double(cfg.resolved_tau_end())
       << " run.n_trajectories=" << cfg.n_trajectories
       << " run.record_stride=" << cfg.record_stride
       << " run.master_seed=" << cfg.master_seed
       << " lasers.eta=" << format_double(cfg.ion.eta)
       << " lasers.gamma=" << format_double(cfg.ion.gamma)
       << " lasers.delta=" << format_double(cfg.ion.delta)
       << " lasers.nu=" << format_double(cfg.ion.nu)
       << " lasers.sign_pattern=" << signs_name(cfg.signs);
    return os.str();
}

RunConfig parse_config_echo(const std::string& line) {
    RunConfig cfg;
    std::istringstream is(line);
    std::string token;
    while (is >> token) {
        const auto dot = token.find('.');
        const auto eq = token.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq)
            throw ConfigError("malformed config echo token: " + token);
        apply_config_key(cfg, token.substr(0, dot), token.substr(dot + 1, eq - dot - 1),
                         token.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

std::string resolve_out_path(const RunConfig& cfg, const std::string& default_name) {
    if (!cfg.out_path.empty()) return cfg.out_path;
    if (!cfg.out_dir.empty()) return cfg.out_dir + "/" + default_name;
    if (const char* env = std::getenv("TCSIM_OUT_DIR"); env && *env)
        return std::string(env) + "/" + default_name;
    return "";
}

namespace {

void write_header(std::ostream& os, const RunConfig& cfg, const std::string& subcommand,
                  const std::vector<std::string>& extra = {}) {
    os << "# tcsim " << subcommand << " v" << kVersion << "\n";
    if (cfg.timestamp) {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated: " << buf << "\n";
    }
    os << "# config: " << config_echo(cfg) << "\n";
    for (const std::string& e : extra) os << "# " << e << "\n";
}

std::string triple_name(const std::array<int, 3>& t) {
    return "P_" + std::to_string(t[0]) + "_" + std::to_string(t[1]) + "_" +
           std::to_string(t[2]);
}

}  // namespace

int SimSpace::dim() const {
    return kind == Space::Ladder ? ladder.dim() : basis.dim_total();
}

Vector SimSpace::initial_state(int k) const {
    Vector psi = Vector::Zero(dim());
    if (kind == Space::Ladder) {
        psi[ladder.index(Ion::Excited, k)] = 1.0;
    } else {
        psi[basis.flatten(Ion::Excited, k + ladder.q, k + ladder.p, k)] = 1.0;
    }
    return psi;
}

SimSpace make_space(const RunConfig& cfg) {
    cfg.validate();
    SimSpace s;
    s.kind = cfg.space;
    const Complex zeta = cfg.zeta();
    TcsParams params(cfg.xi, cfg.p, cfg.q);
    if (cfg.space == Space::Ladder) {
        s.ladder = build_ladder(cfg.p, cfg.q, cfg.n_max);
        s.hamiltonian = build_hamiltonian(zeta, cfg.xi, s.ladder);
        s.decay_op = sigma_minus(s.ladder);
        s.target = tcs_fock(params, s.ladder.n_max);
        s.dark = dark_state(s.target, s.ladder);
        const int top = std::min(6, cfg.n_max);
        for (int n = 0; n <= top; ++n) {
            s.tracked.push_back(s.ladder.triple(n));
            s.tracked_idx.emplace_back(s.ladder.index(Ion::Ground, n),
                                       s.ladder.index(Ion::Excited, n));
        }
    } else {
        s.basis = build_basis(cfg.n_max);
        s.ladder = build_ladder(cfg.p, cfg.q, cfg.n_max - std::max(cfg.p, cfg.q));
        s.hamiltonian = build_hamiltonian(zeta, cfg.xi, s.basis);
        s.decay_op = sigma_minus(s.basis);
        s.target = tcs_fock(params, s.ladder.n_max);
        s.dark = embed_tcs(s.target, s.basis, Ion::Ground);
        const int top = std::min(6, s.ladder.n_max);
        for (int n = 0; n <= top; ++n) {
            auto t = s.ladder.triple(n);
            s.tracked.push_back(t);
            s.tracked_idx.emplace_back(s.basis.flatten(Ion::Ground, t[0], t[1], t[2]),
                                       s.basis.flatten(Ion::Excited, t[0], t[1], t[2]));
        }
    }
    return s;
}

namespace {

TrajectoryConfig trajectory_config(const RunConfig& cfg) {
    TrajectoryConfig t;
    t.d_tau = cfg.d_tau;
    t.tau_end = cfg.resolved_tau_end();
    t.master_seed = cfg.master_seed;
    t.n_trajectories = cfg.n_trajectories;
    t.record_stride = cfg.record_stride;
    return t;
}

}  // namespace

ObservableSeries run_lindblad_series(const SimSpace& space, const RunConfig& cfg) {
    Vector psi0 = space.initial_state(cfg.k);
    Matrix rho = psi0 * psi0.adjoint();
    ObservableSeries out;
    integrate_lindblad(rho, space.hamiltonian, space.decay_op, cfg.ion.gamma,
                       trajectory_config(cfg),
                       [&](double tau, const Matrix& r) {
                           out.tau.push_back(tau);
                           out.sigma_z.push_back(inversion(r));
                           out.fidelity.push_back(fidelity(r, space.dark));
                           std::vector<double> pr;
                           pr.reserve(space.tracked_idx.size());
                           for (auto [g, e] : space.tracked_idx)
                               pr.push_back(r(g, g).real() + r(e, e).real());
                           out.probs.push_back(std::move(pr));
                           return true;
                       });
    return out;
}

ObservableSeries run_mcwf_series(const SimSpace& space, const RunConfig& cfg) {
    Vector psi0 = space.initial_state(cfg.k);
    const std::size_t n_tracked = space.tracked_idx.size();
    SnapshotEvaluator eval = [&](const Vector& psi) {
        std::vector<double> row;
        row.reserve(2 + n_tracked);
        row.push_back(inversion(psi));
        row.push_back(fidelity(psi, space.dark));
        for (auto [g, e] : space.tracked_idx)
            row.push_back(std::norm(psi[g]) + std::norm(psi[e]));
        return row;
    };
    EnsembleResult res = run_ensemble(psi0, space.hamiltonian, space.decay_op,
                                      cfg.ion.gamma, trajectory_config(cfg), eval);
    ObservableSeries out;
    out.tau = res.tau;
    for (long i = 0; i < res.mean.rows(); ++i) {
        out.sigma_z.push_back(res.mean(i, 0));
        out.fidelity.push_back(res.mean(i, 1));
        out.sigma_z_se.push_back(res.std_error(i, 0));
        out.fidelity_se.push_back(res.std_error(i, 1));
        std::vector<double> pr(n_tracked);
        for (std::size_t j = 0; j < n_tracked; ++j) pr[j] = res.mean(i, 2 + j);
        out.probs.push_back(std::move(pr));
    }
    return out;
}

GenerationTime solve_generation_time(const SimSpace& space, const RunConfig& cfg,
                                     double threshold) {
    Vector psi0 = space.initial_state(cfg.k);
    Matrix rho = psi0 * psi0.adjoint();
    TrajectoryConfig tc = trajectory_config(cfg);

    std::vector<double> taus, fids;
    Matrix prev_rho = rho;
    double prev_tau = 0.0;
    bool crossed = false;
    integrate_lindblad(rho, space.hamiltonian, space.decay_op, cfg.ion.gamma, tc,
                       [&](double tau, const Matrix& r) {
                           const double f = fidelity(r, space.dark);
                           taus.push_back(tau);
                           fids.push_back(f);
                           if (1.0 - f <= threshold) {
                               crossed = true;
                               return false;  // bracket found, stop the march
                           }
                           prev_rho = r;
                           prev_tau = tau;
                           return true;
                       });
    (void)crossed;

    FidelityRefiner refine = [&](double tau_mid) {
        Matrix r = prev_rho;
        TrajectoryConfig sub = tc;
        sub.tau_end = tau_mid;
        sub.record_stride = std::max(1, int(std::lround((tau_mid - prev_tau) / tc.d_tau)));
        integrate_lindblad(r, space.hamiltonian, space.decay_op, cfg.ion.gamma, sub,
                           nullptr, prev_tau);
        return fidelity(r, space.dark);
    };
    return generation_time(taus, fids, threshold, refine, 1e-3);
}

int cmd_coeffs(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    TcsParams params(cfg.xi, cfg.p, cfg.q);
    TcsVector v = tcs_fock(params, cfg.n_max);
    write_header(os, cfg, "coeffs",
                 {"N(p,q,r) = " + format_double(v.norm_const),
                  "sum |C_n|^2 = " + format_double(v.squared_norm())});
    os << "n,re_c,im_c,abs2_c\n";
    for (int n = 0; n <= cfg.n_max; ++n)
        os << n << ',' << format_double(v.coeffs[n].real()) << ','
           << format_double(v.coeffs[n].imag()) << ','
           << format_double(std::norm(v.coeffs[n])) << "\n";
    return 0;
}

namespace {

void write_series_csv(std::ostream& os, const SimSpace& space, const ObservableSeries& lin,
                      const ObservableSeries* mc) {
    os << "tau";
    if (!lin.tau.empty()) {
        os << ",sigma_z,fidelity";
        for (const auto& t : space.tracked) os << ',' << triple_name(t);
    }
    if (mc) {
        os << ",mcwf_sigma_z,mcwf_fidelity,mcwf_sigma_z_se,mcwf_fidelity_se";
        for (const auto& t : space.tracked) os << ",mcwf_" << triple_name(t);
    }
    os << "\n";
    const std::size_t rows = lin.tau.empty() ? mc->tau.size() : lin.tau.size();
    for (std::size_t i = 0; i < rows; ++i) {
        os << format_double(lin.tau.empty() ? mc->tau[i] : lin.tau[i]);
        if (!lin.tau.empty()) {
            os << ',' << format_double(lin.sigma_z[i]) << ','
               << format_double(lin.fidelity[i]);
            for (double p : lin.probs[i]) os << ',' << format_double(p);
        }
        if (mc) {
            os << ',' << format_double(mc->sigma_z[i]) << ','
               << format_double(mc->fidelity[i]) << ','
               << format_double(mc->sigma_z_se[i]) << ','
               << format_double(mc->fidelity_se[i]);
            for (double p : mc->probs[i]) os << ',' << format_double(p);
        }
        os << "\n";
    }
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    if (cfg.alpha >= 1.0)
        std::fprintf(stderr, "tcsim: warning: alpha = %g outside the weak-drive regime\n",
                     cfg.alpha);
    SimSpace space = make_space(cfg);
    write_header(os, cfg, "simulate");
    ObservableSeries lin, mc;
    const bool want_lin = cfg.engine != Engine::Mcwf;
    const bool want_mc = cfg.engine != Engine::Lindblad;
    if (want_lin) lin = run_lindblad_series(space, cfg);
    if (want_mc) mc = run_mcwf_series(space, cfg);
    write_series_csv(os, space, lin, want_mc ? &mc : nullptr);
    return 0;
}

int cmd_fidelity(const RunConfig& cfg, const std::vector<double>& alphas, std::ostream& os) {
    cfg.validate();
    if (alphas.empty()) throw ConfigError("fidelity: empty alpha list");
    for (double a : alphas)
        if (a <= 0.0) throw ConfigError("fidelity: alpha values must be positive");

    double tau_end = cfg.tau_end;
    if (tau_end <= 0.0) tau_end = 400.0 / *std::min_element(alphas.begin(), alphas.end());

    std::vector<ObservableSeries> runs;
    for (double a : alphas) {
        RunConfig sub = cfg;
        sub.alpha = a;
        sub.tau_end = tau_end;
        SimSpace space = make_space(sub);
        runs.push_back(sub.engine == Engine::Mcwf ? run_mcwf_series(space, sub)
                                                  : run_lindblad_series(space, sub));
    }
    std::ostringstream names;
    for (std::size_t j = 0; j < alphas.size(); ++j) names << ",F_" << alphas[j];
    write_header(os, cfg, "fidelity");
    os << "tau" << names.str() << "\n";
    for (std::size_t i = 0; i < runs[0].tau.size(); ++i) {
        os << format_double(runs[0].tau[i]);
        for (const ObservableSeries& s : runs) os << ',' << format_double(s.fidelity[i]);
        os << "\n";
    }
    return 0;
}

int cmd_sweep_alpha(const RunConfig& cfg, const std::vector<double>& alphas,
                    std::ostream& os) {
    cfg.validate();
    if (alphas.empty()) throw ConfigError("sweep-alpha: empty alpha grid");
    write_header(os, cfg, "sweep-alpha", {"threshold: 1 - F = 1e-05"});
    os << "alpha,tau_s,status,max_fidelity\n";
    for (double a : alphas) {
        if (a <= 0.0) throw ConfigError("sweep-alpha: alpha values must be positive");
        RunConfig sub = cfg;
        sub.alpha = a;
        SimSpace space = make_space(sub);
        GenerationTime g = solve_generation_time(space, sub);
        os << format_double(a) << ','
           << (g.converged ? format_double(g.tau_s) : "nan") << ','
           << (g.converged ? "converged" : "not-converged") << ','
           << format_double(g.max_fidelity) << "\n";
    }
    return 0;
}

int cmd_compare_schemes(const RunConfig& cfg, const std::vector<double>& xis,
                        std::ostream& os) {
    cfg.validate();
    if (xis.empty()) throw ConfigError("compare-schemes: empty xi grid");
    const double alpha_l8 = cfg.alpha;
    const double alpha_l5 = map_alpha_between_schemes(alpha_l8);
    write_header(os, cfg, "compare-schemes",
                 {"alpha map: " + format_double(alpha_l8) + " -> " + format_double(alpha_l5)});
    os << "xi,tau_s_l8,tau_s_l5,ratio,status\n";
    for (double xi : xis) {
        if (xi <= 0.0) throw ConfigError("compare-schemes: xi values must be positive");
        GenerationTime g[2];
        const double alphas[2] = {alpha_l8, alpha_l5};
        for (int i = 0; i < 2; ++i) {
            RunConfig sub = cfg;
            sub.xi = Complex(xi, 0.0);
            sub.alpha = alphas[i];
            sub.tau_end = cfg.tau_end > 0.0 ? cfg.tau_end : 400.0 / alphas[i];
            SimSpace space = make_space(sub);
            g[i] = solve_generation_time(space, sub);
        }
        const bool ok = g[0].converged && g[1].converged;
        os << format_double(xi) << ','
           << (g[0].converged ? format_double(g[0].tau_s) : "nan") << ','
           << (g[1].converged ? format_double(g[1].tau_s) : "nan") << ','
           << (ok ? format_double(g[0].tau_s / g[1].tau_s) : "nan") << ','
           << (ok ? "converged" : "not-converged") << "\n";
    }
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        all_ok = all_ok && ok;
        os << (ok ? "PASS" : "FAIL") << ' ' << name << ": " << detail << "\n";
    };

    TcsParams params(cfg.xi, cfg.p, cfg.q);

    {  // defining eigenrelations and truncated normalization
        TcsVector v = tcs_fock(params, cfg.n_max);
        EigenrelationResiduals r = verify_eigenrelations(v);
        report("tcs-eigenrelations",
               r.trilinear < 1e-8 && r.charge_p < 1e-13 && r.charge_q < 1e-13,
               "residuals " + format_double(r.trilinear) + " " +
                   format_double(r.charge_p) + " " + format_double(r.charge_q));
        const double s = v.squared_norm();
        report("tcs-normalization", s >= 1.0 - 1e-12 && s <= 1.0 + 1e-12,
               "sum |C_n|^2 = " + format_double(s));
    }

    {  // integral representation vs closed form
        TcsVector a = tcs_fock(params, cfg.n_max);
        TcsVector b = tcs_integral(params, QuadratureConfig{}, cfg.n_max);
        const double dev = (a.coeffs - b.coeffs).cwiseAbs().maxCoeff();
        report("integral-vs-fock", dev < 1e-8, "max coefficient deviation " +
                                                   format_double(dev));
    }

    {  // trilinear reduction, all sign patterns up to global sign
        BasisLayout layout = build_basis(std::min(cfg.n_max, 5));
        bool found = false;
        for (const SignPattern& sp : all_sign_patterns()) {
            ReductionFit fit = verify_trilinear_reduction(sp, layout);
            os << "  pattern " << signs_name(sp) << ": scale ("
               << format_double(fit.scale.real()) << ", "
               << format_double(fit.scale.imag()) << "), residual "
               << format_double(fit.residual) << "\n";
            if (signs_name(sp) == "+--+")
                found = std::abs(fit.scale - Complex(24.0, 0.0)) < 1e-10 &&
                        fit.residual < 1e-13;
        }
        report("trilinear-reduction", found, "pattern +--+ reduces with scale 24");
    }

    {  // full interaction vs calibrated simplified Hamiltonian
        BasisLayout layout = build_basis(std::min(cfg.n_max, 5));
        LaserSet lasers = solve_lasers_for(cfg.xi, cfg.alpha, cfg.ion);
        SparseOperator full = build_full_interaction(lasers, cfg.ion, layout);
        const double eta3 = std::pow(cfg.ion.eta, 3);
        const Complex zeta_cal = 24.0 * Complex(0.0, -eta3 / 6.0) * lasers.lasers[0].rabi *
                                 std::exp(Complex(0.0, -lasers.lasers[0].phase));
        const Complex carrier = lasers.lasers[4].rabi *
                                std::exp(Complex(0.0, -lasers.lasers[4].phase));
        const Complex xi_cal = -carrier / zeta_cal;
        SparseOperator simple = build_hamiltonian(zeta_cal, xi_cal, layout);
        const double rel = (full - simple).frobenius_norm() / full.frobenius_norm();
        report("hamiltonian-reduction", rel < 1e-12,
               "relative deviation " + format_double(rel));
    }

    {  // forward/inverse laser solve
        LaserSet lasers = solve_lasers_for(cfg.xi, cfg.alpha, cfg.ion);
        EffectiveParams eff = effective_params(lasers, cfg.ion);
        const double dev = std::abs(eff.xi - cfg.xi) + std::abs(eff.alpha - cfg.alpha);
        report("laser-roundtrip", dev < 1e-12, "total deviation " + format_double(dev));
    }

    if (cfg.n_max >= std::max(cfg.p, cfg.q)) {  // ladder vs full space, consistent cutoffs
        RunConfig sub = cfg;
        sub.space = Space::Full;
        sub.n_max = std::min(cfg.n_max, 5);
        sub.k = 0;
        sub.tau_end = 20.0;
        if (sub.n_max >= std::max(sub.p, sub.q)) {
            SimSpace full_space = make_space(sub);
            RunConfig lad = sub;
            lad.space = Space::Ladder;
            lad.n_max = sub.n_max - std::max(sub.p, sub.q);
            SimSpace ladder_space = make_space(lad);
            ObservableSeries a = run_lindblad_series(full_space, sub);
            ObservableSeries b = run_lindblad_series(ladder_space, lad);
            double dev = 0.0;
            for (std::size_t i = 0; i < a.tau.size(); ++i) {
                dev = std::max(dev, std::abs(a.sigma_z[i] - b.sigma_z[i]));
                dev = std::max(dev, std::abs(a.fidelity[i] - b.fidelity[i]));
                for (std::size_t j = 0; j < b.probs[i].size() && j < a.probs[i].size(); ++j)
                    dev = std::max(dev, std::abs(a.probs[i][j] - b.probs[i][j]));
            }
            report("ladder-full-equivalence", dev < 1e-10,
                   "max observable deviation " + format_double(dev));
        }
    }

    {  // cutoff robustness of F(tau)
        RunConfig a = cfg, b = cfg;
        a.space = Space::Ladder;
        b.space = Space::Ladder;
        b.n_max = cfg.n_max + 1;
        ObservableSeries sa = run_lindblad_series(make_space(a), a);
        ObservableSeries sb = run_lindblad_series(make_space(b), b);
        double dev = 0.0;
        for (std::size_t i = 0; i < sa.tau.size() && i < sb.tau.size(); ++i)
            dev = std::max(dev, std::abs(sa.fidelity[i] - sb.fidelity[i]));
        report("cutoff-stability", dev < 1e-6,
               "max |F_{n_max+1} - F_{n_max}| = " + format_double(dev));
    }

    return all_ok ? 0 : 1;
}

}  // namespace tcsim
