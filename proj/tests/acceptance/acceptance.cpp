// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "qsnom/cli.hpp"
#include "qsnom/closed_forms.hpp"
#include "qsnom/hamiltonian.hpp"
#include "qsnom/metrology.hpp"
#include "qsnom/perturbation.hpp"
#include "qsnom/tensor.hpp"

using namespace qsnom;

namespace {

struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what)
    {
        if (!ok)
            failures.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what)
    {
        if (!(std::abs(got - want) <= tol)) {
            std::ostringstream os;
            os.precision(17);
            os << what << ": got " << got << ", want " << want << " +/- " << tol;
            failures.push_back(os.str());
        }
    }
    void rel(double got, double want, double tol, const std::string& what)
    {
        near(got, want, tol * std::abs(want), what);
    }
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Check&)> body;
};

ForwardParams fixture(double eps)
{
    ForwardParams fp;
    fp.epsilon_d = eps;
    fp.R = 0.5;
    fp.omega = 1.0;
    fp.kappa = 1.0;
    return fp;
}

void vacuum_neutrality(Check& c)
{
    for (double R : {0.5, 1.0, 3.0})
        for (double omega : {0.5, 1.0, 2.0}) {
            ForwardParams fp;
            fp.epsilon_d = 1.0;
            fp.R = R;
            fp.omega = omega;
            const auto r = forward(fp);
            c.near(r.delta_e, 0.0, 1e-15, "delta_e");
            c.near(r.omega_s, omega, 1e-15, "omega_s");
            c.near(r.amplitude, 1.0, 1e-15, "amplitude");
            for (const auto& a : {std::array<double, 4>{1, 0, 0, 0}, std::array<double, 4>{0.5, 0.5, 0.5, 0.5},
                                  std::array<double, 4>{0.6, 0, 0, 0.8}}) {
                const auto b = paper_beta(InitialCoefficients(a), {R, 0.0, omega, 0.05});
                for (std::size_t j = 0; j < 4; ++j)
                    c.near(b.beta[j], a[j], 1e-15, "beta");
                c.near(paper_scattered_amplitude(b), 1.0, 1e-15, "amplitude(a)");
            }
        }
}

void inverse_cube_law(Check& c)
{
    for (double alpha : {0.1, 0.5, 0.9})
        for (double R : {0.25, 0.5, 1.0, 3.3}) {
            const double ratio = paper_energy_shift(1.0, {R, alpha, 1.0, 0.05}) /
                                 paper_energy_shift(1.0, {2.0 * R, alpha, 1.0, 0.05});
            c.rel(ratio, 8.0, 1e-12, "dE(R)/dE(2R)");
        }
}

void oracle_correctness(Check& c)
{
    const TipDipole tip{1.0, 1.0, 1.0, 0.0};
    const auto image = derive_image(tip, {3.0});
    const auto h0 = build_pair_h0(tip, image);
    const auto pt = rs_pt2(h0, build_pair_delta_h(0.01), 0);
    c.near(pt.e2, -8e-5, 1e-12, "rs_pt2 ground shift");

    const auto exact = validate_against_exact(h0, build_pair_delta_h(0.01), 0);
    c.expect(exact.residual < 1e-7, "pt2 vs exact residual < 1e-7");
    c.near(exact.exact_energy, oracle::two_level_ground(0.0, 1.25, 0.01), 1e-15, "exact ground vs 2x2 oracle");

    double prev = -1.0;
    for (double g : {0.04, 0.02, 0.01, 0.005}) {
        const double res = validate_against_exact(h0, build_pair_delta_h(g), 0).residual;
        if (prev > 0.0)
            c.expect(prev / res >= 8.0, "residual halving ratio >= 8 at g=" + std::to_string(g));
        prev = res;
    }
}

void worked_fixture(Check& c)
{
    const auto r = forward(fixture(3.0));
    c.near(r.delta_e, -0.2, 1e-12, "delta_e");
    c.near(r.omega_s, 0.8, 1e-12, "omega_s");
    c.near(r.beta.beta[0], 0.92, 1e-12, "beta1");
    c.near(r.amplitude, 0.92, 1e-12, "amplitude");
}

void reduced_state_equivalence(Check& c)
{
    const ClosedFormParams p{0.5, 0.5, 1.0, 1.0};
    for (const auto& a : {std::array<double, 4>{1, 0, 0, 0}, std::array<double, 4>{0.5, 0.5, 0.5, 0.5}}) {
        const auto beta = paper_beta(InitialCoefficients(a), p);
        const double norm = paper_scattered_amplitude(beta);
        Eigen::VectorXcd dip(4);
        for (int j = 0; j < 4; ++j)
            dip(j) = beta.beta[static_cast<std::size_t>(j)] / norm;
        const auto psi = kron(StateVector({2, 2}, dip), StateVector::basis({2}, 1));
        const auto rho = outer(psi);
        const auto photon = partial_trace(rho, {2});

        c.near(std::abs(photon(1, 1) - 1.0), 0.0, 1e-12, "<1|rho_ph|1>");
        c.near(std::abs(photon(0, 0)), 0.0, 1e-12, "<0|rho_ph|0>");
        c.near(std::abs(photon(0, 1)), 0.0, 1e-12, "<0|rho_ph|1>");
        c.near(photon.trace().real(), 1.0, 1e-12, "weight sum of normalized beta^2");

        // The dipole-pair marginal reproduces the closed-form density matrix.
        const auto pair = partial_trace(rho, {0, 1});
        c.near((pair.entries() - paper_density_matrix(beta).entries()).cwiseAbs().maxCoeff(), 0.0, 1e-12,
               "rho_ab vs closed form");
    }
}

void metrology_round_trip(Check& c)
{
    auto run = [&](double eps) {
        const auto fp = fixture(eps);
        InversionProblem p;
        p.observed_omega_s = forward(fp).omega_s;
        p.R = fp.R;
        p.omega = fp.omega;
        p.kappa = fp.kappa;
        const auto r = invert_permittivity(p);
        c.rel(r.epsilon_d, eps, 1e-6, "recovered eps");
        c.expect(r.iterations <= 200, "iterations <= 200 at eps=" + std::to_string(eps));
    };
    for (double eps : {2.0, 4.0, 11.7})
        run(eps);
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(1.01, 100.0);
    for (int i = 0; i < 50; ++i)
        run(u(rng));
}

void consistency(Check& c)
{
    ConsistencyConfig cfg;
    cfg.alphas = {0.5};
    cfg.radii = {0.5, 1.0, 2.0, 4.0};
    const auto rep = consistency_report(cfg);
    c.expect(rep.rows.size() == 4, "four rows");
    for (const auto& r : rep.rows) {
        c.expect(!r.error, "row evaluated");
        c.near(r.oracle_exponent, -6.0, 0.01, "oracle exponent");
        c.near(r.paper_exponent, -3.0, 1e-9, "paper exponent");
    }
    bool flagged = false;
    for (const auto& f : rep.flags)
        flagged = flagged || f.find("R-exponent mismatch") != std::string::npos;
    c.expect(flagged, "discrepancy flagged");
}

void degeneracy_guard(Check& c)
{
    const double alpha = 1.0 - 1e-13;
    try {
        paper_beta(InitialCoefficients({0.0, 1.0, 0.0, 0.0}), {1.0, alpha, 1.0, 0.05});
        c.expect(false, "paper_beta returned a number");
    } catch (const Error& e) {
        c.expect(e.kind() == ErrorKind::DegenerateDenominator, "paper_beta kind");
    }
    const TipDipole tip{1.0, 1.0, 1.0, 0.0};
    const auto ham = build_hamiltonian(tip, {permittivity_from_alpha(alpha)}, ModelConfig{});
    try {
        rs_pt2(ham.h0, ham.delta_h, basis_index(0, 1, 1, 1));
        c.expect(false, "rs_pt2 returned a number");
    } catch (const Error& e) {
        c.expect(e.kind() == ErrorKind::DegenerateGap, "rs_pt2 kind");
    }
}

struct CliRun {
    int code;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"qsnom"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    return {cli::run(static_cast<int>(argv.size()), argv.data(), out, err), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cli_contract(Check& c)
{
    namespace fs = std::filesystem;
    ::setenv("QSNOM_LOG", "quiet", 1);
    const auto dir = fs::temp_directory_path() / ("qsnom_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    const std::vector<std::string> sweep{"sweep", "--set", "sweep.values=1,2,3,11.7", "--set", "R_nm=0.5"};
    auto with_out = [](std::vector<std::string> v, const std::string& out) {
        v.insert(v.end(), {"--out", out});
        return v;
    };
    c.expect(cli(with_out(sweep, a)).code == 0, "sweep exit 0");
    c.expect(cli(with_out(sweep, b)).code == 0, "sweep rerun exit 0");
    c.expect(!slurp(a).empty() && slurp(a) == slurp(b), "byte-identical sweep CSV");
    c.expect(cli({"oracle-check", "--out", a}).code == 0 && cli({"oracle-check", "--out", b}).code == 0 &&
                 slurp(a) == slurp(b),
             "byte-identical oracle-check CSV");

    c.expect(cli({"simulate", "--set", "epsilon_d=3"}).code == 0, "exit 0 success");
    const auto bad = cli({"simulate", "--set", "R_nm=-1"});
    c.expect(bad.code == 2 && bad.err.find("R_nm") != std::string::npos, "exit 2 validation names field");
    c.expect(cli({"invert", "--set", "observed_omega_s=1.5"}).code == 3, "exit 3 model error");
    c.expect(cli(with_out(sweep, dir.string())).code == 4, "exit 4 unwritable output");
    fs::remove_all(dir);
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "vacuum neutrality", 1.0, vacuum_neutrality},
        {2, "closed-form R^-3 law", 1.0, inverse_cube_law},
        {3, "perturbation engine vs exact diagonalization", 1.0, oracle_correctness},
        {4, "worked-arithmetic fixture", 1.0, worked_fixture},
        {5, "reduced photon state via partial trace", 1.0, reduced_state_equivalence},
        {6, "permittivity inversion round trip", 5.0, metrology_round_trip},
        {7, "consistency report R exponents", 2.0, consistency},
        {8, "degeneracy guard", 1.0, degeneracy_guard},
        {9, "CLI determinism and exit codes", 2.0, cli_contract},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("unexpected exception: ") + e.what());
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > cr.budget_s)
            check.failures.push_back("runtime " + std::to_string(dt) + " s exceeds " + std::to_string(cr.budget_s) + " s");
        const bool ok = check.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("[%s] AC%d %s (%.3f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), dt);
        for (const auto& f : check.failures)
            std::printf("       %s\n", f.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
