// Copyright 2026 The Cheshire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cheshire/cli.hpp"
#include "cheshire/montecarlo.hpp"
#include "cheshire/optics.hpp"
#include "cheshire/pointer.hpp"
#include "cheshire/postselect.hpp"
#include "cheshire/qstate.hpp"
#include "test_util.hpp"

using namespace cheshire;

namespace {

const auto kStates = canonical_states();
const auto kObs = canonical_observables();

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string &what) {
        if (!cond) {
            ok = false;
            detail << " [" << what << "]";
        }
    }
    void near(double actual, double expected, double tol, const std::string &what) {
        if (!(std::abs(actual - expected) <= tol)) {
            ok = false;
            detail << " [" << what << ": got " << actual << ", want " << expected << " +- " << tol << "]";
        }
    }
};

PostSelectedPointer select(const std::vector<std::pair<std::string, GaussianPointer>> &couplings) {
    CoupledState c = uncoupled(kStates.pre);
    for (const auto &[name, p] : couplings) {
        c = couple(c, kObs.at(name), p).value();
    }
    return postselect_pointer(c, kStates.post).value();
}

void weak_values_exact(Check &c) {
    const std::pair<const char *, double> cases[] = {
        {"Pi1", 1.0}, {"Pi2", 0.0}, {"sigma_z1", 0.0}, {"sigma_z2", 1.0}};
    for (const auto &[name, want] : cases) {
        Complex wv = weak_value(kObs.at(name), kStates.pre, kStates.post).value();
        c.near(wv.real(), want, 1e-12, std::string(name) + " re");
        c.near(wv.imag(), 0.0, 1e-12, std::string(name) + " im");
    }
}

void certain_path(Check &c) {
    auto pi1 = abl_distribution(kObs.at("Pi1"), kStates.pre, kStates.post).value();
    c.near(pi1.probability({1.0}), 1.0, 1e-12, "P(Pi1=1)");
    c.near(pi1.probability({0.0}), 0.0, 1e-12, "P(Pi1=0)");
    auto both = sequential_distribution({kObs.at("Pi1"), kObs.at("Pi2")}, kStates.pre, kStates.post).value();
    c.near(both.probability({1.0, 0.0}), 1.0, 1e-12, "P(1,0)");
    for (const auto &[t, p] : both.outcomes) {
        if (t != OutcomeTuple{1.0, 0.0}) {
            c.near(p, 0.0, 1e-12, "other tuple");
        }
    }
}

void smile_in_arm_two(Check &c) {
    auto dist = abl_distribution(kObs.at("sigma_z2"), kStates.pre, kStates.post).value();
    auto oracle = oracle::collapse_oracle({kObs.at("sigma_z2")}, kStates.pre, kStates.post);
    const std::pair<double, double> want[] = {{1.0, 1.0 / 6}, {-1.0, 1.0 / 6}, {0.0, 2.0 / 3}};
    for (const auto &[a, p] : want) {
        c.near(dist.probability({a}), p, 1e-12, "abl");
        c.near(oracle.at({a}), p, 1e-12, "oracle");
    }
}

void paradox_dissolves(Check &c) {
    auto dist = sequential_distribution({kObs.at("sigma_z2"), kObs.at("Pi1"), kObs.at("Pi2")}, kStates.pre,
                                        kStates.post)
                    .value();
    double smile_with_cat = 0.0, smile_total = 0.0;
    for (const auto &[t, p] : dist.outcomes) {
        if (t[0] != 0.0) {
            smile_total += p;
            if (t[1] == 1.0) {
                smile_with_cat += p;
            }
        }
    }
    c.near(smile_with_cat, 0.0, 1e-12, "momentum in arm 2 with photon in arm 1");
    c.near(smile_total, 1.0 / 3, 1e-12, "momentum in arm 2 occurs");
}

void postselection_equivalence(Check &c) {
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Ket s = oracle::random_ket(rng);
        auto r = run_interferometer(s).value();
        worst = std::max(worst, std::abs(r.probabilities.at(Detector::D1) - std::norm(inner(kStates.post, s))));
    }
    c.near(worst, 0.0, 1e-12, "max |P(D1) - |<Phi|s>|^2|");
    c.near(std::norm(inner(kStates.post, kStates.pre)), 0.25, 1e-12, "|<Phi|Psi>|^2");
}

void weak_limit_convergence(Check &c) {
    std::vector<double> err;
    for (double r : {1e-1, 1e-2, 1e-3}) {
        auto sel = select({{"sigma_z2", {1.0, r, Axis::Horizontal}}});
        auto mom = mixture_moments(sel.mixture).value();
        err.push_back(std::abs(mom[0].mean / r - 1.0));
        auto quad = oracle::quadrature_moments({sel.mixture.weights, sel.mixture.displacements, 1.0}, 1);
        c.near(mom[0].mean, quad.mean[0], 1e-9 * std::abs(quad.mean[0]), "closed vs quadrature mean");
        c.near(mom[0].variance, quad.variance[0], 1e-9 * quad.variance[0], "closed vs quadrature variance");
    }
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        double ratio = err[k] / err[k + 1];
        c.require(ratio >= 50.0 && ratio <= 200.0, "error ratio per decade " + std::to_string(ratio));
    }
}

void strong_limit(Check &c) {
    const double g = 1e3, s = 1.0;
    auto sel = select({{"sigma_z2", {s, g, Axis::Horizontal}}});
    auto abl = abl_distribution(kObs.at("sigma_z2"), kStates.pre, kStates.post).value();
    for (double a : {1.0, -1.0, 0.0}) {
        const double step = s / 50;
        double mass = 0.0;
        for (int i = -400; i <= 400; ++i) {
            double x[] = {a * g + step * i};
            mass += (std::abs(i) == 400 ? 0.5 : 1.0) * mixture_density(sel.mixture, x).value() * step;
        }
        c.near(mass, abl.probability({a}), 1e-6, "lobe " + std::to_string(a));
    }
}

void simultaneous_cat(Check &c) {
    const double g = 1e-2, h = 1e-2;
    auto sel = select({{"Pi1", {1.0, g, Axis::Vertical}}, {"sigma_z2", {1.0, h, Axis::Horizontal}}});
    auto mom = mixture_moments(sel.mixture).value();
    c.near(mom[0].mean / g, 1.0, 1e-3, "mean_x/g");
    c.near(mom[1].mean / h, 1.0, 1e-3, "mean_y/h");
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void monte_carlo_tier(Check &c) {
    const std::uint64_t n = 1'000'000;
    cli::RawConfig raw;
    raw.preset = "weak-cheshire";
    auto cfg = cli::resolve_config(raw).value();
    cfg.shots = n;
    Experiment e = cli::make_experiment(cfg);

    auto base = sample_shots(e, n, cfg.seed, 1).value();
    auto stats = estimate(base, e).value();
    const double p = 0.25;
    c.near(stats.post_rate, p, 3 * std::sqrt(p * (1 - p) / static_cast<double>(n)), "post_rate");
    for (const auto &a : stats.axes) {
        c.near(*a.mean_over_coupling, 1.0, 4 * a.standard_error / a.coupling,
               std::string("mean/g ") + axis_name(a.axis));
    }
    for (unsigned k : {4u, 16u}) {
        c.require(sample_shots(e, n, cfg.seed, k).value() == base, "shard invariance k=" + std::to_string(k));
    }

    auto root = std::filesystem::temp_directory_path() / "cheshire_acceptance";
    std::filesystem::remove_all(root);
    std::string csv[2];
    for (int run = 0; run < 2; ++run) {
        auto run_cfg = cfg;
        run_cfg.out_dir = (root / ("run" + std::to_string(run))).string();
        auto report = cli::run_preset(run_cfg);
        c.require(report.exit_code == 0, "run_preset: " + report.diagnostic);
        csv[run] = slurp(std::filesystem::path(run_cfg.out_dir) / "shots.csv");
    }
    c.require(!csv[0].empty() && csv[0] == csv[1], "byte-identical shots.csv");
    std::filesystem::remove_all(root);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check &)>>> criteria{
        {"1 weak values exact", weak_values_exact},
        {"2 certain path", certain_path},
        {"3 smile in arm 2 (ABL vs collapse oracle)", smile_in_arm_two},
        {"4 paradox dissolution", paradox_dissolves},
        {"5 post-selection equivalence", postselection_equivalence},
        {"6 weak-limit convergence + quadrature oracle", weak_limit_convergence},
        {"7 strong-limit lobes = ABL", strong_limit},
        {"8 simultaneous cat and smile", simultaneous_cat},
        {"9 Monte Carlo statistical tier", monte_carlo_tier},
    };
    int failures = 0;
    for (const auto &[name, fn] : criteria) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception &e) {
            c.ok = false;
            c.detail << " [exception: " << e.what() << "]";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %-48s (%.2fs)%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), secs,
                    c.detail.str().c_str());
        failures += c.ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
