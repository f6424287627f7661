// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Each criterion also has to finish inside its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "chainrisk/analytic.hpp"
#include "chainrisk/commands.hpp"
#include "chainrisk/dists.hpp"
#include "chainrisk/econ.hpp"
#include "chainrisk/error.hpp"
#include "chainrisk/model.hpp"
#include "chainrisk/montecarlo.hpp"
#include "chainrisk/special.hpp"

using namespace chainrisk;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

Distribution expo(double rate) { return Distribution::exponential(rate); }

BlockchainSpec canonical(int m, std::size_t k) {
    return BlockchainSpec::from_quorum(m, std::vector<Distribution>(k, expo(1.0)), expo(1.0), expo(1.0));
}

// 1. Closed-form race.
void closed_form_race(Outcome& o) {
    const auto s = canonical(1, 1);
    const double p = hack_detect_prob(s);
    const double et = mean_functional_time(s);
    const auto mc_p = estimate_cycle_hack_prob(s, 30'000, 0);
    const auto mc_t = estimate_mean_functional_time(s, 30'000, 0);
    o.detail << "p=" << p << " E[T]=" << et << " mc_p=" << mc_p.mean << "±" << mc_p.std_error
             << " mc_T=" << mc_t.mean << "±" << mc_t.std_error;
    o.require(std::fabs(p - 0.5) <= 1e-9, "|p - 0.5| <= 1e-9");
    o.require(std::fabs(et - 2.0) <= 1e-6, "|E[T] - 2| <= 1e-6");
    o.require(std::fabs(mc_p.mean - p) <= 3.0 * mc_p.std_error, "MC p within 3 se");
    o.require(std::fabs(mc_t.mean - et) <= 3.0 * mc_t.std_error, "MC E[T] within 3 se");
}

// 2. Multi-hacker closed form.
void multi_hacker(Outcome& o) {
    const auto s = canonical(1, 3);
    const double p = hack_detect_prob(s);
    const double ez = conditional_hack_mean(s);
    o.detail << "p=" << p << " E[Z|Z<Y]=" << ez;
    o.require(std::fabs(p - 0.75) <= 1e-9, "|p - 0.75| <= 1e-9");
    o.require(std::fabs(ez - 0.25) <= 1e-6, "|E[Z|Z<Y] - 0.25| <= 1e-6");
}

// 3. Two-gamma series against Erlang and a trapezoid convolution.
void series_equivalence(Outcome& o) {
    double equal_err = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double t = 0.25 * i;
        // Gamma(2, 1.5) + Gamma(3, 1.5) is Erlang(5, 1.5).
        double erlang = 0.0;
        double term = 1.0;
        for (int j = 0; j < 5; ++j) {
            if (j > 0) term *= 1.5 * t / j;
            erlang += term;
        }
        erlang = 1.0 - std::exp(-1.5 * t) * erlang;
        equal_err = std::max(equal_err, std::fabs(gamma_sum_cdf({2.0, 1.5, 3.0, 1.5}, t) - erlang));
    }
    // Gamma(2, 1) + Gamma(3, 2) by trapezoid on ∫ f1(s) F2(t - s) ds, step 1e-4.
    const auto f1 = [](double s) { return s * std::exp(-s); };
    const auto cdf2 = [](double x) { return 1.0 - std::exp(-2.0 * x) * (1.0 + 2.0 * x + 2.0 * x * x); };
    double unequal_err = 0.0;
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const auto n = static_cast<long>(std::llround(t / 1e-4));
        const double h = t / static_cast<double>(n);
        double sum = 0.5 * (f1(0.0) * cdf2(t) + f1(t) * cdf2(0.0));
        for (long i = 1; i < n; ++i) sum += f1(h * i) * cdf2(t - h * i);
        unequal_err = std::max(unequal_err, std::fabs(gamma_sum_cdf({2.0, 1.0, 3.0, 2.0}, t) - sum * h));
    }
    o.detail << "equal-rate max err=" << equal_err << " unequal-rate max err=" << unequal_err;
    o.require(equal_err <= 1e-8, "equal-rate error <= 1e-8");
    o.require(unequal_err <= 1e-6, "unequal-rate error <= 1e-6");
}

// 4. Analytic survival against Monte Carlo on five configurations.
void cross_engine_survival(Outcome& o) {
    const std::vector<std::pair<std::string, BlockchainSpec>> configs = {
        {"exp m1k1", canonical(1, 1)},
        {"exp m3k5", BlockchainSpec::from_quorum(3, std::vector<Distribution>(5, expo(1.0)), expo(0.5), expo(2.0))},
        {"gamma", BlockchainSpec::from_quorum(2, std::vector<Distribution>(2, Distribution::gamma(2.0, 3.0)),
                                              Distribution::gamma(2.0, 1.0), expo(1.0))},
        {"gamma+weibull",
         BlockchainSpec::from_quorum(3, std::vector<Distribution>(3, Distribution::gamma(1.5, 2.0)),
                                     Distribution::weibull(2.0, 1.5), Distribution::weibull(1.0, 0.8))},
        {"gamma+weibull<1",
         BlockchainSpec::from_quorum(4, {Distribution::gamma(0.7, 1.0), Distribution::gamma(1.2, 1.5)},
                                     Distribution::weibull(1.5, 0.9), Distribution::gamma(2.0, 2.0))},
    };
    std::uint64_t seed = 0;
    for (const auto& [name, spec] : configs) {
        const double t_max = 3.0 * mean_functional_time(spec);
        std::vector<double> t(64);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = t_max * static_cast<double>(i) / 63.0;
        GridOptions grid;
        grid.horizon = t_max;
        const auto analytic = instantaneous_prob(spec, t, grid);
        const auto mc = estimate_survival_curve(spec, t, 30'000, seed++);
        double worst_excess = -INFINITY;
        double sup = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = std::fabs(analytic[i] - mc[i].mean);
            sup = std::max(sup, d);
            worst_excess = std::max(worst_excess, d - std::max(0.02, 3.0 * mc[i].std_error));
        }
        o.detail << name << " sup=" << sup << "; ";
        o.require(worst_excess <= 0.0, name + ": sup |P - P_mc| <= max(0.02, 3 se)");
    }
}

// Shared by 5 and 6: strict decrease / increase checks on analytic curves.
bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

// 5. Increasing in m.
void monotone_in_m(Outcome& o) {
    const std::vector<double> t{1.0, 3.0};
    GridOptions grid;
    grid.horizon = 3.0;
    for (std::size_t k : {1u, 5u}) {
        std::vector<double> et;
        std::vector<std::vector<double>> p;
        for (int m = 1; m <= 12; ++m) {
            et.push_back(mean_functional_time(canonical(m, k)));
            p.push_back(instantaneous_prob(canonical(m, k), t, grid));
        }
        o.require(strictly_increasing(et), "E[T_m] strictly increasing, k=" + std::to_string(k));
        for (std::size_t i = 0; i < t.size(); ++i) {
            double worst = INFINITY;
            for (std::size_t m = 1; m < p.size(); ++m) worst = std::min(worst, p[m][i] - p[m - 1][i]);
            o.detail << "k=" << k << " t=" << t[i] << " min step=" << worst << "; ";
            o.require(worst >= 0.0, "P_m(t) nondecreasing in m");
        }
    }
}

// 6. Decreasing in k.
void monotone_in_k(Outcome& o) {
    const std::vector<double> t{1.0, 3.0};
    GridOptions grid;
    grid.horizon = 3.0;
    for (int m : {2, 5}) {
        std::vector<double> neg_et;
        std::vector<std::vector<double>> p;
        for (std::size_t k = 1; k <= 6; ++k) {
            neg_et.push_back(-mean_functional_time(canonical(m, k)));
            p.push_back(instantaneous_prob(canonical(m, k), t, grid));
        }
        o.require(strictly_increasing(neg_et), "E[T_k] strictly decreasing, m=" + std::to_string(m));
        for (std::size_t i = 0; i < t.size(); ++i) {
            double worst = -INFINITY;
            for (std::size_t k = 1; k < p.size(); ++k) worst = std::max(worst, p[k][i] - p[k - 1][i]);
            o.detail << "m=" << m << " t=" << t[i] << " max step=" << worst << "; ";
            o.require(worst <= 0.0, "P_k(t) nonincreasing in k");
        }
    }
}

// 7. Large-m trend.
void large_m_trend(Outcome& o) {
    GridOptions grid;
    grid.horizon = 3.0;
    int first = 0;
    for (int m = 1; m <= 40 && first == 0; ++m) {
        if (instantaneous_prob(canonical(m, 5), std::vector<double>{3.0}, grid)[0] >= 0.99) first = m;
    }
    const double ratio = mean_functional_time(canonical(20, 5)) / mean_functional_time(canonical(1, 5));
    o.detail << "first m with P_m5(3) >= 0.99: " << first << "; E[T_20]/E[T_1]=" << ratio;
    o.require(first > 0, "P_m5(3) >= 0.99 for some m <= 40");
    o.require(ratio >= 10.0, "E[T] grows at least 10x from m=1 to m=20");
}

// 8. Renewal solver.
void renewal_solver(Outcome& o) {
    const std::vector<BlockchainSpec> specs = {
        canonical(1, 1), canonical(3, 2),
        BlockchainSpec::from_quorum(2, {Distribution::gamma(2.0, 3.0)}, Distribution::gamma(2.0, 1.0), expo(1.0)),
        BlockchainSpec::from_quorum(3, std::vector<Distribution>(3, Distribution::gamma(0.7, 1.0)),
                                    Distribution::weibull(2.0, 1.5), Distribution::weibull(1.0, 0.8))};
    double worst_ratio = 0.0;
    for (const auto& s : specs) {
        const auto g = renewal_function(s);
        worst_ratio = std::max(worst_ratio, renewal_residual(g) / g.step);
    }
    o.detail << "max residual/step=" << worst_ratio << "; ";
    o.require(worst_ratio <= 10.0, "residual <= 10 step");

    const auto& spec = specs[2];
    GridOptions opts;
    opts.horizon = 12.0;
    const auto g = renewal_function(spec, opts);
    const std::vector<double> t{1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    const auto mc = estimate_renewal_count(spec, t, 100'000, 0);
    double worst_z = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto idx = static_cast<std::size_t>(std::llround(t[i] / g.step));
        worst_z = std::max(worst_z, std::fabs(mc[i].mean - g.g[idx]) / mc[i].std_error);
    }
    o.detail << "max |z| vs MC counts=" << worst_z << "; ";
    o.require(worst_z <= 3.0, "G within 3 sigma of MC completed-cycle counts");

    // Hacking essentially impossible, re-set instantaneous: Poisson(1) renewals.
    const auto poisson = BlockchainSpec::from_quorum(1, {Distribution::gamma(200.0, 1.0)}, expo(1.0), expo(1e6));
    GridOptions popts;
    popts.horizon = 10.0;
    const auto pg = renewal_function(poisson, popts);
    double worst_rel = 0.0;
    for (std::size_t i = pg.size() / 10; i < pg.size(); ++i) {
        worst_rel = std::max(worst_rel, std::fabs(pg.g[i] - pg.time(i)) / pg.time(i));
    }
    o.detail << "Poisson max rel err=" << worst_rel;
    o.require(worst_rel <= 1e-2, "Poisson case G(t) = t within 1e-2 relative");
}

// 9. Wald decomposition.
void wald(Outcome& o) {
    const auto w = wald_decomposition(canonical(1, 1), 100'000, 0);
    o.detail << "sum(Y+W)=" << w.cycle_time_total.mean << " predicted=" << w.predicted << " z=" << w.z_score;
    o.require(std::fabs(w.z_score) <= 3.0, "|z| <= 3");
}

// 10. Economics.
void economics(Outcome& o) {
    const std::string base =
        "[model]\nm = 1\nhacker = exponential rate=1\nhackers = 5\ndetect = exponential rate=1\n"
        "reset = exponential rate=1\n[sweep]\nm = 1..40\n";
    auto econ = [](double f) {
        std::ostringstream e;
        e.precision(17);
        e << "[econ]\nrevenue = " << 0.2 * f << ", 1, 0\nreset_cost = " << 2.0 * f << ", 0.2, 0\nrun_cost = "
          << 2.0 * f << ", 0.3, 0\n";
        return e.str();
    };
    int best_m[2] = {0, 0};
    for (int pass = 0; pass < 2; ++pass) {
        const double f = pass == 0 ? 1.0 : 7.5;
        const auto table = cmd_optimize(parse_config(base + econ(f)), EngineChoice::Analytic).table;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (std::stod(table.rows[i][1]) > std::stod(table.rows[argmax][1])) argmax = i;
            if (table.rows[i][2] == "best") best_m[pass] = std::stoi(table.rows[i][0]);
        }
        const int argmax_m = std::stoi(table.rows[argmax][0]);
        o.detail << "scale " << f << ": m*=" << best_m[pass] << " argmax=" << argmax_m << "; ";
        o.require(best_m[pass] == argmax_m, "m* equals argmax of exported curve");
    }
    o.require(best_m[0] == best_m[1], "joint cost scaling leaves m* unchanged");
}

// 11. Determinism of validate.
void determinism(Outcome& o) {
    auto cfg = parse_config(
        "[model]\nm = 2\nhacker = gamma shape=1.5 rate=2\nhackers = 2\ndetect = weibull scale=1 shape=2\n"
        "reset = exponential rate=1\n[engine]\nreps = 20000\nseed = 12345\n[sweep]\nt = 0:4:0.5\n");
    const std::string a = cmd_validate(cfg, EngineChoice::Both).table.str();
    const std::string b = cmd_validate(cfg, EngineChoice::Both).table.str();
    cfg.engine.threads = 4;
    const std::string c = cmd_validate(cfg, EngineChoice::Both).table.str();
    o.detail << "body bytes=" << a.size();
    o.require(a == b, "identical bodies across runs");
    o.require(a == c, "identical bodies across thread counts");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"closed-form race", 5, closed_form_race},
        {"multi-hacker closed form", 5, multi_hacker},
        {"gamma-sum series equivalence", 10, series_equivalence},
        {"cross-engine survival", 180, cross_engine_survival},
        {"monotone increasing in m", 120, monotone_in_m},
        {"monotone decreasing in k", 120, monotone_in_k},
        {"large-m trend", 120, large_m_trend},
        {"renewal solver", 60, renewal_solver},
        {"Wald decomposition", 30, wald},
        {"economics shapes", 60, economics},
        {"validate determinism", 60, determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].budget_seconds) {
            o.pass = false;
            o.detail << " [over time budget " << criteria[i].budget_seconds << " s]";
        }
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
