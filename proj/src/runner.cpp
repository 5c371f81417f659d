#include "simqd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <thread>

#include "json.hpp"

#include "simqd/errors.hpp"

namespace simqd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

PulseSpec make_pulse(const ScenarioConfig& cfg, double duration) {
    PulseSpec p = PulseSpec::gaussian(duration);
    if (cfg.grid.t_start) p.start_time = *cfg.grid.t_start;
    return p;
}

std::vector<double> strictly_increasing(std::vector<double> v, const std::string& path) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(path, "duplicate value on the sweep axis");
    return v;
}

json rates_json(const CouplingRates& r) { return {{"gamma_f1_per_s", r.gamma_f1}, {"gamma_f2_per_s", r.gamma_f2}}; }

json summary_json(const ScenarioSummary& s) {
    json j = {{"duration_s", s.duration},
              {"kernel_off", s.kernel_off},
              {"max_p_excited", s.max_p_excited},
              {"argmax_time_s", s.argmax_time},
              {"dt_s", s.dt},
              {"n_steps", s.n_steps},
              {"rates", rates_json(s.rates)},
              {"file", s.file}};
    if (!std::isnan(s.temperature)) j["temperature_K"] = s.temperature;
    return j;
}

void write_dynamics_csv(const fs::path& path, const DynamicsResult& r) {
    const auto n = static_cast<std::size_t>(r.time.size());
    std::vector<std::vector<double>> cols(5, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        cols[0][i] = r.time[k];
        cols[1][i] = r.sigma_minus[k].real();
        cols[2][i] = r.sigma_minus[k].imag();
        cols[3][i] = std::abs(r.sigma_minus[k]);
        cols[4][i] = r.p_excited[k];
    }
    write_csv(path, "time_s,re_sigma,im_sigma,abs_sigma,p_excited", cols);
}

}  // namespace

std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SIMQD_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_csv(const fs::path& path, const std::string& header, const std::vector<std::vector<double>>& columns) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    std::fputs(header.c_str(), f.get());
    std::fputc('\n', f.get());
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) std::fputc(',', f.get());
            std::fprintf(f.get(), "%.16e", columns[c][i]);
        }
        std::fputc('\n', f.get());
    }
    if (std::ferror(f.get())) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------- kernel

std::vector<KernelSummary> compute_kernel_summaries(const ScenarioConfig& cfg) {
    std::vector<KernelSummary> out(cfg.temperatures.size());
    parallel_for(out.size(), [&](std::size_t i) {
        const ThermalEnv env{cfg.temperatures[i]};
        auto& s = out[i];
        s.temperature = env.temperature;
        s.plateau_re = plateau_real(cfg.material, env, cfg.quadrature);
        s.polaron_rate = polaron_rate(cfg.material, cfg.quadrature);
        s.cutoff_frequency = cutoff_frequency(cfg.material, env, cfg.kernel.cutoff_fraction);
        s.re_at_1ps = kernel_real(1e-12, cfg.material, env, cfg.quadrature);
    });
    return out;
}

std::vector<KernelSummary> run_kernel(const ScenarioConfig& cfg, const fs::path& out) {
    ensure_dir(out);
    auto summaries = compute_kernel_summaries(cfg);
    const auto n_points = static_cast<std::size_t>(std::llround(cfg.kernel.t_max / cfg.kernel.step)) + 1;
    std::vector<DephasingKernel> tables(cfg.temperatures.size());
    parallel_for(tables.size(), [&](std::size_t i) {
        tables[i] = tabulate_kernel(cfg.material, ThermalEnv{cfg.temperatures[i]}, cfg.kernel.t_max, n_points,
                                    cfg.quadrature);
    });

    const double w_hi = integration_limit(cfg.material);
    const std::size_t m = cfg.kernel.integrand_points;
    json list = json::array();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto& s = summaries[i];
        const auto& k = tables[i];
        s.table_file = "kernel_T" + label(s.temperature) + "K.csv";
        s.integrand_file = "integrand_T" + label(s.temperature) + "K.csv";
        const auto n = static_cast<std::size_t>(k.times.size());
        std::vector<std::vector<double>> cols(3, std::vector<double>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            cols[0][j] = k.times[jj];
            cols[1][j] = k.values[jj].real();
            cols[2][j] = k.values[jj].imag();
        }
        write_csv(out / s.table_file, "t_s,re_gamma,im_gamma", cols);

        const ThermalEnv env{s.temperature};
        std::vector<std::vector<double>> integrand(3, std::vector<double>(m));
        for (std::size_t j = 0; j < m; ++j) {
            const double w = w_hi * static_cast<double>(j) / static_cast<double>(m - 1);
            integrand[0][j] = w;
            integrand[1][j] = spectral_density_deformation(w, cfg.material);
            integrand[2][j] = dephasing_integrand(w, cfg.material, env);
        }
        write_csv(out / s.integrand_file, "omega_rad_s,spectral_density,integrand", integrand);

        list.push_back({{"temperature_K", s.temperature},
                        {"plateau_re", s.plateau_re},
                        {"polaron_rate_rad_s", s.polaron_rate},
                        {"cutoff_frequency_rad_s", s.cutoff_frequency},
                        {"re_gamma_1ps", s.re_at_1ps},
                        {"table", s.table_file},
                        {"integrand", s.integrand_file}});
    }
    write_json(out / "kernel_summary.json", {{"provenance", provenance_hash(cfg)},
                                             {"cutoff_fraction", cfg.kernel.cutoff_fraction},
                                             {"temperatures", list}});
    return summaries;
}

// ---------------------------------------------------------------------------- dynamics

const DephasingKernel& KernelSet::at(double temperature) const {
    for (std::size_t i = 0; i < temperatures.size(); ++i)
        if (temperatures[i] == temperature) return kernels[i];
    throw std::out_of_range("no kernel tabulated for T = " + label(temperature) + " K");
}

KernelSet tabulate_kernels(const ScenarioConfig& cfg, const std::vector<double>& temperatures, double t_max) {
    KernelSet set;
    set.temperatures = temperatures;
    set.kernels.resize(temperatures.size());
    parallel_for(temperatures.size(), [&](std::size_t i) {
        set.kernels[i] = cfg.dephasing ? tabulate_kernel_adaptive(cfg.material, ThermalEnv{temperatures[i]}, t_max,
                                                                  cfg.quadrature, cfg.kernel.policy)
                                       : zero_kernel(t_max);
    });
    return set;
}

double required_span(const ScenarioConfig& cfg, const std::vector<double>& durations, const CouplingRates& rates) {
    double span = 0.0;
    for (double d : durations) {
        const auto grid = resolve_grid(cfg.grid, make_pulse(cfg, d), rates);
        span = std::max(span, grid.t_end - grid.t_start);
    }
    return span;
}

DynamicsResult evaluate_point(const ScenarioConfig& cfg, double duration, const CouplingRates& rates,
                              const DephasingKernel& kernel) {
    const PulseSpec pulse = make_pulse(cfg, duration);
    const SimGrid grid = resolve_grid(cfg.grid, pulse, rates);
    return simulate(pulse, rates, kernel, grid, DynamicsOptions{cfg.frame});
}

DynamicsRun compute_dynamics(const ScenarioConfig& cfg) {
    const double span = required_span(cfg, cfg.durations, cfg.rates);
    const KernelSet kernels = tabulate_kernels(cfg, cfg.temperatures, span);
    const DephasingKernel off = zero_kernel(span);

    const std::size_t nt = cfg.temperatures.size();
    const std::size_t nd = cfg.durations.size();
    const std::size_t nref = cfg.reference ? nd : 0;
    DynamicsRun run;
    run.results.resize(nt * nd);
    run.reference_results.resize(nref);
    parallel_for(nt * nd + nref, [&](std::size_t i) {
        if (i < nt * nd) {
            const double temperature = cfg.temperatures[i / nd];
            run.results[i] = evaluate_point(cfg, cfg.durations[i % nd], cfg.rates, kernels.at(temperature));
        } else {
            run.reference_results[i - nt * nd] = evaluate_point(cfg, cfg.durations[i - nt * nd], cfg.rates, off);
        }
    });

    auto summarize = [&](const DynamicsResult& r, double temperature, double duration, bool kernel_off) {
        ScenarioSummary s;
        s.temperature = temperature;
        s.duration = duration;
        s.rates = cfg.rates;
        s.kernel_off = kernel_off;
        s.max_p_excited = r.max_p_excited;
        s.argmax_time = r.argmax_time;
        s.dt = r.dt;
        s.n_steps = static_cast<std::size_t>(r.time.size()) - 1;
        return s;
    };
    for (std::size_t i = 0; i < nt * nd; ++i)
        run.scenarios.push_back(summarize(run.results[i], cfg.temperatures[i / nd], cfg.durations[i % nd], !cfg.dephasing));
    for (std::size_t i = 0; i < nref; ++i)
        run.references.push_back(summarize(run.reference_results[i], std::numeric_limits<double>::quiet_NaN(),
                                           cfg.durations[i], true));
    return run;
}

DynamicsRun run_dynamics(const ScenarioConfig& cfg, const fs::path& out) {
    ensure_dir(out);
    DynamicsRun run = compute_dynamics(cfg);
    json scenarios = json::array();
    for (std::size_t i = 0; i < run.scenarios.size(); ++i) {
        auto& s = run.scenarios[i];
        s.file = "dynamics_T" + label(s.temperature) + "K_d" + label(s.duration) + "s.csv";
        write_dynamics_csv(out / s.file, run.results[i]);
        scenarios.push_back(summary_json(s));
    }
    json references = json::array();
    for (std::size_t i = 0; i < run.references.size(); ++i) {
        auto& s = run.references[i];
        s.file = "reference_d" + label(s.duration) + "s.csv";
        write_dynamics_csv(out / s.file, run.reference_results[i]);
        references.push_back(summary_json(s));
    }
    write_json(out / "dynamics_summary.json",
               {{"provenance", provenance_hash(cfg)},
                {"frame", cfg.frame == DriveFrame::kPolaronShifted ? "polaron_shifted" : "bare_transition"},
                {"scenarios", scenarios},
                {"kernel_off_reference", references}});
    return run;
}

// ---------------------------------------------------------------------------- sweep

EfficiencyMap compute_sweep(const ScenarioConfig& cfg, SweepAxis axis) {
    EfficiencyMap map;
    map.axis = axis;
    map.provenance = provenance_hash(cfg);
    const bool own = cfg.sweep.axis == axis && !cfg.sweep.values.empty();

    std::vector<double> temps = cfg.temperatures;
    std::vector<double> durs = cfg.durations;
    std::vector<double> ratios{cfg.rates.gamma_f2 / cfg.rates.gamma_f1};
    switch (axis) {
        case SweepAxis::kDuration:
            durs = own ? cfg.sweep.values : strictly_increasing(durs, "durations");
            map.axis_values = durs;
            break;
        case SweepAxis::kTemperature:
            temps = own ? cfg.sweep.values : strictly_increasing(temps, "temperatures");
            map.axis_values = temps;
            break;
        case SweepAxis::kRateRatio:
            if (own) ratios = cfg.sweep.values;
            map.axis_values = ratios;
            break;
    }
    for (double r : ratios)
        if (!(r >= 0.0)) throw ConfigError("sweep.values", "rate ratios must be >= 0");
    auto rates_for = [&](double ratio) { return CouplingRates{cfg.rates.gamma_f1, ratio * cfg.rates.gamma_f1}; };

    // Row-major: the axis varies fastest.
    for (double t : (axis == SweepAxis::kTemperature ? std::vector<double>{0.0} : temps))
        for (double d : (axis == SweepAxis::kDuration ? std::vector<double>{0.0} : durs))
            for (double r : (axis == SweepAxis::kRateRatio ? std::vector<double>{0.0} : ratios))
                for (double a : map.axis_values) {
                    EfficiencyPoint p;
                    p.temperature = axis == SweepAxis::kTemperature ? a : t;
                    p.duration = axis == SweepAxis::kDuration ? a : d;
                    p.rates = rates_for(axis == SweepAxis::kRateRatio ? a : r);
                    map.points.push_back(p);
                }

    DurationSearch search;
    search.d_min = cfg.sweep.d_min.value_or(*std::min_element(durs.begin(), durs.end()));
    search.d_max = cfg.sweep.d_max.value_or(*std::max_element(durs.begin(), durs.end()));
    if (!(search.d_max > search.d_min)) {
        search.d_min /= 10.0;
        search.d_max *= 10.0;
    }
    search.rel_tol = cfg.sweep.rel_tol;
    search.grid_divisor = cfg.grid.divisor;
    search.grid_horizon = cfg.grid.horizon;

    if (cfg.sweep.optimize) {
        for (double t : temps)
            for (double r : ratios) map.optima.push_back({t, rates_for(r), {}});
    }

    // One kernel per temperature, long enough for every grid and the optimizer range.
    double span = 0.0;
    for (double r : ratios) {
        const CouplingRates rates = rates_for(r);
        span = std::max(span, required_span(cfg, durs, rates));
        if (cfg.sweep.optimize) {
            for (double d : {search.d_min, search.d_max}) {
                const auto g = SimGrid::for_pulse(PulseSpec::gaussian(d), rates, search.grid_divisor, search.grid_horizon);
                span = std::max(span, g.t_end - g.t_start);
            }
        }
    }
    const KernelSet kernels = tabulate_kernels(cfg, strictly_increasing(temps, "temperatures"), span);

    const std::size_t np = map.points.size();
    parallel_for(np + map.optima.size(), [&](std::size_t i) {
        if (i < np) {
            auto& p = map.points[i];
            const auto r = evaluate_point(cfg, p.duration, p.rates, kernels.at(p.temperature));
            p.value = r.max_p_excited;
            p.argmax_time = r.argmax_time;
        } else {
            auto& o = map.optima[i - np];
            o.optimum = max_transfer_efficiency(PulseSpec::gaussian(search.d_min), o.rates, kernels.at(o.temperature),
                                                search, DynamicsOptions{cfg.frame});
        }
    });
    return map;
}

EfficiencyMap run_sweep(const ScenarioConfig& cfg, SweepAxis axis, const fs::path& out) {
    ensure_dir(out);
    EfficiencyMap map = compute_sweep(cfg, axis);
    const std::string stem = "sweep_" + std::string(to_string(axis));

    std::vector<std::vector<double>> cols(6);
    json points = json::array();
    for (const auto& p : map.points) {
        cols[0].push_back(p.temperature);
        cols[1].push_back(p.duration);
        cols[2].push_back(p.rates.gamma_f1);
        cols[3].push_back(p.rates.gamma_f2);
        cols[4].push_back(p.value);
        cols[5].push_back(p.argmax_time);
        points.push_back({{"temperature_K", p.temperature},
                          {"duration_s", p.duration},
                          {"rates", rates_json(p.rates)},
                          {"max_p_excited", p.value},
                          {"argmax_time_s", p.argmax_time}});
    }
    write_csv(out / (stem + ".csv"),
              "temperature_K,duration_s,gamma_f1_per_s,gamma_f2_per_s,max_p_excited,argmax_time_s", cols);

    json optima = json::array();
    for (const auto& o : map.optima)
        optima.push_back({{"temperature_K", o.temperature},
                          {"rates", rates_json(o.rates)},
                          {"optimal_duration_s", o.optimum.duration},
                          {"optimal_efficiency", o.optimum.efficiency},
                          {"evaluations", o.optimum.evaluations},
                          {"fallback_scan", o.optimum.fallback_scan},
                          {"method", o.optimum.method}});
    write_json(out / (stem + ".json"), {{"provenance", map.provenance},
                                        {"axis", std::string(to_string(axis))},
                                        {"axis_values", map.axis_values},
                                        {"points", points},
                                        {"optima", optima}});
    return map;
}

// ---------------------------------------------------------------------------- oracle

bool OracleReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

OracleReport compute_oracle(std::uint64_t seed) {
    OracleReport report;
    report.seed = seed;

    {
        OracleCheck overlap{"closed_form_vs_fock", 0.0, 1e-8, false, "20 random modes, n_max = 60"};
        OracleCheck unitarity{"fock_unitarity", 0.0, 1e-9, false, "| ||U psi|| - 1 | over the same sample"};
        for (const auto& s : random_overlap_samples(20, seed)) {
            const auto fock = fock_overlap(s.spec, s.t, s.t_prime, s.t_i, 60);
            overlap.max_deviation =
                std::max(overlap.max_deviation, std::abs(fock.value - closed_form_overlap(s.spec, s.t, s.t_prime, s.t_i)));
            unitarity.max_deviation = std::max(unitarity.max_deviation, std::abs(fock.evolved_norm - 1.0));
        }
        overlap.pass = overlap.max_deviation < overlap.tolerance;
        unitarity.pass = unitarity.max_deviation < unitarity.tolerance;
        report.checks.push_back(overlap);
        report.checks.push_back(unitarity);
    }
    {
        const SingleModeSpec free{{1e12, 0.0}, {1.5, 0.5}};
        OracleCheck c{"fock_lambda_zero", std::abs(fock_overlap(free, 3e-12, 1e-12, 0.0, 60).value - 1.0), 1e-10, false,
                      "lambda = 0, alpha = 1.5+0.5i"};
        c.pass = c.max_deviation < c.tolerance;
        report.checks.push_back(c);
    }
    {
        const PhononMode mode{1e12, 1e11};
        const ThermalEnv env{4.0};
        const auto mc = thermal_average_monte_carlo(mode, env, 2e-12, 0.0, 0.0, 1000000, seed);
        const cplx exact = thermal_average_closed_form(mode, env, 2e-12, 0.0);
        char detail[128];
        std::snprintf(detail, sizeof detail, "1e6 samples at 4 K, standard error %.2e", mc.std_error);
        OracleCheck c{"thermal_average_monte_carlo", std::abs(mc.mean - exact) / std::abs(exact), 5e-4, false, detail};
        c.pass = c.max_deviation < c.tolerance;
        report.checks.push_back(c);
    }
    {
        const auto m = MaterialParams::gaas_default();
        const auto md = discretize_modes(m, 2000, 2.0 * m.cutoff_frequency());
        OracleCheck c{"discretized_gamma_vs_quadrature", 0.0, 1e-3, false,
                      "M = 2000 on (0, 2 omega_l], tau in {0.1,0.5,1,2,5} ps, T in {0.4,4,40} K"};
        for (double t : {0.4, 4.0, 40.0})
            for (double tau : {0.1e-12, 0.5e-12, 1e-12, 2e-12, 5e-12}) {
                const cplx q = kernel_value(tau, m, ThermalEnv{t});
                c.max_deviation = std::max(c.max_deviation, std::abs(discretized_gamma(md, ThermalEnv{t}, tau) - q) / std::abs(q));
            }
        c.pass = c.max_deviation < c.tolerance;
        report.checks.push_back(c);
    }
    return report;
}

OracleReport run_oracle(std::uint64_t seed, const fs::path& report_path) {
    OracleReport report = compute_oracle(seed);
    if (report_path.has_parent_path()) ensure_dir(report_path.parent_path());
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"max_deviation", c.max_deviation},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"detail", c.detail}});
    write_json(report_path, {{"seed", report.seed}, {"pass", report.pass()}, {"checks", checks}});
    return report;
}

}  // namespace simqd
