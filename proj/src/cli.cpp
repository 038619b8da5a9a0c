#include "adelic/cli.hpp"

#include "adelic/adele.hpp"
#include "adelic/cauchy.hpp"
#include "adelic/errors.hpp"
#include "adelic/heatkernel.hpp"
#include "adelic/markov.hpp"
#include "adelic/radial.hpp"
#include "adelic/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace adelic {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Radius parse_radius(const std::string& text) {
    if (text == "0") return std::nullopt;
    return PrimePower::parse(text);
}

std::string radius_string(const Radius& r) { return r ? r->value_string() : "0"; }

/// What a command produced: the primary text and metadata for the sidecar.
struct Output {
    std::string text;
    json meta = json::object();
};

/// Named numbers as a CSV header + row or a JSON object.
Output numbers(const std::string& format, const std::vector<std::pair<std::string, double>>& fields) {
    Output o;
    if (format == "json") {
        json j = json::object();
        for (const auto& [k, v] : fields) j[k] = v;
        o.text = j.dump(2) + "\n";
    } else {
        std::string head, row;
        for (const auto& [k, v] : fields) {
            head += (head.empty() ? "" : ",") + k;
            row += (row.empty() ? "" : ",") + num(v);
        }
        o.text = head + "\n" + row + "\n";
    }
    for (const auto& [k, v] : fields) {
        if (k == "error_bound") o.meta["error_bound"] = v;
    }
    return o;
}

json certified_json(const Radius& r, const Certified& c) {
    return {{"radius", radius_string(r)}, {"re", c.value.real()}, {"im", c.value.imag()}, {"error_bound", c.error_bound}};
}

std::vector<Radius> default_sample_radii(const RadialStep& f) {
    std::vector<Radius> rs{std::nullopt, f.inner_radius};
    for (const auto& [s, v] : f.values) rs.emplace_back(s);
    rs.emplace_back(next_pp(f.support_radius));
    return rs;
}

std::vector<Radius> parse_radii(const std::vector<std::string>& items) {
    std::vector<Radius> out;
    for (const auto& s : items) out.push_back(parse_radius(s));
    return out;
}

Output solution_output(const RadialSolution& u, double t, const std::vector<Radius>& radii) {
    json j;
    j["t"] = t;
    j["exact"] = u.exact();
    j["solution"] = u.exact() ? to_json(*u.value) : json(nullptr);
    json samples = json::array();
    double worst = 0;
    for (const auto& r : radii) {
        const Certified c = u.at(r);
        worst = std::max(worst, c.error_bound);
        samples.push_back(certified_json(r, c));
    }
    j["samples"] = samples;
    Output o;
    o.text = j.dump(2) + "\n";
    o.meta["error_bound"] = worst;
    return o;
}

ForcingGrid forcing_from_json(const json& j) {
    ForcingGrid g;
    for (const auto& t : j.at("times")) g.times.push_back(t.get<double>());
    for (const auto& v : j.at("values")) g.values.push_back(radial_step_from_json(v));
    return g;
}

KernelParams kernel_params(double t, double alpha, const std::optional<double>& beta) {
    KernelParams p{t, alpha, beta};
    p.validate();
    return p;
}

// Options from a JSON config file become trailing "--key value" tokens for
// every key not already present on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", e.what());
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--config", e.what());
    }
    if (!cfg.is_object()) throw CLI::ValidationError("--config", "config file must hold a JSON object");
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        }
        return false;
    };
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) return num(v.get<double>());
        return v.dump();
    };
    for (const auto& [key, value] : cfg.items()) {
        if (given(key)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_array()) {
            args.push_back("--" + key);
            for (const auto& v : value) args.push_back(scalar(v));
        } else {
            args.push_back("--" + key);
            args.push_back(scalar(value));
        }
    }
    return args;
}

json echo_config(const CLI::App* app) {
    json cfg = json::object();
    for (const auto* sub = app; sub; sub = sub->get_subcommands().empty() ? nullptr : sub->get_subcommands().front()) {
        for (const CLI::Option* opt : sub->get_options()) {
            if (opt->count() == 0 || opt->get_name() == "--help" || opt->get_name() == "--config") continue;
            std::string name = opt->get_name();
            while (!name.empty() && name.front() == '-') name.erase(name.begin());
            const auto& res = opt->results();
            if (res.size() == 1) {
                cfg[name] = res.front();
            } else {
                cfg[name] = res;
            }
        }
        if (sub != app) cfg["command"].push_back(sub->get_name());
    }
    return cfg;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adelic analysis toolkit: metric, radial Fourier transforms, heat kernels, jump processes, solvers",
                 "adelic"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format = "csv";
    int threads = 0;
    app.add_option("--config", config_path, "JSON file with default option values");
    app.add_option("--out", out_path, "Write the primary output here (plus <out>.meta.json)");
    app.add_option("--format", format, "Numeric output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "OpenMP threads (default: ADELIC_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    std::function<Output()> action;
    std::optional<std::uint64_t> seed_used;

    // phi
    std::string phi_arg;
    auto* phi_cmd = app.add_subcommand("phi", "Exact Phi(x) for rational x > 0");
    phi_cmd->add_option("x", phi_arg, "Rational, decimal or p^k")->required();
    phi_cmd->callback([&] {
        action = [&] { return Output{phi(parse_rational(phi_arg)).get_str() + "\n"}; };
    });

    // ppow
    std::string pp_a, pp_b;
    auto* ppow = app.add_subcommand("ppow", "Prime-power order: next, prev, range");
    ppow->require_subcommand(1);
    auto* pp_next = ppow->add_subcommand("next", "Smallest prime power > x");
    pp_next->add_option("x", pp_a)->required();
    pp_next->callback([&] { action = [&] { return Output{next_pp(parse_rational(pp_a)).value_string() + "\n"}; }; });
    auto* pp_prev = ppow->add_subcommand("prev", "Largest prime power < x");
    pp_prev->add_option("x", pp_a)->required();
    pp_prev->callback([&] { action = [&] { return Output{prev_pp(parse_rational(pp_a)).value_string() + "\n"}; }; });
    auto* pp_rng = ppow->add_subcommand("range", "Prime powers in (a, b]");
    pp_rng->add_option("a", pp_a)->required();
    pp_rng->add_option("b", pp_b)->required();
    pp_rng->callback([&] {
        action = [&] {
            Output o;
            for (const auto& q : pp_range(parse_rational(pp_a), parse_rational(pp_b))) o.text += q.value_string() + "\n";
            return o;
        };
    });

    // norm
    std::string norm_x, norm_y;
    auto* norm_cmd = app.add_subcommand("norm", "Adelic norm ||x||, or the distance ||x - y||");
    norm_cmd->add_option("x", norm_x, "Point in p:v:digits;... form")->required();
    norm_cmd->add_option("y", norm_y, "Second point");
    int depth = kDefaultDepth;
    norm_cmd->add_option("--depth", depth, "Digits parsed per component")->check(CLI::PositiveNumber);
    norm_cmd->callback([&] {
        action = [&] {
            const AdelePoint x = AdelePoint::parse(norm_x, depth);
            const Radius r = norm_y.empty() ? norm(x) : distance(x, AdelePoint::parse(norm_y, depth));
            return Output{radius_string(r) + "\n"};
        };
    });

    // volume
    std::string vol_kind, vol_r;
    auto* vol_cmd = app.add_subcommand("volume", "Haar volume of a ball or sphere");
    vol_cmd->add_option("kind", vol_kind)->required()->check(CLI::IsMember({"ball", "sphere"}));
    vol_cmd->add_option("radius", vol_r)->required();
    vol_cmd->callback([&] {
        action = [&] {
            const PrimePower r = PrimePower::parse(vol_r);
            return Output{(vol_kind == "ball" ? ball_volume(r) : sphere_volume(r)).get_str() + "\n"};
        };
    });

    // ft
    std::string ft_in;
    auto* ft_cmd = app.add_subcommand("ft", "Exact radial Fourier transform of a step function (JSON)");
    ft_cmd->add_option("--in", ft_in, "RadialStep JSON")->required()->check(CLI::ExistingFile);
    ft_cmd->callback([&] {
        action = [&] {
            const RadialStep f = radial_step_from_json(json::parse(read_file(ft_in)));
            Output o{to_json(ft_radial_step(f)).dump(2) + "\n"};
            o.meta["error_bound"] = 0.0;
            return o;
        };
    });

    // kernel
    double t = 1, alpha = 2, tol = 1e-10, x_real = 0;
    std::optional<double> beta;
    std::string radius_arg = "0", eps_arg;
    auto add_kernel_opts = [&](CLI::App* c) {
        c->add_option("--t", t, "Time t > 0");
        c->add_option("--alpha", alpha, "Finite-adele exponent alpha > 1");
        c->add_option("--tol", tol, "Absolute tolerance")->check(CLI::PositiveNumber);
    };
    auto* kernel = app.add_subcommand("kernel", "Heat kernel evaluation, normalization and tails");
    kernel->require_subcommand(1);
    auto* k_eval = kernel->add_subcommand("eval", "Z(x, t) at ||x|| = radius (times Z(x_inf, t; beta) with --beta)");
    add_kernel_opts(k_eval);
    k_eval->add_option("--radius", radius_arg, "Norm of x_f (0 or a prime power)");
    k_eval->add_option("--beta", beta, "Real exponent in (0, 2]");
    k_eval->add_option("--x-real", x_real, "Real coordinate (with --beta)");
    k_eval->callback([&] {
        action = [&] {
            const KernelParams p = kernel_params(t, alpha, beta);
            const Radius r = parse_radius(radius_arg);
            const KernelValue v = beta ? z_adelic(x_real, r, p, tol) : z_finite(r, p, tol);
            return numbers(format, {{"value", static_cast<double>(v.value)}, {"error_bound", v.error_bound}});
        };
    });
    auto* k_norm = kernel->add_subcommand("normalize", "Total mass of Z(., t); equals 1");
    add_kernel_opts(k_norm);
    k_norm->callback([&] {
        action = [&] {
            const NormalizationResult n = normalization(kernel_params(t, alpha, std::nullopt), tol);
            return numbers(format, {{"value", static_cast<double>(n.value)},
                                    {"error_bound", n.error_bound},
                                    {"radii", static_cast<double>(n.radii)}});
        };
    });
    auto* k_tail = kernel->add_subcommand("tail", "Mass outside B_eps and its explicit bound 2t sum q^-alpha");
    add_kernel_opts(k_tail);
    k_tail->add_option("--eps", eps_arg, "Prime power eps")->required();
    k_tail->callback([&] {
        action = [&] {
            const KernelParams p = kernel_params(t, alpha, std::nullopt);
            const PrimePower eps = PrimePower::parse(eps_arg);
            const NormalizationResult m = tail_mass(eps, p, tol);
            const TailBound b = tail_mass_bound(eps, p);
            return numbers(format,
                           {{"tail", static_cast<double>(m.value)}, {"error_bound", m.error_bound}, {"bound", b.bound}});
        };
    });

    // simulate
    double dt = 0.1;
    std::size_t steps = 100;
    std::uint64_t seed = 1;
    std::string r_min_arg, r_max_arg, start_arg;
    std::uint64_t cutoff = 0;
    double real_start = 0;
    auto* sim = app.add_subcommand("simulate", "Sample a path of the jump process (CSV)");
    sim->add_option("--t-step", dt, "Time step")->check(CLI::PositiveNumber);
    sim->add_option("--steps", steps, "Number of increments");
    sim->add_option("--alpha", alpha, "Exponent alpha > 1");
    sim->add_option("--beta", beta, "Real exponent (1 or 2) for a real coordinate");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--r-min", r_min_arg, "Smallest increment radius (default: from the mass bound)");
    sim->add_option("--r-max", r_max_arg, "Largest increment radius (default: from the mass bound)");
    sim->add_option("--cutoff", cutoff, "Primes <= cutoff always get a Z_p coordinate");
    sim->add_option("--depth", depth, "p-adic digits per coordinate")->check(CLI::PositiveNumber);
    sim->add_option("--start", start_arg, "Start point");
    sim->add_option("--real-start", real_start, "Start of the real coordinate");
    sim->callback([&] {
        action = [&] {
            KernelParams p = kernel_params(dt, alpha, beta);
            Truncation tr = default_truncation(p);
            if (!r_min_arg.empty()) tr.r_min = PrimePower::parse(r_min_arg);
            if (!r_max_arg.empty()) tr.r_max = PrimePower::parse(r_max_arg);
            if (cutoff) tr.prime_cutoff = cutoff;
            tr.depth = depth;
            const AdelePoint start = start_arg.empty() ? AdelePoint{} : AdelePoint::parse(start_arg, depth);
            const PathSample path = sample_path(p, steps, dt, tr, seed, start, real_start);
            seed_used = seed;
            Output o{path_csv(path)};
            o.meta["tail_resamples"] = path.tail_resamples;
            o.meta["cancellation_resamples"] = path.cancellation_resamples;
            o.meta["truncation"] = {{"r_min", tr.r_min.to_string()},
                                    {"r_max", tr.r_max.to_string()},
                                    {"prime_cutoff", tr.prime_cutoff},
                                    {"depth", tr.depth}};
            o.meta["error_bound"] = radius_distribution(p, tr.r_min, tr.r_max).tail_bound;
            return o;
        };
    });

    // transition
    std::string tr_x, tr_center = "0";
    auto* trans = app.add_subcommand("transition", "P(t, x, B_eps(center))");
    add_kernel_opts(trans);
    trans->add_option("--x", tr_x, "Start point")->required();
    trans->add_option("--center", tr_center, "Ball center");
    trans->add_option("--eps", eps_arg, "Ball radius (prime power)")->required();
    trans->add_option("--depth", depth, "Digits parsed per component")->check(CLI::PositiveNumber);
    trans->callback([&] {
        action = [&] {
            KernelParams p{t, alpha, std::nullopt};
            if (t != 0) p.validate();
            const TransitionResult r = transition_prob_ball(p, AdelePoint::parse(tr_x, depth),
                                                            AdelePoint::parse(tr_center, depth),
                                                            PrimePower::parse(eps_arg), tol);
            return numbers(format, {{"value", r.value}, {"error_bound", r.error_bound}});
        };
    });

    // solve
    std::string u0_in, forcing_in, real_in, real_out, decay = "rapid", rule = "simpson";
    std::vector<std::string> radii_args;
    bool strict = false;
    std::size_t intervals = 64;
    auto* solve = app.add_subcommand("solve", "Cauchy problems du/dt + D^alpha u = f");
    solve->require_subcommand(1);
    auto add_solve_opts = [&](CLI::App* c) {
        add_kernel_opts(c);
        c->add_option("--radii", radii_args, "Sample radii (0 or prime powers)");
    };
    auto* s_hom = solve->add_subcommand("homogeneous", "u(t) = Z_t * u0 for a step u0 (JSON)");
    add_solve_opts(s_hom);
    s_hom->add_option("--in", u0_in, "u0 as RadialStep JSON")->required()->check(CLI::ExistingFile);
    s_hom->add_flag("--strict", strict, "Fail unless the exact path applies");
    s_hom->callback([&] {
        action = [&] {
            const RadialStep u0 = radial_step_from_json(json::parse(read_file(u0_in)));
            const RadialSolution u = solve_homogeneous(u0, t, SymbolSpec{alpha, std::nullopt}, tol, strict);
            return solution_output(u, t, radii_args.empty() ? default_sample_radii(u0) : parse_radii(radii_args));
        };
    });
    auto* s_duh = solve->add_subcommand("duhamel", "Forced problem by the Duhamel formula");
    add_solve_opts(s_duh);
    s_duh->add_option("--in", u0_in, "u0 as RadialStep JSON (default 0)")->check(CLI::ExistingFile);
    s_duh->add_option("--forcing", forcing_in, "{\"times\": [...], \"values\": [RadialStep, ...]}")
        ->required()
        ->check(CLI::ExistingFile);
    s_duh->add_option("--rule", rule, "Time quadrature")->check(CLI::IsMember({"simpson", "trapezoid"}));
    s_duh->add_option("--intervals", intervals, "Quadrature panels over [0, t]");
    s_duh->callback([&] {
        action = [&] {
            const RadialStep u0 = u0_in.empty() ? zero_step() : radial_step_from_json(json::parse(read_file(u0_in)));
            const ForcingGrid f = forcing_from_json(json::parse(read_file(forcing_in)));
            DuhamelOptions opts{rule == "simpson" ? Quadrature::Simpson : Quadrature::Trapezoid, intervals, tol};
            const RadialSolution u = solve_nonhomogeneous(u0, f, t, SymbolSpec{alpha, std::nullopt}, opts);
            std::vector<Radius> radii = parse_radii(radii_args);
            if (radii.empty()) radii = default_sample_radii(f.values.front());
            return solution_output(u, t, radii);
        };
    });
    auto* s_ad = solve->add_subcommand("adelic", "Factorized problem on R x A_f");
    add_solve_opts(s_ad);
    s_ad->add_option("--beta", beta, "Real exponent in (0, 2]")->required();
    s_ad->add_option("--in", u0_in, "Finite factor as RadialStep JSON")->required()->check(CLI::ExistingFile);
    s_ad->add_option("--real", real_in, "Real factor as CSV x,value on a uniform grid")
        ->required()
        ->check(CLI::ExistingFile);
    s_ad->add_option("--decay", decay, "Real factor outside the window")->check(CLI::IsMember({"rapid", "compact"}));
    s_ad->add_option("--real-out", real_out, "Where to write the real factor CSV")->required();
    s_ad->callback([&] {
        action = [&] {
            const RadialStep u0 = radial_step_from_json(json::parse(read_file(u0_in)));
            const RealGrid g = real_grid_from_csv(read_file(real_in), decay == "rapid" ? Decay::Rapid : Decay::Compact);
            const AdelicSolution s = solve_adelic(g, u0, t, SymbolSpec{alpha, beta}, tol);
            write_file(real_out, real_grid_csv(s.real.grid));
            Output o = solution_output(s.finite, t,
                                       radii_args.empty() ? default_sample_radii(u0) : parse_radii(radii_args));
            o.meta["real_refinement_change"] = s.real.refinement_change;
            o.meta["real_window_change"] = s.real.window_change;
            return o;
        };
    });

    // verify
    std::string suite = "all";
    VerifyOptions vopts;
    auto* ver = app.add_subcommand("verify", "Run an acceptance suite");
    ver->add_option("suite", suite, "Suite name or 'all'")->check(CLI::IsMember(suite_names()));
    ver->add_option("--seed", vopts.seed, "Master seed for Monte Carlo checks");
    ver->add_option("--samples", vopts.samples, "Monte Carlo sample count");
    int verify_status = 0;
    ver->callback([&] {
        action = [&] {
            Output o;
            for (const auto& r : run_suite(suite, vopts)) {
                o.text += format_result(r) + "\n";
                if (!r.passed) verify_status = kExitFailure;
            }
            seed_used = vopts.seed;
            return o;
        };
    });

    const char* env = std::getenv("ADELIC_THREADS");
    try {
        const std::vector<std::string> args = expand_config(raw_args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (threads > 0) {
            omp_set_num_threads(threads);
        } else if (env && std::atoi(env) > 0) {
            omp_set_num_threads(std::atoi(env));
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        Output o = action();
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (out_path.empty()) {
            out << o.text;
        } else {
            write_file(out_path, o.text);
            json meta = o.meta;
            meta["config"] = echo_config(&app);
            meta["seed"] = seed_used ? json(*seed_used) : json(nullptr);
            meta["wall_time_s"] = wall;
            meta["threads"] = omp_get_max_threads();
            write_file(out_path + ".meta.json", meta.dump(2) + "\n");
        }
        return verify_status;
    } catch (const IndeterminateCancellation& e) {
        err << "cancellation: " << e.what() << "\n";
        return kExitCancellation;
    } catch (const ToleranceError& e) {
        err << "tolerance: " << e.what() << "\n";
        return kExitTolerance;
    } catch (const std::invalid_argument& e) {
        err << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace adelic
