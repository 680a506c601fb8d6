#include "pcube/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pcube/cube.hpp"
#include "pcube/hyper.hpp"
#include "pcube/influence.hpp"
#include "pcube/invariance.hpp"
#include "pcube/io.hpp"
#include "pcube/noise.hpp"
#include "pcube/product.hpp"
#include "pcube/stability.hpp"
#include "pcube/threshold.hpp"
#include "pcube/zoo.hpp"

namespace pcube::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return csv_escape(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return fmt17(v.get<double>());
    if (v.is_number()) return v.dump();
    return csv_escape(v.dump());
}

struct Report {
    std::string subcommand;
    std::vector<std::string> columns;
    std::vector<ordered_json> rows;
    ordered_json summary = ordered_json::object();
    bool any_fail = false;

    void add(ordered_json row) {
        if (row.contains("pass") && row["pass"].is_boolean() && !row["pass"].get<bool>())
            any_fail = true;
        rows.push_back(std::move(row));
    }
};

const std::vector<std::string> verdict_columns = {"instance", "theorem", "params",
                                                  "lhs",      "rhs",     "margin", "pass"};

ordered_json verdict(const std::string& instance, const std::string& theorem, ordered_json params,
                     double lhs, double rhs, double margin, bool pass) {
    ordered_json r;
    r["instance"] = instance;
    r["theorem"] = theorem;
    r["params"] = std::move(params);
    r["lhs"] = lhs;
    r["rhs"] = rhs;
    r["margin"] = margin;
    r["pass"] = pass;
    return r;
}

void emit(const Report& rep, const std::string& format, std::ostream& out) {
    if (format == "json") {
        ordered_json doc;
        doc["schema"] = 1;
        doc["subcommand"] = rep.subcommand;
        if (!rep.summary.empty()) doc["summary"] = rep.summary;
        doc["rows"] = rep.rows;
        out << doc.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
        out << (i ? "," : "") << rep.columns[i];
    out << '\n';
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < rep.columns.size(); ++i) {
            if (i) out << ',';
            auto it = row.find(rep.columns[i]);
            if (it != row.end()) out << csv_cell(*it);
        }
        out << '\n';
    }
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

bool ok(double margin, double scale, double tol) {
    return margin >= -tol * std::max(1.0, std::abs(scale));
}

bool eq_ok(double diff, double scale, double tol) {
    return std::abs(diff) <= tol * std::max(1.0, std::abs(scale));
}

std::map<std::string, int> spec_int_params(const std::string& spec) {
    std::map<std::string, int> out;
    auto colon = spec.find(':');
    if (colon == std::string::npos) return out;
    std::string rest = spec.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
        auto comma = rest.find(',', pos);
        std::string item =
            rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto eq = item.find('=');
        if (eq != std::string::npos) {
            try {
                out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
            } catch (const std::exception&) {
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int infer_dimension(const std::string& spec, int explicit_n) {
    if (explicit_n >= 0) return explicit_n;
    std::string name = spec.substr(0, spec.find(':'));
    if (name == "tribes" || name == "antitribes" || name == "antitribes_pinned") {
        auto ps = spec_int_params(spec);
        if (ps.count("s") && ps.count("w")) {
            int n = ps["s"] * ps["w"];
            if (name == "antitribes_pinned") n += ps.count("t") ? ps["t"] : 0;
            return n;
        }
    }
    return 4;
}

struct Source {
    std::string fn;
    std::string table;
    int n = -1;

    std::string id() const { return !fn.empty() ? fn : "table:" + table; }

    CubeFunction load(double p) const {
        if (fn.empty() == table.empty())
            throw std::invalid_argument("need exactly one of --fn or --table");
        if (!table.empty()) return read_truth_table_file(table);
        return generate(BiasedCube::make(infer_dimension(fn, n), p), fn);
    }
};

}  // namespace

const std::vector<CheckerInfo>& checker_registry() {
    static const std::vector<CheckerInfo> registry = {
        {"hyper.fourth_moment", "hyper", "check-hyper"},
        {"hyper.smoothing", "hyper", "check-hyper"},
        {"hyper.practice", "hyper", "check-hyper"},
        {"hyper.qnorm", "hyper", "check-hyper"},
        {"hyper.replacement", "hyper", "check-hyper"},
        {"noise.sensitivity", "noise", "stability"},
        {"stability.warmup", "stability", "stability"},
        {"stability.concentration", "stability", "stability"},
        {"stability.truncated_norm", "stability", "stability"},
        {"stability.expectation_search", "stability", "isoperimetry"},
        {"stability.influence_search", "stability", "isoperimetry"},
        {"stability.sharpness_table", "stability", "isoperimetry"},
        {"threshold.russo", "threshold", "threshold"},
        {"threshold.global_certificate", "threshold", "threshold"},
        {"threshold.sharp", "threshold", "threshold"},
        {"threshold.noise_route", "threshold", "threshold"},
        {"threshold.two_bias", "threshold", "threshold"},
        {"product.es_moment", "product", "product"},
        {"product.holder", "product", "product"},
        {"invariance.bound", "invariance", "invariance"},
    };
    return registry;
}

namespace {

int run_impl(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    if (const char* cap = std::getenv("PCUBE_NCAP")) {
        try {
            set_dimension_cap(std::stoi(cap));
        } catch (const std::exception&) {
            err << "error: PCUBE_NCAP must be an integer, got '" << cap << "'\n";
            return 2;
        }
    }

    CLI::App app{"Exact computations and inequality checks on the biased cube"};
    app.name("pcube");

    double tolerance = 1e-10;
    std::uint64_t seed = 1;
    std::string format = "json";
    bool timings = false;
    app.add_option("--tolerance", tolerance, "relative tolerance for pass/fail margins");
    app.add_option("--seed", seed, "seed for randomized paths");
    app.add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timings", timings, "attach runtime_ms to rows (breaks byte determinism)");

    Source src;
    double p = 0.25;
    auto add_source = [&](CLI::App* sub, bool with_p = true) {
        sub->add_option("--fn", src.fn, "generator spec, e.g. antitribes:s=2,w=3");
        sub->add_option("--table", src.table, "truth-table file");
        sub->add_option("--n", src.n, "dimension for --fn when not implied");
        if (with_p) sub->add_option("--p", p, "bias for building the function");
    };

    std::function<void(Report&)> action;

    // transform ------------------------------------------------------------
    auto* sub_transform = app.add_subcommand("transform", "character expansion of a function");
    add_source(sub_transform);
    sub_transform->callback([&] {
        action = [&](Report& rep) {
            CubeFunction f = src.load(p);
            SpectralForm F = forward_transform(f);
            rep.columns = {"set", "coefficient"};
            for (mask_t S = 0; S < F.coeffs.size(); ++S) {
                ordered_json row;
                row["set"] = S;
                row["coefficient"] = F.coeffs[S];
                rep.add(std::move(row));
            }
            rep.summary["instance"] = src.id();
            rep.summary["n"] = f.cube.n;
            rep.summary["p"] = f.cube.p;
            rep.summary["mean"] = F.coeffs.empty() ? 0.0 : F.coeffs[0];
            rep.summary["energy"] = F.energy();
            rep.summary["degree"] = F.degree(1e-12);
        };
    });

    // influences -----------------------------------------------------------
    int infl_r = 2;
    auto* sub_infl = app.add_subcommand("influences", "generalized influence table");
    add_source(sub_infl);
    sub_infl->add_option("--r", infl_r, "max set size to materialize (-1 for all)");
    sub_infl->callback([&] {
        action = [&](Report& rep) {
            CubeFunction f = src.load(p);
            auto table = influence_table(f, infl_r);
            rep.columns = {"set", "influence"};
            for (const auto& [S, v] : table.entries) {
                ordered_json row;
                row["set"] = S;
                row["influence"] = v;
                rep.add(std::move(row));
            }
            rep.summary["instance"] = src.id();
            rep.summary["total_influence"] = total_influence(f);
            if (f.is_boolean()) rep.summary["flip_total_influence"] = flip_total_influence(f);
            rep.summary["max_nonempty"] = table.max_influence(true);
            if (moment(f, 2) > 0.0) rep.summary["beta"] = beta_small_check(f, infl_r);
        };
    });

    // stability ------------------------------------------------------------
    std::string stab_check = "warmup";
    int stab_r = 2;
    double stab_delta = std::nan("");
    double stab_rho = 0.5;
    double stab_eps = 0.1;
    auto* sub_stab = app.add_subcommand("stability", "spectral concentration checks");
    add_source(sub_stab);
    sub_stab->add_option("--check", stab_check, "warmup | concentration | truncated_norm | sensitivity")
        ->check(CLI::IsMember({"warmup", "concentration", "truncated_norm", "sensitivity"}));
    sub_stab->add_option("--r", stab_r, "degree cutoff");
    sub_stab->add_option("--delta", stab_delta, "globalness / influence budget");
    sub_stab->add_option("--rho", stab_rho, "noise rate (sensitivity)");
    sub_stab->add_option("--eps", stab_eps, "target stability fraction (sensitivity)");
    sub_stab->callback([&] {
        action = [&](Report& rep) {
            CubeFunction f = src.load(p);
            rep.columns = verdict_columns;
            Timer timer;
            if (stab_check == "warmup") {
                WarmupReport w = warmup_check(f, stab_r);
                ordered_json params{{"r", w.r}, {"p", f.cube.p}};
                auto row = verdict(src.id(), "stability.warmup", params, w.lhs, w.rhs, w.margin,
                                   ok(w.margin, w.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (stab_check == "concentration") {
                double delta = std::isnan(stab_delta) ? 0.1 : stab_delta;
                ConcentrationReport c = concentration_check(f, stab_r, delta);
                ordered_json p1{{"r", c.r}, {"variant", "influence"}, {"delta0", c.delta0}};
                auto row1 = verdict(src.id(), "stability.concentration", p1, c.low_mass,
                                    c.bound_influence, c.bound_influence - c.low_mass,
                                    ok(c.bound_influence - c.low_mass, c.bound_influence, tolerance));
                ordered_json p2{{"r", c.r},
                                {"variant", "global"},
                                {"delta", c.delta},
                                {"hyp_global", c.hyp_global},
                                {"hyp_sparse", c.hyp_sparse},
                                {"hypotheses_met", c.hyp_met}};
                bool pass2 = !c.hyp_met || ok(c.bound_global - c.low_mass, c.bound_global, tolerance);
                auto row2 = verdict(src.id(), "stability.concentration", p2, c.low_mass,
                                    c.bound_global, c.bound_global - c.low_mass, pass2);
                if (timings) {
                    row1["runtime_ms"] = timer.ms();
                    row2["runtime_ms"] = timer.ms();
                }
                rep.add(std::move(row1));
                rep.add(std::move(row2));
            } else if (stab_check == "truncated_norm") {
                double delta = stab_delta;
                if (std::isnan(delta)) {
                    CubeFunction g = low_degree_part(f, stab_r);
                    delta = influence_table(g, stab_r).max_influence(true);
                }
                NormTruncateReport t = normtruncate_check(f, stab_r, delta);
                ordered_json params{{"r", t.r}, {"delta", t.delta}};
                auto row = verdict(src.id(), "stability.truncated_norm", params, t.lhs, t.rhs,
                                   t.margin, ok(t.margin, t.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else {
                NoiseSensitivityReport s = noise_sensitivity_check(f, stab_rho, stab_eps);
                ordered_json params{{"rho", s.rho},       {"eps", s.eps},
                                    {"r", s.r},           {"delta", s.delta},
                                    {"mu", s.mu},         {"hyp_global", s.hypothesis_global},
                                    {"hyp_sparse", s.hypothesis_sparse},
                                    {"hypotheses_met", s.hypotheses_met}};
                bool pass = !s.hypotheses_met || ok(s.bound - s.stab, s.bound, tolerance);
                auto row = verdict(src.id(), "noise.sensitivity", params, s.stab, s.bound,
                                   s.bound - s.stab, pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            }
        };
    });

    // check-hyper ----------------------------------------------------------
    std::string hyper_theorem;
    double hyper_rho = std::nan("");
    double hyper_delta = std::nan("");
    int hyper_q = 4;
    auto* sub_hyper = app.add_subcommand("check-hyper", "moment smoothing bounds");
    add_source(sub_hyper);
    sub_hyper
        ->add_option("--theorem", hyper_theorem,
                     "fourth_moment | smoothing | practice | qnorm | replacement")
        ->required();
    sub_hyper->add_option("--rho", hyper_rho, "noise rate");
    sub_hyper->add_option("--delta", hyper_delta, "influence budget (practice)");
    sub_hyper->add_option("--q", hyper_q, "moment order (qnorm: 4, 6, or 8)");
    sub_hyper->callback([&] {
        action = [&](Report& rep) {
            static const std::map<std::string, std::string> alias = {
                {"4", "fourth_moment"}, {"fourth_moment", "fourth_moment"},
                {"13", "smoothing"},    {"smoothing", "smoothing"},
                {"practice", "practice"},
                {"qnorm", "qnorm"},
                {"31", "replacement"},  {"replacement", "replacement"},
            };
            auto it = alias.find(hyper_theorem);
            if (it == alias.end())
                throw std::invalid_argument("unknown --theorem '" + hyper_theorem + "'");
            const std::string which = it->second;
            CubeFunction f = src.load(p);
            rep.columns = verdict_columns;
            Timer timer;
            if (which == "fourth_moment") {
                double rho = std::isnan(hyper_rho) ? 1.0 / std::sqrt(12.0) : hyper_rho;
                HyprefReport h = hypref_bound_check(f, rho);
                ordered_json params{{"rho", h.rho}, {"middle", h.middle}};
                auto row = verdict(src.id(), "hyper.fourth_moment", params, h.lhs, h.rhs,
                                   h.rhs - h.lhs, ok(h.rhs - h.lhs, h.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (which == "smoothing") {
                SmallInfluenceSmoothingReport s = small_influence_smoothing_check(f);
                ordered_json p1{{"variant", "influences"}, {"rho", 0.2}, {"beta", s.beta_influences}};
                auto row1 = verdict(src.id(), "hyper.smoothing", p1, s.lhs_fifth, s.rhs_fifth,
                                    s.rhs_fifth - s.lhs_fifth,
                                    ok(s.rhs_fifth - s.lhs_fifth, s.rhs_fifth, tolerance));
                if (timings) row1["runtime_ms"] = timer.ms();
                rep.add(std::move(row1));
                // The numeric alias asks for the stated inequality only; the
                // descriptive name also reports the tighter derivative form.
                if (hyper_theorem != "13") {
                    ordered_json p2{{"variant", "derivatives"},
                                    {"rho", 1.0 / std::sqrt(24.0)},
                                    {"beta", s.beta_derivative}};
                    auto row2 = verdict(src.id(), "hyper.smoothing", p2, s.lhs_root24, s.rhs_root24,
                                        s.rhs_root24 - s.lhs_root24,
                                        ok(s.rhs_root24 - s.lhs_root24, s.rhs_root24, tolerance));
                    if (timings) row2["runtime_ms"] = timer.ms();
                    rep.add(std::move(row2));
                }
            } else if (which == "practice") {
                double delta = hyper_delta;
                if (std::isnan(delta)) {
                    int deg = std::max(forward_transform(f).degree(1e-12), 0);
                    delta = influence_table(f, deg).max_influence(false);
                }
                PracticeReport pr = practice_bound_check(f, delta);
                ordered_json params{{"r", pr.r}, {"delta", pr.delta}};
                auto row = verdict(src.id(), "hyper.practice", params, pr.lhs, pr.rhs,
                                   pr.rhs - pr.lhs, ok(pr.rhs - pr.lhs, pr.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (which == "qnorm") {
                double rho = std::isnan(hyper_rho) ? std::pow(2.0 * hyper_q, -1.5) : hyper_rho;
                QNormReport qr =
                    qnorm_bound_check(f, hyper_q, rho, MomentEnvelope::uniform_cube(f.cube, hyper_q));
                ordered_json params{{"q", qr.q}, {"rho", qr.rho}};
                auto row = verdict(src.id(), "hyper.qnorm", params, qr.lhs, qr.rhs, qr.rhs - qr.lhs,
                                   ok(qr.rhs - qr.lhs, qr.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else {
                double rho = std::isnan(hyper_rho) ? 0.2 : hyper_rho;
                SpectralForm F = forward_transform(f);
                for (int t = 1; t <= f.cube.n; ++t) {
                    Timer step;
                    double slack = replacement_step_slack(F, t, rho);
                    ordered_json params{{"t", t}, {"rho", rho}};
                    auto row = verdict(src.id(), "hyper.replacement", params, 0.0, slack, slack,
                                       ok(slack, 1.0, tolerance));
                    if (timings) row["runtime_ms"] = step.ms();
                    rep.add(std::move(row));
                }
            }
        };
    });

    // isoperimetry ---------------------------------------------------------
    std::string iso_check = "expectation_search";
    double iso_K = std::nan("");
    double iso_C = 1.0;
    int iso_s = 0, iso_w = 0, iso_t = 0;
    auto* sub_iso = app.add_subcommand("isoperimetry", "witness searches and sharpness tables");
    add_source(sub_iso);
    sub_iso->add_option("--check", iso_check, "expectation_search | influence_search | sharpness")
        ->check(CLI::IsMember({"expectation_search", "influence_search", "sharpness"}));
    sub_iso->add_option("--K", iso_K, "influence-to-measure ratio budget");
    sub_iso->add_option("--C", iso_C, "trial constant");
    sub_iso->add_option("--s", iso_s, "blocks (sharpness)");
    sub_iso->add_option("--w", iso_w, "block width (sharpness)");
    sub_iso->add_option("--t", iso_t, "pinned coordinates (sharpness)");
    sub_iso->callback([&] {
        action = [&](Report& rep) {
            rep.columns = verdict_columns;
            Timer timer;
            if (iso_check == "sharpness") {
                if (iso_s < 1 || iso_w < 1)
                    throw std::invalid_argument("sharpness needs --s and --w");
                BiasedCube cube = BiasedCube::make(iso_s * iso_w + iso_t, p);
                SharpnessTable table = iso_t > 0
                                           ? sharpness_table_pinned_blocks(cube, iso_s, iso_w, iso_t)
                                           : sharpness_table_blocks(cube, iso_s, iso_w);
                std::string inst = table.example + ":s=" + std::to_string(table.s) +
                                   ",w=" + std::to_string(table.w) +
                                   (iso_t > 0 ? ",t=" + std::to_string(table.pinned) : "");
                auto add_eq = [&](const char* part, double got, double want, double tol) {
                    ordered_json params{{"part", part}};
                    auto row = verdict(inst, "stability.sharpness_table", params, got, want,
                                       -std::abs(want - got), eq_ok(want - got, want, tol));
                    if (timings) row["runtime_ms"] = timer.ms();
                    rep.add(std::move(row));
                };
                add_eq("measure", table.mu_enum, table.mu_closed, tolerance);
                add_eq("influence", table.influence_enum, table.influence_closed, tolerance);
                add_eq("influence_fd", table.influence_fd, table.influence_enum,
                       std::max(tolerance, 1e-6));
                for (const auto& row : table.bump) {
                    ordered_json params{{"part", "bump"},
                                        {"t", row.t},
                                        {"ratio_bound", row.ratio_bound},
                                        {"within_ratio_bound", row.within_ratio_bound}};
                    auto jrow = verdict(inst, "stability.sharpness_table", params, row.enumerated,
                                        row.closed_form, -std::abs(row.closed_form - row.enumerated),
                                        eq_ok(row.closed_form - row.enumerated, row.closed_form,
                                              tolerance));
                    if (timings) jrow["runtime_ms"] = timer.ms();
                    rep.add(std::move(jrow));
                }
                rep.summary["K"] = table.K;
                rep.summary["mu"] = table.mu_enum;
                rep.summary["total_influence"] = table.influence_enum;
                return;
            }
            CubeFunction f = src.load(p);
            double mu = mu_measure(f);
            double infl = total_influence_at(f, f.cube.p);
            if (iso_check == "expectation_search") {
                double K = iso_K;
                if (std::isnan(K)) {
                    if (!(mu > 0.0)) throw std::invalid_argument("measure is zero; pass --K");
                    K = f.cube.p * infl / mu * 1.01;
                }
                RestrictionWitness w = kahn_kalai_variant_search(f, K, iso_C);
                ordered_json params{{"K", w.K},
                                    {"C", w.C_trial},
                                    {"size_bound", w.size_bound},
                                    {"hypothesis_met", w.hypothesis_met},
                                    {"witness", w.witness},
                                    {"min_constant", w.min_constant}};
                bool pass = !w.hypothesis_met || w.pass;
                auto row = verdict(src.id(), "stability.expectation_search", params, w.threshold,
                                   w.witness_measure, w.witness_measure - w.threshold, pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else {
                double K = iso_K;
                if (std::isnan(K)) {
                    double denom = mu * (1.0 - mu);
                    if (!(denom > 0.0)) throw std::invalid_argument("degenerate measure; pass --K");
                    K = f.cube.p * infl / denom;
                }
                InfluenceWitness w = bourgain_witness_search(f, K);
                ordered_json params{{"K", w.K},
                                    {"size_bound", w.size_bound},
                                    {"hypothesis_met", w.hypothesis_met},
                                    {"witness", w.witness},
                                    {"monotone", w.monotone}};
                if (w.monotone) {
                    params["bump"] = w.bump;
                    params["bump_witness"] = w.bump_witness;
                    params["bump_size_constant"] = w.bump_size_constant;
                    params["bump_decay_constant"] = w.bump_decay_constant;
                }
                bool pass = !w.hypothesis_met || w.pass;
                auto row = verdict(src.id(), "stability.influence_search", params, w.threshold,
                                   w.witness_influence, w.witness_influence - w.threshold, pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            }
        };
    });

    // threshold ------------------------------------------------------------
    std::string thr_check = "profile";
    int thr_grid = 16;
    double thr_target = 0.5;
    double thr_p = std::nan(""), thr_q = std::nan("");
    double thr_h = 1e-4;
    double thr_eps = 0.25, thr_C = 2.0;
    int thr_M = 1;
    double thr_plo = 0.05, thr_phi = 0.95;
    double thr_build_p = 0.25;
    auto* sub_thr = app.add_subcommand("threshold", "measure-vs-bias curves and certificates");
    add_source(sub_thr, /*with_p=*/false);
    sub_thr->add_option("--build-p", thr_build_p, "bias used to build the function table");
    sub_thr->add_option("--check", thr_check,
                        "profile | location | russo | certificate | sharp | noise_route | two_bias")
        ->check(CLI::IsMember(
            {"profile", "location", "russo", "certificate", "sharp", "noise_route", "two_bias"}));
    sub_thr->add_option("--grid", thr_grid, "grid points");
    sub_thr->add_option("--target", thr_target, "measure level for location");
    sub_thr->add_option("--p", thr_p, "lower bias");
    sub_thr->add_option("--q", thr_q, "upper bias");
    sub_thr->add_option("--step", thr_h, "finite-difference step (russo)");
    sub_thr->add_option("--eps", thr_eps, "stability fraction (noise_route)");
    sub_thr->add_option("--C", thr_C, "trial constant");
    sub_thr->add_option("--M", thr_M, "restriction budget (certificate, sharp)");
    sub_thr->add_option("--p-lo", thr_plo, "low end of the certified bias range");
    sub_thr->add_option("--p-hi", thr_phi, "high end of the certified bias range");
    sub_thr->callback([&] {
        action = [&](Report& rep) {
            CubeFunction f = src.load(thr_build_p);
            Timer timer;
            double pv = std::isnan(thr_p) ? 0.1 : thr_p;
            double qv = std::isnan(thr_q) ? 0.3 : thr_q;
            if (thr_check == "profile") {
                if (thr_grid < 1) throw std::invalid_argument("--grid must be positive");
                std::vector<double> grid;
                for (int i = 1; i <= thr_grid; ++i)
                    grid.push_back(static_cast<double>(i) / (thr_grid + 1));
                ThresholdProfile prof = measure_curve(f, grid, src.id());
                rep.columns = {"p", "mu"};
                for (const auto& [pp, mm] : prof.curve) {
                    ordered_json row;
                    row["p"] = pp;
                    row["mu"] = mm;
                    rep.add(std::move(row));
                }
                rep.summary["instance"] = src.id();
                rep.summary["monotone"] = prof.monotone;
                rep.summary["crossed"] = prof.crossed;
                if (prof.crossed) rep.summary["p_c"] = prof.p_c;
                rep.summary["first_crossing_only"] = prof.first_crossing_only;
                return;
            }
            if (thr_check == "location") {
                double pc = threshold_location(f, thr_target);
                rep.columns = {"target", "p_c"};
                ordered_json row;
                row["target"] = thr_target;
                row["p_c"] = pc;
                rep.add(std::move(row));
                return;
            }
            rep.columns = verdict_columns;
            if (thr_check == "russo") {
                RussoReport r = russo_check(f, pv, thr_h);
                ordered_json params{{"p", r.p}, {"h", r.h}};
                bool pass = r.deviation <= std::max(tolerance * std::max(1.0, std::abs(r.influence)),
                                                    1e-6);
                auto row = verdict(src.id(), "threshold.russo", params, r.finite_difference,
                                   r.influence, -r.deviation, pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (thr_check == "certificate") {
                MGlobalCertificate c = m_global_certify(f, thr_M, thr_plo, thr_phi, thr_grid);
                ordered_json params{{"M", c.M},
                                    {"p_lo", c.p_lo},
                                    {"p_hi", c.p_hi},
                                    {"grid_size", static_cast<int>(c.grid.size())},
                                    {"worst_p", c.worst_p},
                                    {"worst_J", c.worst_J}};
                auto row = verdict(src.id(), "threshold.global_certificate", params, c.worst_excess,
                                   0.0, -c.worst_excess, c.pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (thr_check == "sharp") {
                SharpThresholdReport s = sharp_threshold_check(f, pv, qv, thr_M, thr_C);
                ordered_json params{{"p", s.p},
                                    {"q", s.q},
                                    {"M", s.M},
                                    {"C", s.C_trial},
                                    {"certificate_pass", s.certificate.pass},
                                    {"hyp_measure", s.hyp_measure},
                                    {"hypotheses_met", s.hypotheses_met},
                                    {"mu_p", s.mu_p},
                                    {"min_constant", s.min_constant}};
                bool pass = !s.hypotheses_met || s.conclusion_holds;
                auto row = verdict(src.id(), "threshold.sharp", params, s.rhs, s.mu_q,
                                   s.mu_q - s.rhs, pass);
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            } else if (thr_check == "noise_route") {
                NoiseRouteReport nr = noise_route_check(f, pv, qv, thr_eps, thr_C);
                ordered_json p1{{"part", "comparison"}, {"p", nr.p}, {"q", nr.q}, {"rho", nr.rho},
                                {"stab", nr.stab}};
                auto row1 = verdict(src.id(), "threshold.noise_route", p1, nr.lower_bound, nr.mu_q,
                                    nr.mu_q - nr.lower_bound,
                                    ok(nr.mu_q - nr.lower_bound, nr.mu_q, tolerance));
                ordered_json p2{{"part", "amplification"},
                                {"eps", nr.eps},
                                {"C", nr.C_trial},
                                {"r", nr.r},
                                {"delta", nr.delta},
                                {"hyp_monotone", nr.hyp_monotone},
                                {"hyp_global", nr.hyp_global},
                                {"hyp_sparse", nr.hyp_sparse},
                                {"hypotheses_met", nr.hypotheses_met}};
                bool pass2 = !nr.hypotheses_met || nr.conclusion_holds;
                auto row2 = verdict(src.id(), "threshold.noise_route", p2, nr.amplification,
                                    nr.mu_q, nr.mu_q - nr.amplification, pass2);
                if (timings) {
                    row1["runtime_ms"] = timer.ms();
                    row2["runtime_ms"] = timer.ms();
                }
                rep.add(std::move(row1));
                rep.add(std::move(row2));
            } else {  // two_bias
                double slack = two_bias_comparison_slack(f, pv, qv);
                double mu_q = measure_at(f, qv);
                ordered_json params{{"p", pv}, {"q", qv}};
                auto row = verdict(src.id(), "threshold.two_bias", params, mu_q - slack, mu_q,
                                   slack, ok(slack, mu_q, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            }
        };
    });

    // product --------------------------------------------------------------
    std::vector<std::string> prod_spaces;
    std::string prod_check = "decompose";
    int prod_q = 4;
    double prod_rho = std::nan("");
    std::string prod_deps;
    auto* sub_prod = app.add_subcommand("product", "product-space decomposition and bounds");
    sub_prod->add_option("--space", prod_spaces, "product-table file (repeat for holder)")
        ->required();
    sub_prod->add_option("--check", prod_check, "decompose | es_moment | holder")
        ->check(CLI::IsMember({"decompose", "es_moment", "holder"}));
    sub_prod->add_option("--q", prod_q, "moment order");
    sub_prod->add_option("--rho", prod_rho, "smoothing rate");
    sub_prod->add_option("--deps", prod_deps, "comma list of dependency masks (holder)");
    sub_prod->callback([&] {
        action = [&](Report& rep) {
            Timer timer;
            if (prod_check == "holder") {
                std::vector<ProductFunction> fs;
                for (const auto& path : prod_spaces) fs.push_back(read_product_table_file(path));
                std::vector<mask_t> deps;
                std::stringstream ss(prod_deps);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) deps.push_back(static_cast<mask_t>(std::stoul(item)));
                HolderTermReport h = holder_term_check(fs, deps);
                rep.columns = verdict_columns;
                ordered_json params{{"functions", static_cast<int>(fs.size())},
                                    {"single_cover", h.single_cover},
                                    {"cover_count", h.cover_count}};
                auto row = verdict("product:" + prod_spaces[0], "product.holder", params, h.lhs,
                                   h.rhs, h.rhs - h.lhs, ok(h.rhs - h.lhs, h.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
                return;
            }
            ProductFunction f = read_product_table_file(prod_spaces[0]);
            if (prod_check == "decompose") {
                ESDecomposition d = es_decompose(f);
                rep.columns = {"set", "energy"};
                double total = 0.0;
                for (mask_t S = 0; S < d.components.size(); ++S) {
                    double e = moment(es_component(d, S), 2);
                    total += e;
                    ordered_json row;
                    row["set"] = S;
                    row["energy"] = e;
                    rep.add(std::move(row));
                }
                ProductFunction back = es_reconstruct(d);
                double recon = 0.0;
                for (std::size_t i = 0; i < back.values.size(); ++i)
                    recon = std::max(recon, std::abs(back.values[i] - f.values[i]));
                rep.summary["instance"] = "product:" + prod_spaces[0];
                rep.summary["second_moment"] = moment(f, 2);
                rep.summary["component_energy_sum"] = total;
                rep.summary["reconstruction_error"] = recon;
            } else {
                double cap = 1.0 / (8.0 * std::pow(static_cast<double>(prod_q), 1.5));
                double rho = std::isnan(prod_rho) ? cap : prod_rho;
                EsMomentReport e = es_moment_check(f, prod_q, rho);
                rep.columns = verdict_columns;
                ordered_json params{{"q", e.q}, {"rho", e.rho}};
                auto row = verdict("product:" + prod_spaces[0], "product.es_moment", params, e.lhs,
                                   e.rhs, e.margin, ok(e.margin, e.rhs, tolerance));
                if (timings) row["runtime_ms"] = timer.ms();
                rep.add(std::move(row));
            }
        };
    });

    // invariance -----------------------------------------------------------
    std::string inv_poly;
    int inv_n = -1;
    std::string inv_x = "uniform", inv_y = "biased:p=0.25", inv_phi = "sigmoid";
    std::size_t inv_samples = 200000;
    auto* sub_inv = app.add_subcommand("invariance", "ensemble-exchange distribution bound");
    sub_inv->add_option("--poly", inv_poly, "polynomial file (mask coefficient lines)")->required();
    sub_inv->add_option("--n", inv_n, "variable count override");
    sub_inv->add_option("--x", inv_x, "first ensemble spec");
    sub_inv->add_option("--y", inv_y, "second ensemble spec");
    sub_inv->add_option("--phi", inv_phi, "test function spec (step | sigmoid)");
    sub_inv->add_option("--samples", inv_samples, "Monte Carlo samples");
    sub_inv->callback([&] {
        action = [&](Report& rep) {
            MultilinearPoly poly = read_poly_file(inv_poly, inv_n);
            Ensemble X = ensemble_from_spec(poly.n, inv_x);
            Ensemble Y = ensemble_from_spec(poly.n, inv_y);
            TestFunction phi = test_function_from_spec(inv_phi);
            Timer timer;
            InvarianceReport r = invariance_bound_check(poly, X, Y, phi, inv_samples, seed);
            rep.columns = verdict_columns;
            ordered_json params{{"x", inv_x},
                                {"y", inv_y},
                                {"phi", inv_phi},
                                {"degree", r.degree},
                                {"epsilon", r.epsilon},
                                {"total_weight", r.total_weight},
                                {"exact", r.exact},
                                {"samples", r.exact ? 0 : static_cast<int>(inv_samples)},
                                {"seed", seed},
                                {"rhs_stated", r.rhs_stated},
                                {"stated_pass", r.stated_pass},
                                {"vacuous", r.vacuous}};
            auto row = verdict("poly:" + inv_poly, "invariance.bound", params, r.lhs, r.rhs,
                               r.rhs - r.lhs, r.pass);
            row["mc_error"] = r.mc_error;
            if (timings) row["runtime_ms"] = timer.ms();
            rep.add(std::move(row));
        };
    });

    // zoo ------------------------------------------------------------------
    auto* sub_zoo = app.add_subcommand("zoo", "list generators and catalog instances");
    sub_zoo->callback([&] {
        action = [&](Report& rep) {
            rep.columns = {"id", "spec", "n", "monotone"};
            for (const auto& inst : zoo_catalog()) {
                ordered_json row;
                row["id"] = inst.id;
                row["spec"] = inst.spec;
                row["n"] = inst.n;
                row["monotone"] = inst.monotone;
                rep.add(std::move(row));
            }
            rep.summary["generators"] = generator_names();
        };
    });

    app.require_subcommand(1);
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    Report rep;
    rep.subcommand = app.get_subcommands().front()->get_name();
    try {
        action(rep);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    emit(rep, format, out);
    return rep.any_fail ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run_impl(args, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_impl(std::move(args), out, err);
}

}  // namespace pcube::cli
