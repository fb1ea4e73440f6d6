// charbound corollary1|propk|homgrowth --config <path> [--seed N] [--out f.csv] [--svg f.svg]
//
// Every config key is also a flag (--k_max 8, --p 1,1.5, ...); flags win
// over the file. Exit codes: 0 ok, 2 configuration error, 3 soundness
// violation detected during the run.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "charbound/charbound.hpp"

namespace lab = charbound::lab;

namespace {

constexpr const char* kColumnsHelp = R"(CSV columns
  corollary1: k seed_index p N policy lambda_size K energy sidon_energy
      sidon_verified theta raw_bound effective_bound estimate m dilated_g
      dilated_image ratio [wall_time]
    energy = E(Gamma); sidon_energy = 2n^2-n; raw_bound =
    (|Lambda|^3/(K^6 E))^((2-p)/(2p)); estimate = ascent lower estimate of
    ||T||_{p->p}; ratio = |m.G^| / |m.Im phi|.
  propk: size seed_index m policy g h gamma_size energy sidon_verified
      epsilon dilated_g dilated_image ratio exponent l1 l2sq support x_size
      mx_size mg_size cauchy_schwarz counting_bound graph_counting_bound
      plunnecke [wall_time]
    epsilon = E/|Gamma|^3; exponent = log(epsilon)/log(ratio), empty when
    ratio <= 1; the last four columns are exact integer checks (1 = holds).
  homgrowth: n seed_index policy g h surplus dom_order status s_size
      injective energy anorm norm_exact norm_lower_bound spectral_cap
      identities best_m dilated_g dilated_h n_gh [wall_time]
    norm_exact = ||T||_{1->1}; norm_lower_bound = |Gamma|^1.5/E^0.5;
    spectral_cap = |H|^n; status = no_injection leaves the hom columns empty.
  Floats carry 12 significant digits; wall_time appears only with timing = true.)";

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw lab::ConfigError("cannot write '" + path + "'");
    f << text;
}

template <typename Record>
std::string emit(const std::vector<Record>& recs, const lab::SweepConfig& cfg) {
    const std::string csv = lab::to_csv(recs, cfg.timing);
    if (cfg.out.empty()) std::cout << csv;
    else write_file(cfg.out, csv);
    return csv;
}

void print_fit(const char* what, const lab::Fit& f) {
    std::cerr << what << ": slope " << lab::fmt_real(f.slope) << ", intercept " << lab::fmt_real(f.intercept)
              << ", r2 " << lab::fmt_real(f.r2) << "\n";
}

int run(const lab::SweepConfig& cfg) {
    switch (cfg.experiment) {
        case lab::Experiment::corollary1: {
            const auto recs = lab::run_corollary1(cfg);
            emit(recs, cfg);
            if (cfg.k_max - cfg.k_min >= 2) print_fit("log2 raw_bound vs k", lab::corollary1_fit(recs, cfg.p.front()));
            if (!cfg.svg.empty()) {
                std::vector<double> x, y;
                for (const auto& r : recs)
                    if (r.seed_index == 0 && r.p == cfg.p.front()) {
                        x.push_back(r.k);
                        y.push_back(r.raw_bound);
                    }
                write_file(cfg.svg, lab::svg_line_chart("corollary1, p = " + lab::fmt_real(cfg.p.front()), "k",
                                                        "raw_bound", x, y));
            }
            break;
        }
        case lab::Experiment::propk: {
            const auto recs = lab::run_propk(cfg);
            emit(recs, cfg);
            if (!cfg.svg.empty()) {
                std::vector<double> x, y;
                for (const auto& r : recs)
                    if (r.seed_index == 0 && r.m == cfg.m.front()) {
                        x.push_back(static_cast<double>(r.gamma_size));
                        y.push_back(r.epsilon);
                    }
                write_file(cfg.svg, lab::svg_line_chart("propk, m = " + std::to_string(cfg.m.front()), "|Gamma|",
                                                        "epsilon", x, y));
            }
            break;
        }
        case lab::Experiment::homgrowth: {
            const auto recs = lab::run_homgrowth(cfg);
            emit(recs, cfg);
            const auto mins = lab::homgrowth_min_norms(recs);
            if (mins.size() >= 3) print_fit("log2 min norm_exact vs n", lab::homgrowth_fit(recs));
            if (!cfg.svg.empty()) {
                std::vector<double> x, y;
                for (const auto& [n, v] : mins) {
                    x.push_back(n);
                    y.push_back(v);
                }
                write_file(cfg.svg, lab::svg_line_chart("homgrowth", "n", "min norm_exact", x, y));
            }
            break;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale sweeps for character-mapping operators on finite Abelian groups"};
    app.footer(kColumnsHelp);
    // "-h" would collide with the --h (group H) flag.
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    std::string config_path;
    lab::KeyValues flags;
    for (const char* name : {"corollary1", "propk", "homgrowth"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " sweep");
        sub->set_help_flag("--help", "print this help and exit");
        sub->add_option("--config", config_path, "key = value config file");
        for (const auto& key : lab::config_keys()) {
            if (key == "experiment") continue;
            sub->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
                                                   "override config key '" + key + "'");
        }
        sub->footer(kColumnsHelp);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        lab::SweepConfig cfg;
        lab::KeyValues kv;
        if (!config_path.empty()) kv = lab::read_key_values(config_path);
        for (const auto& [k, v] : flags) kv[k] = v;
        kv["experiment"] = app.get_subcommands().front()->get_name();
        cfg = lab::apply_key_values(cfg, kv);
        lab::validate(cfg);
        return run(cfg);
    } catch (const lab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const charbound::SoundnessError& e) {
        std::cerr << "soundness violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
