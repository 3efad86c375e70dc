// spectral-shift: build subshift languages, attach invariant measures, and
// run the Dirac-operator experiments from one JSON-configured binary.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <future>
#include <iostream>
#include <string>

#include "specshift/analysis.hpp"
#include "specshift/config.hpp"
#include "specshift/io.hpp"
#include "specshift/verify.hpp"

namespace ss = specshift;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitConsistency = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_csv;
    std::string out_json;
    int max_level = -1;  // -1: take from config
    std::string alpha_override;
};

json base_summary(const std::string& command, const ss::RunConfig& cfg) {
    json s;
    s["command"] = command;
    s["config_hash"] = ss::hash_hex(cfg.raw.dump());
    s["parry_exponent_corrected"] = true;
    s["inputs"] = cfg.raw;
    return s;
}

void emit_json(const std::string& path, const json& summary) {
    if (path.empty()) return;
    ss::write_text_file(path, summary.dump(2) + "\n");
}

ss::RunConfig load_config(const CommonArgs& args) {
    ss::RunConfig cfg = ss::parse_run_config(ss::load_json_file(args.config_path));
    if (args.max_level >= 0) cfg.max_level = args.max_level;
    if (!args.out_csv.empty()) cfg.out_csv = args.out_csv;
    if (!args.out_json.empty()) cfg.out_json = args.out_json;
    if (!args.alpha_override.empty()) cfg.alpha = json(args.alpha_override);
    return cfg;
}

// ---------------------------------------------------------------------------

int cmd_lang(const CommonArgs& args) {
    ss::RunConfig cfg = load_config(args);
    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    if (!cfg.out_csv.empty()) {
        ss::CsvWriter csv(cfg.out_csv);
        csv.header({"level", "id", "letters", "parent", "special"});
        for (int n = 0; n <= table.max_level; ++n)
            for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i)
                csv.row({std::to_string(n), std::to_string(i),
                         table.levels[static_cast<std::size_t>(n)][i],
                         n > 0 ? std::to_string(table.parent[static_cast<std::size_t>(n)][i]) : "",
                         n < table.max_level
                             ? std::to_string(static_cast<int>(table.special[static_cast<std::size_t>(n)][i]))
                             : ""});
    }
    json summary = base_summary("lang", cfg);
    json complexity = json::array();
    for (auto c : ss::complexity_profile(table)) complexity.push_back(c);
    summary["complexity"] = complexity;
    const auto ent = ss::entropy_profile(table);
    summary["entropy_estimate"] = ent.estimate;
    json tbl = json::array();
    for (int n = 0; n <= table.max_level; ++n)
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            json row;
            row["level"] = n;
            row["id"] = i;
            row["letters"] = table.levels[static_cast<std::size_t>(n)][i];
            if (n > 0) row["parent"] = table.parent[static_cast<std::size_t>(n)][i];
            if (n < table.max_level)
                row["special"] = static_cast<bool>(table.special[static_cast<std::size_t>(n)][i]);
            tbl.push_back(row);
        }
    summary["table"] = tbl;
    emit_json(cfg.out_json, summary);
    std::printf("lang: %d levels, top count %zu, entropy estimate %s\n", table.max_level,
                table.count(table.max_level), ss::format_double(ent.estimate).c_str());
    return 0;
}

int cmd_measure(const CommonArgs& args) {
    ss::RunConfig cfg = load_config(args);
    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    const ss::MeasureAssignment m =
        ss::build_measure(cfg.shift(), table, cfg.measure_source, cfg.sample_length, cfg.seed);
    if (!cfg.out_csv.empty()) {
        ss::CsvWriter csv(cfg.out_csv);
        csv.header({"level", "word", "mu", "R", "special"});
        for (int n = 0; n <= table.max_level; ++n)
            for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i)
                csv.row({std::to_string(n), table.levels[static_cast<std::size_t>(n)][i],
                         ss::format_double(m.value(n, static_cast<int>(i))),
                         n < table.max_level
                             ? ss::format_double(ss::ratio_R(table, m, n, static_cast<int>(i)))
                             : "",
                         n < table.max_level
                             ? std::to_string(static_cast<int>(table.special[static_cast<std::size_t>(n)][i]))
                             : ""});
    }
    const double tol = m.source == ss::MeasureSource::empirical ? 1e-2 : 1e-10;
    const auto rep = ss::check_measure(table, m, tol);
    json summary = base_summary("measure", cfg);
    summary["measure_source"] = ss::to_string(m.source);
    summary["mass_defect"] = rep.worst_mass_defect;
    summary["additivity_defect"] = rep.worst_additivity_defect;
    summary["invariance_defect"] = rep.worst_invariance_defect;
    summary["ok"] = rep.ok;
    emit_json(cfg.out_json, summary);
    std::printf("measure: source=%s mass_defect=%s additivity_defect=%s\n", ss::to_string(m.source),
                ss::format_double(rep.worst_mass_defect).c_str(),
                ss::format_double(rep.worst_additivity_defect).c_str());
    if (!rep.ok) throw ss::consistency_error("measure checks failed");
    return 0;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
    if (path.empty()) return;
    ss::CsvWriter csv(path);
    csv.header({"row", "col", "entry"});
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) > 1e-15)
                csv.row({std::to_string(i), std::to_string(j), ss::format_double(M(i, j))});
}

int cmd_dirac(const CommonArgs& args) {
    ss::RunConfig cfg = load_config(args);
    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    const ss::MeasureAssignment m =
        ss::build_measure(cfg.shift(), table, cfg.measure_source, cfg.sample_length, cfg.seed);
    const ss::TruncatedSpace space = ss::make_space(table, m, cfg.max_level);
    const ss::AlphaSequence alpha = ss::parse_alpha(cfg.alpha, cfg.max_level);
    const Eigen::MatrixXd D = ss::dirac_matrix(space, alpha);
    write_matrix_csv(cfg.out_csv, D);
    json summary = base_summary("dirac", cfg);
    summary["dimension"] = space.dim();
    json mult = json::array();
    for (int n = 0; n <= cfg.max_level; ++n) {
        json row;
        row["eigenvalue"] = alpha.at(n);
        row["multiplicity"] = static_cast<long>(table.count(n)) - (n > 0 ? static_cast<long>(table.count(n - 1)) : 0);
        mult.push_back(row);
    }
    summary["spectrum"] = mult;
    emit_json(cfg.out_json, summary);
    std::printf("dirac: dimension %d, eigenvalues up to %s\n", space.dim(),
                ss::format_double(alpha.at(cfg.max_level)).c_str());
    return 0;
}

int cmd_commutator(const CommonArgs& args, const std::string& word, bool use_eta) {
    ss::RunConfig cfg = load_config(args);
    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    const ss::MeasureAssignment m =
        ss::build_measure(cfg.shift(), table, cfg.measure_source, cfg.sample_length, cfg.seed);
    const ss::TruncatedSpace space = ss::make_space(table, m, cfg.max_level);
    const ss::AlphaSequence alpha = ss::parse_alpha(cfg.alpha, cfg.max_level);
    const int level = static_cast<int>(word.size());
    const int id = table.index_of(level, word);
    if (id < 0) throw ss::validation_error("commutator: word not admissible: " + word);
    ss::LevelFunction f;
    bool degenerate = false;
    if (use_eta)
        f = ss::eta_function(space, level, id, &degenerate);
    else
        f = ss::indicator(space, level, id);
    const Eigen::MatrixXd C = ss::commutator_matrix(space, alpha, f);
    write_matrix_csv(cfg.out_csv, C);
    json summary = base_summary("commutator", cfg);
    summary["word"] = word;
    summary["function"] = use_eta ? "eta" : "indicator";
    summary["degenerate"] = degenerate;
    summary["norm"] = ss::operator_norm(C);
    emit_json(cfg.out_json, summary);
    std::printf("commutator: |[D, f]| = %s%s\n", ss::format_double(ss::operator_norm(C)).c_str(),
                degenerate ? " (word has a non-branching parent; eta vanishes)" : "");
    return 0;
}

std::vector<double> complexity_counts(const ss::RunConfig& cfg, int depth) {
    // exact path counting for sft languages; enumeration otherwise
    std::vector<double> counts;
    if (cfg.shift().kind == "sft") {
        const auto& g = cfg.shift().sft();
        for (int n = 0; n <= depth; ++n) counts.push_back(g.factor_count(n).get_d());
    } else if (cfg.shift().kind == "sturmian") {
        for (int n = 0; n <= depth; ++n)
            counts.push_back(static_cast<double>(ss::sturmian_factors(cfg.shift().sturmian(), n).size()));
    } else {
        for (int n = 0; n <= depth; ++n)
            counts.push_back(static_cast<double>(cfg.shift().substitution().factors(n).size()));
    }
    return counts;
}

int cmd_summability(const CommonArgs& args, const std::string& kind, double s, int depth) {
    if (kind != "exp" && kind != "power")
        throw ss::validation_error("summability: kind must be exp or power, got " + kind);
    ss::RunConfig cfg = load_config(args);
    const int N = depth > 0 ? depth : cfg.max_level;
    const std::vector<double> counts = complexity_counts(cfg, N);
    const ss::SummabilityReport rep =
        kind == "power" ? ss::power_summability(counts, s) : ss::exp_summability(counts, s);
    if (!cfg.out_csv.empty()) {
        ss::CsvWriter csv(cfg.out_csv);
        csv.header({"n", "count", "term", "partial_sum"});
        for (std::size_t n = 0; n < counts.size(); ++n)
            csv.row({std::to_string(n), ss::format_double(counts[n]),
                     ss::format_double(rep.terms[n]), ss::format_double(rep.partial_sums[n])});
    }
    json summary = base_summary("summability", cfg);
    summary["kind"] = kind;
    summary["s"] = s;
    summary["verdict"] = rep.verdict;
    summary["evidence"] = rep.evidence;
    summary["growth_estimate"] = rep.growth_estimate;
    summary["final_partial_sum"] = rep.partial_sums.back();
    summary["final_term"] = rep.terms.back();
    emit_json(cfg.out_json, summary);
    std::printf("summability(%s, s=%s): %s by %s; growth estimate %s\n", kind.c_str(),
                ss::format_double(s).c_str(), rep.verdict.c_str(), rep.evidence.c_str(),
                ss::format_double(rep.growth_estimate).c_str());
    return 0;
}

int run_experiment(const ss::RunConfig& cfg) {
    const std::string& name = cfg.experiment;
    json summary;
    if (name == "bounded_quotients") {
        const int samples = cfg.params.value("samples", 200);
        const int depth = cfg.params.value("depth", 15);
        const double s = cfg.params.value("s", 1.5);
        const double threshold = cfg.params.value("threshold", 60.0);
        const auto rep = ss::bounded_quotient_check(samples, depth, s, threshold, cfg.seed);
        summary = base_summary("experiment", cfg);
        summary["experiment"] = name;
        summary["samples"] = rep.samples;
        summary["depth"] = rep.depth;
        summary["s"] = rep.s;
        summary["threshold"] = rep.threshold;
        summary["worst_ratio"] = rep.worst_ratio;
        summary["fraction_within"] = rep.fraction_within;
        if (!cfg.out_csv.empty()) {
            ss::CsvWriter csv(cfg.out_csv);
            csv.header({"samples", "depth", "s", "threshold", "worst_ratio", "fraction_within"});
            csv.row({std::to_string(rep.samples), std::to_string(rep.depth), ss::format_double(rep.s),
                     ss::format_double(rep.threshold), ss::format_double(rep.worst_ratio),
                     ss::format_double(rep.fraction_within)});
        }
        emit_json(cfg.out_json, summary);
        std::printf("bounded quotients: %.0f%% of sampled rotation numbers within a_j <= %s j^%s\n",
                    100.0 * rep.fraction_within, ss::format_double(rep.threshold).c_str(),
                    ss::format_double(rep.s).c_str());
        return 0;
    }
    if (name == "sturmian_witness") {
        const auto& cf = cfg.shift().sturmian();
        const int n_lo = cfg.params.value("n_min", 1);
        const int n_hi = cfg.params.value("n_max", 4);
        const bool materialize = cfg.params.value("materialize", true);
        summary = base_summary("experiment", cfg);
        summary["experiment"] = name;
        json rows = json::array();
        std::unique_ptr<ss::CsvWriter> csv;
        if (!cfg.out_csv.empty()) {
            csv = std::make_unique<ss::CsvWriter>(cfg.out_csv);
            csv->header({"n", "level", "ratio_lower", "ratio_upper", "ratio_quantity", "lip", "osc"});
        }
        for (int n = n_lo; n <= n_hi; ++n) {
            const auto w = ss::sturmian_witness(cf, n, materialize);
            json row;
            row["n"] = n;
            row["level"] = w.level.get_str();
            row["ratio_lower"] = w.ratio_lower.get_d();
            row["ratio_upper"] = w.ratio_upper.get_d();
            row["ratio_quantity"] = w.ratio_quantity;
            row["materialized"] = w.materialized;
            if (w.materialized) {
                row["lip"] = w.lip;
                row["osc"] = w.osc;
                row["osc_predicted"] = w.osc_predicted;
            }
            rows.push_back(row);
            if (csv)
                csv->row({std::to_string(n), w.level.get_str(),
                          ss::format_double(w.ratio_lower.get_d()),
                          ss::format_double(w.ratio_upper.get_d()),
                          ss::format_double(w.ratio_quantity),
                          w.materialized ? ss::format_double(w.lip) : "",
                          w.materialized ? ss::format_double(w.osc) : ""});
            const std::string lip_note =
                w.materialized ? " lip=" + ss::format_double(w.lip) : std::string();
            std::printf("witness n=%d level=%s ratio=[%s, %s]%s\n", n, w.level.get_str().c_str(),
                        ss::format_double(w.ratio_lower.get_d()).c_str(),
                        ss::format_double(w.ratio_upper.get_d()).c_str(), lip_note.c_str());
        }
        summary["rows"] = rows;
        emit_json(cfg.out_json, summary);
        return 0;
    }

    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    const ss::MeasureAssignment m =
        ss::build_measure(cfg.shift(), table, cfg.measure_source, cfg.sample_length, cfg.seed);
    summary = base_summary("experiment", cfg);
    summary["experiment"] = name;

    if (name == "sft_fk") {
        const int K_max = cfg.params.value("K_max", 6);
        const auto rep = ss::sft_fk_experiment(cfg.shift().sft(), table, m, K_max);
        summary["cycle"] = rep.cycle.cycle;
        summary["vertex"] = rep.cycle.vertex;
        summary["ratio_a"] = rep.ratio_a;
        json rows = json::array();
        std::unique_ptr<ss::CsvWriter> csv;
        if (!cfg.out_csv.empty()) {
            csv = std::make_unique<ss::CsvWriter>(cfg.out_csv);
            csv->header({"K", "harmonic", "osc_lower", "lip"});
        }
        for (const auto& r : rep.rows) {
            json row;
            row["K"] = r.K;
            row["harmonic"] = r.harmonic;
            row["osc_lower"] = r.osc_lower;
            row["lip"] = r.lip;
            rows.push_back(row);
            if (csv)
                csv->row({std::to_string(r.K), ss::format_double(r.harmonic),
                          ss::format_double(r.osc_lower), ss::format_double(r.lip)});
            std::printf("K=%d osc>=%s lip=%s\n", r.K, ss::format_double(r.osc_lower).c_str(),
                        ss::format_double(r.lip).c_str());
        }
        summary["rows"] = rows;
    } else if (name == "sft_identities") {
        const int k = cfg.params.value("k", 2);
        const auto checks =
            ss::sft_projection_identities(cfg.shift().sft(), ss::perron(cfg.shift().sft()), table, m, k);
        json rows = json::array();
        std::unique_ptr<ss::CsvWriter> csv;
        if (!cfg.out_csv.empty()) {
            csv = std::make_unique<ss::CsvWriter>(cfg.out_csv);
            csv->header({"name", "defect"});
        }
        for (const auto& c : checks) {
            json row;
            row["name"] = c.name;
            row["defect"] = c.defect;
            rows.push_back(row);
            if (csv) csv->row({c.name, ss::format_double(c.defect)});
            std::printf("%s defect=%s\n", c.name.c_str(), ss::format_double(c.defect).c_str());
        }
        summary["checks"] = rows;
    } else if (name == "commutant") {
        const ss::TruncatedSpace space = ss::make_space(table, m, cfg.max_level);
        const ss::AlphaSequence alpha = ss::parse_alpha(cfg.alpha, cfg.max_level);
        bool ambiguous = false;
        const int dim = ss::commutant_dimension(space, alpha, &ambiguous);
        summary["commutant_dimension"] = dim;
        summary["rank_ambiguous"] = ambiguous;
        if (!cfg.out_csv.empty()) {
            ss::CsvWriter csv(cfg.out_csv);
            csv.header({"max_level", "dimension", "ambiguous"});
            csv.row({std::to_string(cfg.max_level), std::to_string(dim), ambiguous ? "1" : "0"});
        }
        std::printf("commutant dimension = %d%s\n", dim, ambiguous ? " (near-tolerance entries flagged)" : "");
    } else if (name == "du_norm") {
        const int N = cfg.params.value("N", cfg.max_level - 2);
        const ss::AlphaSequence alpha = ss::parse_alpha(cfg.alpha, N + 2);
        const double v = ss::shift_commutator_restricted_norm(table, m, alpha, N);
        summary["N"] = N;
        summary["restricted_norm"] = v;
        summary["lower_bound_only"] = true;
        if (!cfg.out_csv.empty()) {
            ss::CsvWriter csv(cfg.out_csv);
            csv.header({"N", "restricted_norm"});
            csv.row({std::to_string(N), ss::format_double(v)});
        }
        std::printf("|[D, u]| restricted to level %d: %s (lower bound for the full norm)\n", N,
                    ss::format_double(v).c_str());
    } else if (name == "qw_bounds") {
        const ss::TruncatedSpace space = ss::make_space(table, m, cfg.max_level);
        const ss::AlphaSequence alpha = ss::parse_alpha(cfg.alpha, cfg.max_level);
        const int trials = cfg.params.value("trials", 50);
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss;
        std::map<std::pair<int, int>, std::pair<double, double>> per_pair;  // (n,m) -> (margin, defect)
        long checks = 0;
        for (int t = 0; t < trials; ++t) {
            ss::LevelFunction f;
            f.values.resize(space.dim());
            for (int i = 0; i < space.dim(); ++i) f.values(i) = gauss(rng);
            const double lip = ss::lip_seminorm(space, alpha, f);
            f.values /= lip;
            for (int n = 1; n + 1 <= cfg.max_level; ++n)
                for (std::size_t id = 0; id < table.levels[static_cast<std::size_t>(n)].size(); ++id) {
                    if (!table.special[static_cast<std::size_t>(n)][id]) continue;
                    for (int mm = 0; mm < n; ++mm) {
                        const int anc = ss::ancestor_id(table, n, static_cast<int>(id), mm);
                        if (!table.special[static_cast<std::size_t>(mm)][static_cast<std::size_t>(anc)]) continue;
                        const auto q = ss::qw_bound_check(space, alpha, f, n, static_cast<int>(id), mm);
                        auto& slot = per_pair.try_emplace({n, mm},
                                                          std::numeric_limits<double>::infinity(), 0.0)
                                         .first->second;
                        slot.first = std::min(slot.first, q.margin);
                        slot.second = std::max(slot.second, std::abs(q.pairing_lhs - q.pairing_rhs));
                        ++checks;
                    }
                }
        }
        double worst_margin = std::numeric_limits<double>::infinity(), worst_defect = 0.0;
        std::unique_ptr<ss::CsvWriter> csv;
        if (!cfg.out_csv.empty()) {
            csv = std::make_unique<ss::CsvWriter>(cfg.out_csv);
            csv->header({"n", "m", "worst_margin", "worst_pairing_defect"});
        }
        for (const auto& [key, val] : per_pair) {
            worst_margin = std::min(worst_margin, val.first);
            worst_defect = std::max(worst_defect, val.second);
            if (csv)
                csv->row({std::to_string(key.first), std::to_string(key.second),
                          ss::format_double(val.first), ss::format_double(val.second)});
        }
        summary["checks"] = checks;
        summary["worst_margin"] = worst_margin;
        summary["worst_pairing_defect"] = worst_defect;
        std::printf("qw bounds: %ld checks, worst margin %s, worst pairing defect %s\n", checks,
                    ss::format_double(worst_margin).c_str(), ss::format_double(worst_defect).c_str());
    } else if (name == "lr_certificate") {
        std::string sample;
        if (cfg.shift().kind == "substitution")
            sample = cfg.shift().substitution().sample_prefix(cfg.sample_length);
        else
            throw ss::validation_error("lr_certificate expects a substitution subshift");
        const int scan_levels = cfg.params.value("scan_levels", 8);
        const int bands = cfg.params.value("bands", 7);
        const auto cert = ss::lr_certificate(table, m, sample, scan_levels, bands, cfg.seed);
        summary["K_scan"] = cert.K_scan;
        summary["K_freq"] = cert.K_freq;
        summary["K_hat"] = cert.K_hat;
        summary["scan_stable"] = cert.scan_stable;
        summary["band_limit"] = cert.band_limit;
        summary["band_counts"] = cert.band_counts;
        summary["tail_bounds"] = cert.tail_bounds;
        summary["oscillation_constant"] = cert.oscillation_constant;
        std::printf("lr certificate: K=%s bands ok, oscillation constant %s\n",
                    ss::format_double(cert.K_hat).c_str(),
                    ss::format_double(cert.oscillation_constant).c_str());
        if (!cfg.out_csv.empty()) {
            ss::CsvWriter csv(cfg.out_csv);
            csv.header({"k0", "tail_bound"});
            for (std::size_t k = 0; k < cert.tail_bounds.size(); ++k)
                csv.row({std::to_string(k), ss::format_double(cert.tail_bounds[k])});
        }
    } else {
        throw ss::validation_error("unknown experiment: " + name);
    }
    emit_json(cfg.out_json, summary);
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ss::precision_error*>(&e)) return kExitPrecision;
    if (dynamic_cast<const ss::consistency_error*>(&e)) return kExitConsistency;
    return kExitValidation;
}

/// A config may carry a single experiment or an "experiments" array of
/// independent ones; the latter run in waves of `threads` parallel tasks.
int run_config_file(const CommonArgs& args, int threads) {
    const json root = ss::load_json_file(args.config_path);
    if (!root.contains("experiments")) return run_experiment(load_config(args));
    const auto& list = root.at("experiments");
    if (!list.is_array() || list.empty())
        throw ss::validation_error("config: experiments must be a nonempty array");
    std::vector<json> items(list.begin(), list.end());
    int worst = 0;
    const int wave = std::max(1, threads);
    for (std::size_t base = 0; base < items.size(); base += static_cast<std::size_t>(wave)) {
        std::vector<std::future<int>> running;
        for (std::size_t i = base; i < std::min(items.size(), base + static_cast<std::size_t>(wave)); ++i)
            running.push_back(std::async(std::launch::async, [&items, i]() {
                try {
                    return run_experiment(ss::parse_run_config(items[i]));
                } catch (const std::exception& e) {
                    std::fprintf(stderr, "experiment %zu failed: %s\n", i, e.what());
                    return exit_code_for(e);
                }
            }));
        for (auto& f : running) worst = std::max(worst, f.get());
    }
    return worst;
}

int cmd_verify(const CommonArgs& args, double inject_mu_error) {
    ss::RunConfig cfg = load_config(args);
    const ss::LanguageTable table = ss::build_table(cfg.shift(), cfg.max_level);
    ss::MeasureAssignment m =
        ss::build_measure(cfg.shift(), table, cfg.measure_source, cfg.sample_length, cfg.seed);
    if (inject_mu_error != 0.0 && table.max_level >= 1 && !m.mu[1].empty())
        m.mu[1][0] += inject_mu_error;  // fault injection for self-tests
    const double tol = m.source == ss::MeasureSource::empirical ? 1e-2 : 1e-10;
    const auto suite = ss::run_invariant_suite(table, m, cfg.max_level, tol, cfg.seed);
    json rows = json::array();
    for (const auto& r : suite.results) {
        std::printf("%s %-36s defect=%-12s tol=%s\n", r.pass ? "pass" : "FAIL", r.name.c_str(),
                    ss::format_double(r.defect).c_str(), ss::format_double(r.tolerance).c_str());
        json row;
        row["name"] = r.name;
        row["pass"] = r.pass;
        row["defect"] = r.defect;
        row["tolerance"] = r.tolerance;
        rows.push_back(row);
    }
    json summary = base_summary("verify", cfg);
    summary["results"] = rows;
    summary["all_pass"] = suite.all_pass;
    emit_json(cfg.out_json, summary);
    if (!suite.all_pass) throw ss::consistency_error("invariant suite failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral triples of subshift languages: languages, measures, Dirac experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string word;
    bool use_eta = false;
    std::string sum_kind = "exp";
    double sum_s = 1.0;
    int sum_depth = 0;
    double inject_mu = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON configuration")->required();
        sub->add_option("--out", args.out_csv, "CSV output path");
        sub->add_option("--json", args.out_json, "JSON summary path");
        sub->add_option("--max-level", args.max_level, "override the truncation depth");
        sub->add_option("--alpha", args.alpha_override, "override alpha: linear | quadratic");
    };

    CLI::App* lang = app.add_subcommand("lang", "materialize the language table");
    add_common(lang);
    CLI::App* measure = app.add_subcommand("measure", "attach and check the invariant measure");
    add_common(measure);
    CLI::App* dirac = app.add_subcommand("dirac", "emit the Dirac matrix and its spectrum");
    add_common(dirac);
    CLI::App* comm = app.add_subcommand("commutator", "commutator of D with a cylinder function");
    add_common(comm);
    comm->add_option("--word", word, "cylinder word")->required();
    comm->add_flag("--eta", use_eta, "use the branching function of the word instead of its indicator");
    CLI::App* summ = app.add_subcommand("summability", "heat/power traces of the canonical operator");
    add_common(summ);
    summ->add_option("--kind", sum_kind, "exp | power");
    summ->add_option("--s", sum_s, "exponent")->required();
    summ->add_option("--depth", sum_depth, "levels to sum (defaults to max_level)");
    int threads = 1;
    CLI::App* exp = app.add_subcommand("experiment", "run the experiment named in the config");
    add_common(exp);
    exp->add_option("--threads", threads, "independent experiments run in waves of this size");
    CLI::App* run = app.add_subcommand("run", "alias of experiment");
    add_common(run);
    run->add_option("--threads", threads, "independent experiments run in waves of this size");
    CLI::App* verify = app.add_subcommand("verify", "run every registered invariant");
    add_common(verify);
    verify->add_option("--inject-mu-error", inject_mu,
                       "perturb one measure value (fault injection for self-tests)");

    try {
        app.parse(argc, argv);
        if (lang->parsed()) return cmd_lang(args);
        if (measure->parsed()) return cmd_measure(args);
        if (dirac->parsed()) return cmd_dirac(args);
        if (comm->parsed()) return cmd_commutator(args, word, use_eta);
        if (summ->parsed()) return cmd_summability(args, sum_kind, sum_s, sum_depth);
        if (exp->parsed() || run->parsed()) return run_config_file(args, threads);
        if (verify->parsed()) return cmd_verify(args, inject_mu);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitValidation;
    } catch (const ss::validation_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const ss::precision_error& e) {
        std::fprintf(stderr, "precision error: %s\n", e.what());
        return kExitPrecision;
    } catch (const ss::consistency_error& e) {
        std::fprintf(stderr, "consistency error: %s\n", e.what());
        return kExitConsistency;
    }
}
