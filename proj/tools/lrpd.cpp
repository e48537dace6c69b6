// Command-line surface: decompose / reduce / verify / oracle.
// Exit codes for `decompose`: 0 feasible, 1 infeasible, 2 unknown,
// 3 parse/schema failure, 4 other errors.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "lrpd/json_io.hpp"
#include "lrpd/oracle.hpp"
#include "lrpd/solve.hpp"

using namespace lrpd;
using nlohmann::json;

namespace {

Coloring parse_coloring_file(const std::string& path, std::size_t n) {
    std::istringstream in(load_text_file(path));
    Coloring c;
    int v;
    while (in >> v) c.push_back(v);
    if (c.size() != n)
        throw ParseError("coloring file: expected " + std::to_string(n) + " colors, got " +
                         std::to_string(c.size()));
    return c;
}

std::vector<Rational> parse_solution_file(const std::string& path) {
    std::istringstream in(load_text_file(path));
    std::vector<Rational> xs;
    std::string tok;
    while (in >> tok) xs.push_back(Rational::parse(tok));
    return xs;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        save_json_file(out_path, j);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        save_text_file(out_path, text);
}

json verify_report_json(const VerifyReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["psd"] = rep.psd;
    j["rank"] = rep.rank;
    if (rep.hnorm > 0) j["hnorm"] = rep.hnorm;
    j["failures"] = rep.failures;
    return j;
}

// factor of the top-r positive eigenpairs; certifies perturbed witnesses
Mat<double> top_factor(const SymMat<double>& m, std::size_t r) {
    auto eig = jacobi_eigen(m, true);
    const std::size_t n = m.n();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });
    Mat<double> u(n, r);
    for (std::size_t k = 0; k < r && k < n; ++k) {
        double lam = eig.values[idx[k]];
        if (lam <= 0) break;
        double s = std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i) u(i, k) = eig.vectors(i, idx[k]) * s;
    }
    return u;
}

template <class T>
int run_decompose(Instance<T> inst, const DriveBudget& budget, const std::string& out,
                  std::uint64_t seed) {
    auto result = solve_instance(inst, budget);
    json j;
    j["status"] = status_name(result.status);
    j["rank_target"] = inst.r;
    j["seed"] = seed;
    j["threads"] = budget.threads;
    j["subsets_processed"] = result.subsets_processed;
    j["subsets_incomplete"] = result.subsets_incomplete;
    if (!result.report.empty()) j["report"] = result.report;
    if (result.witness_j) {
        json wj = json::array();
        for (auto v : *result.witness_j) wj.push_back(v + 1);
        j["witness_j"] = wj;
    }
    if (result.dec) {
        std::string hash = content_hash(instance_to_json(inst));
        j["decomposition"] = decomposition_to_json(*result.dec, hash);
        j["verify"] = verify_report_json(verify(inst, *result.dec, budget.verify_tol));
    }
    emit(j, out);
    switch (result.status) {
        case SolveStatus::feasible: return 0;
        case SolveStatus::infeasible: return 1;
        case SolveStatus::unknown: return 2;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver and instance compiler for low-rank plus diagonal decompositions"};
    app.require_subcommand(1);

    // ------------------------------------------------------------- decompose
    auto* cmd_dec = app.add_subcommand("decompose", "solve an instance file at a given rank");
    std::string dec_file, dec_mode, dec_out;
    std::size_t dec_rank = 0;
    double dec_tol = 1e-9;
    std::size_t dec_threads = 1, dec_budget = 0;
    std::uint64_t dec_seed = 1;
    cmd_dec->add_option("instance", dec_file, "instance JSON file")->required();
    cmd_dec->add_option("--rank", dec_rank, "target rank (overrides the file)");
    cmd_dec->add_option("--mode", dec_mode, "exact|float: convert before solving");
    cmd_dec->add_option("--tol", dec_tol, "verification tolerance");
    cmd_dec->add_option("--budget", dec_budget, "newton start budget (grid cap)");
    cmd_dec->add_option("--threads", dec_threads, "parallel index-set workers");
    cmd_dec->add_option("--seed", dec_seed, "seed for the randomized solver phases");
    cmd_dec->add_option("--out", dec_out, "write the result JSON here instead of stdout");

    // ---------------------------------------------------------------- reduce
    auto* cmd_red = app.add_subcommand("reduce", "instance compilers and gadget pipelines");
    cmd_red->require_subcommand(1);
    std::string red_in, red_out, red_witness_in, red_witness_out;
    bool red_raw = false;
    std::size_t red_c = 0, red_chain_n = 1;
    double red_eps = 1e-6, red_phat = 1.0, red_s = 1e4, red_eps0 = 1e-12;

    auto add_graph_cmd = [&](const char* name, const char* help) {
        auto* c = cmd_red->add_subcommand(name, help);
        c->add_option("graph", red_in, "edge-list or DIMACS .col file")->required();
        c->add_option("-o,--out", red_out, "output file (stdout when omitted)");
        return c;
    };
    auto* red_peeters = add_graph_cmd("peeters", "triangular-prism supergraph");
    auto* red_robust = add_graph_cmd("robustify", "complete 3-partite robustness amplifier");
    red_robust->add_option("-c", red_c, "robustness parameter")->required();
    auto* red_p3 = add_graph_cmd("p3", "pattern-completion instance at rank 3");
    auto* red_p1 = add_graph_cmd("p1", "nonnegative-diagonal instance at rank m+3");
    auto* red_p2 = add_graph_cmd("p2", "free-diagonal instance at rank m+3");
    for (auto* c : {red_p3, red_p1, red_p2}) {
        c->add_flag("--raw", red_raw, "skip the internal prism stage");
        c->add_option("--emit-witness", red_witness_in, "3-coloring file for the forward witness");
        c->add_option("--witness-out", red_witness_out, "where to write the witness JSON");
    }
    auto* red_p3p2 = cmd_red->add_subcommand("p3-to-p2", "compile a P3 instance into P2");
    red_p3p2->add_option("instance", red_in, "P3 instance JSON")->required();
    red_p3p2->add_option("-o,--out", red_out, "output file");
    red_p3p2->add_option("--emit-witness", red_witness_in, "P3 decomposition JSON to map forward");
    red_p3p2->add_option("--witness-out", red_witness_out, "where to write the witness JSON");
    auto* red_shitov = cmd_red->add_subcommand("shitov", "polynomial system to rank-3 completion");
    red_shitov->add_option("system", red_in, "polynomial system text file")->required();
    red_shitov->add_option("-o,--out", red_out, "output file");
    red_shitov->add_option("--emit-witness", red_witness_in, "solution vector file");
    red_shitov->add_option("--witness-out", red_witness_out, "where to write the witness JSON");
    auto* red_apx = add_graph_cmd("appendix-p2tilde", "perturbed P2 instance from the appendix");
    red_apx->add_option("--eps", red_eps, "perturbation budget");
    red_apx->add_option("--phat", red_phat, "approximation factor p(n)");
    red_apx->add_option("--s", red_s, "large parameter s");
    red_apx->add_option("--eps0", red_eps0, "universal constant parameter");
    red_apx->add_option("--emit-witness", red_witness_in, "3-coloring file");
    red_apx->add_option("--witness-out", red_witness_out, "where to write the witness JSON");
    auto* red_chain = cmd_red->add_subcommand("chain", "doubly-exponential chain system");
    red_chain->add_option("n", red_chain_n, "chain length")->required();
    red_chain->add_option("-o,--out", red_out, "output file");

    // ---------------------------------------------------------------- verify
    auto* cmd_ver = app.add_subcommand("verify", "check a decomposition against an instance");
    std::string ver_inst, ver_dec;
    double ver_tol = 1e-9;
    cmd_ver->add_option("instance", ver_inst, "instance JSON")->required();
    cmd_ver->add_option("decomposition", ver_dec, "decomposition JSON")->required();
    cmd_ver->add_option("--tol", ver_tol, "tolerance");

    // ---------------------------------------------------------------- oracle
    auto* cmd_orc = app.add_subcommand("oracle", "brute-force and randomized verifiers");
    cmd_orc->require_subcommand(1);
    std::string orc_in, orc_out;
    std::size_t orc_rank = 1, orc_trials = 1000, orc_points = 13;
    std::uint64_t orc_seed = 1;
    double orc_lo = -3.0, orc_hi = 3.0;
    auto* orc_color = cmd_orc->add_subcommand("color", "exhaustive 3-coloring");
    orc_color->add_option("graph", orc_in, "graph file")->required();
    orc_color->add_option("-o,--out", orc_out, "output file");
    auto* orc_probe = cmd_orc->add_subcommand("probe", "randomized rank probing");
    orc_probe->add_option("instance", orc_in, "instance JSON")->required();
    orc_probe->add_option("--rank", orc_rank, "target rank")->required();
    orc_probe->add_option("--trials", orc_trials, "number of samples");
    orc_probe->add_option("--seed", orc_seed, "RNG seed")->required();
    orc_probe->add_option("-o,--out", orc_out, "output file");
    auto* orc_lemmas = cmd_orc->add_subcommand("lemmas", "perturbation lemma spot checks");
    orc_lemmas->add_option("--trials", orc_trials, "trials per lemma");
    orc_lemmas->add_option("--seed", orc_seed, "RNG seed")->required();
    orc_lemmas->add_option("-o,--out", orc_out, "output file");
    auto* orc_complete = cmd_orc->add_subcommand("complete", "small completion search");
    orc_complete->add_option("partial", orc_in, "partial matrix JSON")->required();
    orc_complete->add_option("--rank", orc_rank, "target rank")->required();
    orc_complete->add_option("--lo", orc_lo, "grid lower bound");
    orc_complete->add_option("--hi", orc_hi, "grid upper bound");
    orc_complete->add_option("--points", orc_points, "grid points per axis");
    orc_complete->add_option("-o,--out", orc_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*cmd_dec) {
            AnyInstance any = instance_from_json(load_json_file(dec_file));
            DriveBudget budget;
            budget.threads = dec_threads;
            budget.verify_tol = dec_tol;
            budget.poly.seed = dec_seed;
            if (dec_budget > 0) budget.poly.newton_grid_cap = dec_budget;
            return std::visit(
                [&](auto inst) -> int {
                    if (dec_rank > 0) inst.r = dec_rank;
                    using T = std::decay_t<decltype(inst.a(0, 0))>;
                    if (dec_mode == "float") {
                        return run_decompose(instance_to_float(inst), budget, dec_out, dec_seed);
                    }
                    if constexpr (!is_exact_v<T>) {
                        if (dec_mode == "exact") {
                            Instance<Rational> ex;
                            ex.kind = inst.kind;
                            ex.a = to_exact(inst.a);
                            ex.pattern = inst.pattern;
                            ex.r = inst.r;
                            ex.eps = inst.eps;
                            ex.sparsity_constrained = inst.sparsity_constrained;
                            ex.provenance = inst.provenance;
                            ex.arrow_block = inst.arrow_block;
                            return run_decompose(std::move(ex), budget, dec_out, dec_seed);
                        }
                    }
                    return run_decompose(std::move(inst), budget, dec_out, dec_seed);
                },
                any);
        }

        if (*cmd_ver) {
            AnyInstance any = instance_from_json(load_json_file(ver_inst));
            AnyDecomposition anyd = decomposition_from_json(load_json_file(ver_dec));
            VerifyReport rep;
            if (std::holds_alternative<Instance<Rational>>(any)) {
                auto& inst = std::get<Instance<Rational>>(any);
                if (std::holds_alternative<Decomposition<Rational>>(anyd))
                    rep = verify(inst, std::get<Decomposition<Rational>>(anyd), ver_tol);
                else
                    rep = verify(instance_to_float(inst), std::get<Decomposition<double>>(anyd),
                                 ver_tol);
            } else {
                auto& inst = std::get<Instance<double>>(any);
                if (std::holds_alternative<Decomposition<double>>(anyd))
                    rep = verify(inst, std::get<Decomposition<double>>(anyd), ver_tol);
                else {
                    auto decf = decomposition_to_float(std::get<Decomposition<Rational>>(anyd));
                    rep = verify(inst, decf, ver_tol);
                }
            }
            std::cout << verify_report_json(rep).dump(2) << "\n";
            return rep.pass ? 0 : 1;
        }

        if (*cmd_red) {
            if (*red_peeters) {
                emit_text(format_edge_list(peeters_supergraph(read_graph_file(red_in))), red_out);
                return 0;
            }
            if (*red_robust) {
                emit_text(format_edge_list(robustify(read_graph_file(red_in), red_c)), red_out);
                return 0;
            }
            if (*red_chain) {
                emit_text(format_poly_system(chain_system(red_chain_n)), red_out);
                return 0;
            }
            if (*red_p3 || *red_p1 || *red_p2) {
                Graph g = read_graph_file(red_in);
                Instance<Rational> inst;
                Decomposition<Rational> wit;
                bool have_wit = false;
                if (*red_p3) {
                    auto con = build_p3_instance(g, !red_raw);
                    inst = con.inst;
                    if (!red_witness_in.empty()) {
                        wit = con.forward_witness(
                            parse_coloring_file(red_witness_in, g.vertex_count()));
                        have_wit = true;
                    }
                } else {
                    auto con = *red_p1 ? build_p1_instance(g, !red_raw)
                                       : build_p2_instance(g, !red_raw);
                    inst = con.inst;
                    if (!red_witness_in.empty()) {
                        wit = con.forward_witness(
                            parse_coloring_file(red_witness_in, g.vertex_count()));
                        have_wit = true;
                    }
                }
                json ij = instance_to_json(inst);
                emit(ij, red_out);
                if (have_wit) {
                    auto rep = verify(inst, wit, 1e-7);
                    json wj = decomposition_to_json(wit, content_hash(ij));
                    wj["verify"] = verify_report_json(rep);
                    emit(wj, red_witness_out);
                }
                return 0;
            }
            if (*red_p3p2) {
                AnyInstance any = instance_from_json(load_json_file(red_in));
                return std::visit(
                    [&](const auto& p3) -> int {
                        auto red = reduce_p3_to_p2(p3);
                        json ij = instance_to_json(red.p2);
                        emit(ij, red_out);
                        if (!red_witness_in.empty()) {
                            auto anyd = decomposition_from_json(load_json_file(red_witness_in));
                            using T = std::decay_t<decltype(p3.a(0, 0))>;
                            auto dec = std::get<Decomposition<T>>(anyd);
                            if (!dec.l) throw ParseError("p3-to-p2 witness needs the L fill");
                            auto uvd = red.forward(*dec.l);
                            Decomposition<T> wit;
                            wit.d = uvd;
                            wit.exact = dec.exact;
                            auto rep = verify(red.p2, wit, 1e-9);
                            json wj = decomposition_to_json(wit, content_hash(ij));
                            wj["verify"] = verify_report_json(rep);
                            emit(wj, red_witness_out);
                        }
                        return 0;
                    },
                    any);
            }
            if (*red_shitov) {
                auto sys = parse_poly_system_text(load_text_file(red_in));
                auto con = build_bbar(sys);
                auto inst = con.p3_instance();
                json ij = instance_to_json(inst);
                emit(ij, red_out);
                if (!red_witness_in.empty()) {
                    auto xi = parse_solution_file(red_witness_in);
                    if (xi.size() != sys.nvars)
                        throw ParseError("solution file: wrong number of values");
                    auto wit = con.forward_witness(xi);
                    auto rep = verify(inst, wit, 1e-9);
                    json wj = decomposition_to_json(wit, content_hash(ij));
                    wj["verify"] = verify_report_json(rep);
                    emit(wj, red_witness_out);
                }
                return 0;
            }
            if (*red_apx) {
                Graph g = read_graph_file(red_in);
                auto con = appendix_p2tilde_instance(g, red_eps, red_phat, red_s, red_eps0);
                json ij = instance_to_json(con.inst);
                ij["params"] = {{"eps", con.params.eps},   {"phat", con.params.phat},
                                {"s", con.params.s},       {"eps0", con.params.eps0},
                                {"delta", con.params.delta}, {"mbar", con.params.mbar}};
                emit(ij, red_out);
                if (!red_witness_in.empty()) {
                    auto coloring = parse_coloring_file(red_witness_in, g.vertex_count());
                    auto w = con.forward_witness(coloring);
                    auto bad = con.validate(&w);
                    SymMat<double> m = con.inst.a;
                    m.add_diag(w.d);
                    m = m + w.h;
                    Decomposition<double> wit;
                    wit.d = w.d;
                    wit.u = top_factor(m, con.inst.r);
                    wit.residual = w.hnorm;
                    wit.exact = false;
                    auto rep = verify(con.inst, wit, 1e-7);
                    json wj = decomposition_to_json(wit, content_hash(ij));
                    wj["verify"] = verify_report_json(rep);
                    wj["validator_violations"] = bad;
                    wj["hnorm"] = w.hnorm;
                    emit(wj, red_witness_out);
                    if (!bad.empty()) return 4;
                }
                return 0;
            }
        }

        if (*cmd_orc) {
            if (*orc_color) {
                auto res = brute_force_3color(read_graph_file(orc_in));
                json j;
                j["colorable"] = res.colorable;
                if (res.colorable) j["coloring"] = res.coloring;
                emit(j, orc_out);
                return 0;
            }
            if (*orc_probe) {
                AnyInstance any = instance_from_json(load_json_file(orc_in));
                ProbeReport rep = std::visit(
                    [&](const auto& inst) { return rank_probe(inst, orc_rank, orc_trials, orc_seed); },
                    any);
                json j;
                j["trials"] = rep.trials;
                j["seed"] = rep.seed;
                j["best_rank_found"] =
                    rep.best_rank_found == std::numeric_limits<std::size_t>::max()
                        ? json(nullptr)
                        : json(rep.best_rank_found);
                j["feasible_samples"] = rep.feasible_samples;
                j["verified_at_target"] = rep.verified_at_target;
                j["sampling"] = rep.sampling;
                emit(j, orc_out);
                return 0;
            }
            if (*orc_lemmas) {
                auto rep = check_perturbation_lemmas(orc_trials, orc_seed);
                json j;
                j["trials"] = rep.trials;
                j["seed"] = rep.seed;
                j["violations"] = rep.violations;
                j["notes"] = rep.notes;
                emit(j, orc_out);
                return rep.violations == 0 ? 0 : 1;
            }
            if (*orc_complete) {
                auto pm = partial_matrix_from_json(load_json_file(orc_in));
                GridSpec grid;
                grid.lo = orc_lo;
                grid.hi = orc_hi;
                grid.points = orc_points;
                auto res = small_completion_search(pm, orc_rank, grid);
                json j;
                j["score"] = res.score;
                j["psd"] = res.psd;
                j["rank"] = res.rank;
                json unknowns = json::array();
                for (std::size_t t = 0; t < res.unknown_positions.size(); ++t)
                    unknowns.push_back({res.unknown_positions[t].first + 1,
                                        res.unknown_positions[t].second + 1,
                                        res.unknown_values[t]});
                j["unknowns"] = unknowns;
                emit(j, orc_out);
                return 0;
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
