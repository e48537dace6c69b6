#include "lrpd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lrpd/solve.hpp"

namespace lrpd {

// ---------------------------------------------------------------------------
// 3-coloring

ColoringResult brute_force_3color(const Graph& g, std::size_t size_cap) {
    const std::size_t n = g.vertex_count();
    if (n > size_cap)
        throw SizeCap("brute_force_3color: " + std::to_string(n) + " vertices exceed the cap");
    ColoringResult res;
    if (n == 0) {
        res.colorable = true;
        return res;
    }

    // order by descending degree for pruning
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g.degree(a) > g.degree(b); });

    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [u, v] : g.edges()) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    Coloring color(n, 0);
    std::vector<std::size_t> pos_of(n);
    for (std::size_t i = 0; i < n; ++i) pos_of[order[i]] = i;

    std::function<bool(std::size_t)> go = [&](std::size_t depth) -> bool {
        if (depth == n) return true;
        std::size_t v = order[depth];
        // first vertex: one color suffices up to symmetry
        int cmax = depth == 0 ? 1 : 3;
        for (int c = 1; c <= cmax; ++c) {
            bool ok = true;
            for (auto w : adj[v])
                if (color[w] == c) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            color[v] = c;
            if (go(depth + 1)) return true;
            color[v] = 0;
        }
        return false;
    };

    res.colorable = go(0);
    if (res.colorable) res.coloring = color;
    return res;
}

// ---------------------------------------------------------------------------
// rank probe

namespace {

template <class T>
ProbeReport rank_probe_impl(const Instance<T>& inst, std::size_t r, std::size_t trials,
                            std::uint64_t seed) {
    inst.validate();
    ProbeReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);

    Instance<T> probe_inst = inst;
    probe_inst.r = r;

    const std::size_t n = inst.a.n();
    Pattern free = inst.kind == ProblemKind::P3 ? inst.free_pairs() : Pattern{};
    const std::size_t dims = inst.kind == ProblemKind::P3 ? n + free.size() : n;

    // coarse integer lattice enumerated exhaustively when it fits the budget,
    // then random lattice draws, then continuous draws
    static const double lattice[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, -0.5, -1.0, -2.0, 3.5};
    const std::size_t coarse = 4;  // {0,1,2,3}
    double coarse_total = std::pow(static_cast<double>(coarse), static_cast<double>(dims));
    bool enumerate = coarse_total <= static_cast<double>(trials) / 2.0;

    auto run_sample = [&](const std::vector<double>& sample) {
        Decomposition<T> dec;
        dec.exact = false;
        if (inst.kind == ProblemKind::P3) {
            SymMat<T> l(n);
            for (std::size_t i = 0; i < n; ++i) {
                if constexpr (is_exact_v<T>)
                    l.set(i, i, Rational::from_double(sample[i]));
                else
                    l.set(i, i, sample[i]);
            }
            for (std::size_t e = 0; e < free.size(); ++e) {
                if constexpr (is_exact_v<T>)
                    l.set(free[e].first, free[e].second, Rational::from_double(sample[n + e]));
                else
                    l.set(free[e].first, free[e].second, sample[n + e]);
            }
            dec.l = std::move(l);
        } else {
            dec.d.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                if constexpr (is_exact_v<T>)
                    dec.d[i] = Rational::from_double(sample[i]);
                else
                    dec.d[i] = sample[i];
            }
        }
        ++rep.trials;
        auto v = verify(probe_inst, dec, 1e-9);
        if (!v.psd) return;
        bool constraints_ok = true;
        for (const auto& f : v.failures)
            if (f.find("rank") == std::string::npos) constraints_ok = false;
        if (!constraints_ok) return;
        ++rep.feasible_samples;
        if (v.rank < rep.best_rank_found) {
            rep.best_rank_found = v.rank;
            rep.best_d = sample;
        }
        if (v.rank <= r) ++rep.verified_at_target;
    };

    std::size_t used = 0;
    if (enumerate) {
        std::vector<std::size_t> idx(dims, 0);
        while (used < trials) {
            std::vector<double> sample(dims);
            for (std::size_t i = 0; i < dims; ++i) sample[i] = static_cast<double>(idx[i]);
            run_sample(sample);
            ++used;
            std::size_t c = 0;
            while (c < dims && ++idx[c] == coarse) idx[c++] = 0;
            if (c == dims) break;
        }
        rep.sampling = "coarse lattice enumerated; ";
    }
    std::uniform_int_distribution<std::size_t> pick(0, std::size(lattice) - 1);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    for (; used < trials; ++used) {
        std::vector<double> sample(dims);
        if (used % 2 == 0) {
            for (auto& v : sample) v = lattice[pick(rng)];
        } else {
            for (auto& v : sample) v = uni(rng);
        }
        run_sample(sample);
    }
    std::ostringstream os;
    os << rep.sampling << "lattice/continuous mix, " << rep.trials << " trials, seed " << seed;
    rep.sampling = os.str();
    return rep;
}

}  // namespace

ProbeReport rank_probe(const Instance<Rational>& inst, std::size_t r, std::size_t trials,
                       std::uint64_t seed) {
    // probing is numeric evidence; run it in float mode regardless of the
    // instance scalar mode
    return rank_probe_impl(instance_to_float(inst), r, trials, seed);
}
ProbeReport rank_probe(const Instance<double>& inst, std::size_t r, std::size_t trials,
                       std::uint64_t seed) {
    return rank_probe_impl(inst, r, trials, seed);
}

// ---------------------------------------------------------------------------
// perturbation lemmas

namespace {

Mat<double> random_mat(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Mat<double> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace

LemmaReport check_perturbation_lemmas(std::size_t trials, std::uint64_t seed) {
    LemmaReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);

    // inverse-of-sum bound
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = 3 + t % 3;
        Mat<double> raw = random_mat(n, n, rng, 1.0);
        SymMat<double> gram = SymMat<double>::lower_of(raw * raw.transposed());
        for (std::size_t i = 0; i < n; ++i) gram.at(i, i) += 1.0;  // keep well-invertible
        Mat<double> ainv;
        try {
            ainv = inverse(gram);
        } catch (const SingularBlockError&) {
            continue;
        }
        Mat<double> b = random_mat(n, n, rng, 1.0);
        b = b + b.transposed();
        double nai = fro_norm(ainv);
        double target = 0.4 / nai;  // ensures ||B|| ||A^{-1}|| < 1
        double nb0 = fro_norm(b);
        if (nb0 > 0) b = b * (target / nb0);
        double nb = fro_norm(b);

        Mat<double> sum_inv;
        try {
            sum_inv = inverse(SymMat<double>::lower_of(gram.dense() + b));
        } catch (const SingularBlockError&) {
            ++rep.violations;
            rep.notes.push_back("inverse-of-sum: A+B singular under the hypothesis");
            continue;
        }
        double z = fro_norm(sum_inv - ainv);
        double bound = nb * nai * nai / (1.0 - nb * nai);
        ++rep.trials;
        if (z > bound * (1 + 1e-9) + 1e-12) {
            ++rep.violations;
            rep.notes.push_back("inverse-of-sum bound violated");
        }
    }

    // degenerate case B = 0 -> Z = 0
    {
        SymMat<double> a{{2.0, 0.5}, {0.5, 3.0}};
        Mat<double> ai = inverse(a);
        Mat<double> sum_inv = inverse(a);
        ++rep.trials;
        if (fro_norm(sum_inv - ai) != 0.0) {
            ++rep.violations;
            rep.notes.push_back("inverse-of-sum degenerate case failed");
        }
    }

    // KDK sandwich bound
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t m = 2 + t % 3, n = 3 + t % 2;
        Mat<double> k = random_mat(m, n, rng, 2.0);
        Mat<double> h = random_mat(m, n, rng, 1.0);
        double nk = fro_norm(k);
        if (nk == 0) continue;
        double nh0 = fro_norm(h);
        if (nh0 > 0) h = h * (0.4 * nk / nh0);

        Mat<double> raw = random_mat(n, n, rng, 1.0);
        SymMat<double> d = SymMat<double>::lower_of(raw * raw.transposed());
        for (std::size_t i = 0; i < n; ++i) d.at(i, i) += 0.5;
        Mat<double> dinv = inverse(d);
        double ndinv = fro_norm(dinv);
        Mat<double> delta = random_mat(n, n, rng, 1.0);
        delta = delta + delta.transposed();
        double nd0 = fro_norm(delta);
        if (nd0 > 0) delta = delta * (0.4 / (ndinv * nd0));
        double ndelta = fro_norm(delta);

        Mat<double> dpd_inv;
        try {
            dpd_inv = inverse(SymMat<double>::lower_of(d.dense() + delta));
        } catch (const SingularBlockError&) {
            ++rep.violations;
            rep.notes.push_back("KDK: D+Delta singular under the hypothesis");
            continue;
        }
        Mat<double> kh = k + h;
        Mat<double> lhs = kh * dpd_inv * kh.transposed() - k * dinv * k.transposed();
        double bound =
            0.5 * nk * ndinv * (9.0 * nk * ndinv * ndelta + 5.0 * fro_norm(h));
        ++rep.trials;
        if (fro_norm(lhs) > bound * (1 + 1e-9) + 1e-12) {
            ++rep.violations;
            rep.notes.push_back("KDK bound violated");
        }
    }

    // degenerate case D = I, Delta = 0, H = 0 -> LHS 0
    {
        Mat<double> k{{1.0, 2.0}, {0.0, 1.0}};
        Mat<double> lhs = k * k.transposed() - k * k.transposed();
        ++rep.trials;
        if (fro_norm(lhs) != 0.0) {
            ++rep.violations;
            rep.notes.push_back("KDK degenerate case failed");
        }
    }

    // negative-off-diagonal rank lemma
    std::uniform_int_distribution<int> wdist(1, 9);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = 3 + t % 4;
        if (t % 2 == 0) {
            // weighted complete-graph Laplacian: PSD, all off-diagonal negative,
            // exact rank n-1, null spanned by the all-ones (positive) vector
            SymMat<Rational> lap(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    Rational w(wdist(rng));
                    lap.set(i, j, -w);
                    lap.at(i, i) += w;
                    lap.at(j, j) += w;
                }
            ++rep.trials;
            if (!psd_check(lap, Rational(0)).psd || numeric_rank(lap).rank != n - 1) {
                ++rep.violations;
                rep.notes.push_back("laplacian family: rank/PSD failed");
            }
        } else {
            // alpha I - P with P entrywise positive, alpha above the spectral
            // radius: full rank with entrywise-positive inverse
            std::uniform_real_distribution<double> pd(0.2, 1.0);
            SymMat<double> p(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) p.set(i, j, pd(rng));
            auto eig = jacobi_eigen(p, false);
            double alpha = std::max(std::fabs(eig.values.front()), eig.values.back()) * 1.2 + 0.1;
            SymMat<double> m = p * (-1.0);
            for (std::size_t i = 0; i < n; ++i) m.at(i, i) += alpha;
            ++rep.trials;
            bool ok = psd_check(m, 1e-10).psd && numeric_rank(m, 1e-9).rank == n;
            if (ok) {
                Mat<double> minv = inverse(m);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        if (!(minv(i, j) > 0)) ok = false;
            }
            if (!ok) {
                ++rep.violations;
                rep.notes.push_back("positive-matrix family: inverse positivity failed");
            }
        }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// small completion search

CompletionSearchResult small_completion_search(const PartialMatrix& pm, std::size_t r,
                                               const GridSpec& grid) {
    const std::size_t n = pm.n;
    CompletionSearchResult res;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (!pm.specified.count({i, j})) res.unknown_positions.push_back({i, j});
    const std::size_t k = res.unknown_positions.size();
    if (k > 6) throw TooManyUnknowns("small_completion_search: more than 6 unknowns");

    SymMat<double> base(n);
    for (const auto& [pair, val] : pm.specified) {
        base.set(pair.first, pair.second, val.to_double());
        if (pair.first != pair.second) continue;
    }

    auto score_at = [&](const std::vector<double>& x) {
        SymMat<double> m = base;
        for (std::size_t t = 0; t < k; ++t)
            m.set(res.unknown_positions[t].first, res.unknown_positions[t].second, x[t]);
        auto eig = jacobi_eigen(m, false);
        double neg = std::max(0.0, -eig.values.front());
        // (r+1)-th singular value
        std::vector<double> sing(eig.values.size());
        for (std::size_t i = 0; i < sing.size(); ++i) sing[i] = std::fabs(eig.values[i]);
        std::sort(sing.begin(), sing.end(), std::greater<double>());
        double tail = r < sing.size() ? sing[r] : 0.0;
        return neg + tail;
    };

    // grid resolution shrinks with dimension to respect the combo cap
    std::size_t pts = grid.points;
    while (pts > 3 && std::pow(static_cast<double>(pts), static_cast<double>(k)) >
                          static_cast<double>(grid.combo_cap))
        --pts;

    std::vector<double> best;
    double best_score = std::numeric_limits<double>::infinity();
    if (k == 0) {
        best_score = score_at({});
    } else {
        std::vector<std::size_t> idx(k, 0);
        while (true) {
            std::vector<double> x(k);
            for (std::size_t t = 0; t < k; ++t)
                x[t] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(idx[t]) /
                                     static_cast<double>(pts - 1);
            double sc = score_at(x);
            if (sc < best_score) {
                best_score = sc;
                best = x;
            }
            std::size_t c = 0;
            while (c < k && ++idx[c] == pts) idx[c++] = 0;
            if (c == k) break;
        }

        // coordinate pattern search refinement
        double step = (grid.hi - grid.lo) / static_cast<double>(pts - 1);
        for (std::size_t it = 0; it < grid.refine_iters; ++it) {
            bool improved = false;
            for (std::size_t t = 0; t < k; ++t) {
                for (double dir : {-1.0, 1.0}) {
                    auto cand = best;
                    cand[t] += dir * step;
                    double sc = score_at(cand);
                    if (sc < best_score) {
                        best_score = sc;
                        best = cand;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
            if (step < 1e-12) break;
        }
    }

    res.unknown_values = best;
    res.score = best_score;
    SymMat<double> m = base;
    for (std::size_t t = 0; t < k; ++t)
        m.set(res.unknown_positions[t].first, res.unknown_positions[t].second, best[t]);
    res.completion = m;
    res.psd = psd_check(m, 1e-6).psd;
    res.rank = numeric_rank_abs(m, 1e-5).rank;
    return res;
}

}  // namespace lrpd
