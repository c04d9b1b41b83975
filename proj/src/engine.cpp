#include "ctq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace ctq {

uint64_t effective_dims(const InvertedIndex& index, const SparseVector& query) {
    return std::max<uint64_t>(index.dims(), query.dim_bound());
}

namespace {

// Tracks whether every support cursor sits on a hull vertex; when it does,
// the current position is a boundary position and the epsilon snapshot is
// taken there.
class BoundaryTracker {
public:
    explicit BoundaryTracker(const std::vector<std::vector<uint64_t>>& hulls)
        : hulls_(hulls), segment_(hulls.size(), 0), at_vertex_(hulls.size(), 1) {
        // position 0 is vertex 0 on every hull, so the start is a boundary
    }

    void advanced(size_t i, uint64_t pos) {
        const auto& v = hulls_[i];
        bool was = at_vertex_[i];
        bool now = false;
        if (segment_[i] + 1 < v.size() && pos == v[segment_[i] + 1]) {
            ++segment_[i];
            now = true;
        }
        at_vertex_[i] = now;
        if (was && !now) ++off_count_;
        if (!was && now) --off_count_;
    }

    bool at_boundary() const { return off_count_ == 0; }

private:
    const std::vector<std::vector<uint64_t>>& hulls_;
    std::vector<size_t> segment_;
    std::vector<char> at_vertex_;
    size_t off_count_ = 0;
};

std::unique_ptr<TraversalStrategy> make_strategy(Strategy kind, const Frontier& frontier,
                                                 const DecomposableScore& score,
                                                 const std::vector<std::vector<uint64_t>>& hulls) {
    switch (kind) {
        case Strategy::Lockstep:
            return std::make_unique<LockstepStrategy>();
        case Strategy::MaxReduction:
            return std::make_unique<MaxReductionStrategy>(score);
        case Strategy::Hull: {
            std::vector<std::vector<double>> rates(hulls.size());
            for (size_t i = 0; i < hulls.size(); ++i) {
                if (!frontier.lists[i]) continue;
                rates[i] = hull_deltas(*frontier.lists[i], hulls[i], frontier.weights[i], score);
            }
            return std::make_unique<HullStrategy>(frontier, hulls, std::move(rates));
        }
    }
    throw Error(ErrorCode::UnknownStrategy, "unknown traversal strategy");
}

}  // namespace

GatherResult gather(const InvertedIndex& index, const Query& q, const GatherOptions& options) {
    const double tau_tilde = options.tau_tilde > 0.0 ? options.tau_tilde : 1.0 / q.theta;
    const DecomposableScore f_tilde = DecomposableScore::capped_cosine(tau_tilde);
    const DecomposableScore strategy_score = options.stop == StopKind::Tight
                                                 ? f_tilde
                                                 : DecomposableScore::inner_product();

    GatherResult result;
    result.frontier = Frontier::open(index, q);
    Frontier& frontier = result.frontier;
    const size_t m = frontier.size();

    // Hulls driving both the strategy and the boundary bookkeeping: the
    // precomputed ones for inner product, their capped projections for the
    // tight (cosine) stop.
    std::vector<std::vector<uint64_t>> hulls(m);
    for (size_t i = 0; i < m; ++i) {
        const HullIndex* h = index.hull(frontier.dims[i]);
        if (!h) {
            hulls[i] = {0};
            continue;
        }
        if (strategy_score.kind == DecomposableScore::Kind::CappedCosine)
            hulls[i] = project_hull(*frontier.lists[i], *h, frontier.weights[i], tau_tilde);
        else
            hulls[i] = h->vertices;
    }

    for (size_t i = 0; i < m; ++i) {
        for (size_t k = 1; k < hulls[i].size(); ++k)
            result.metrics.strategy_hull_gap =
                std::max(result.metrics.strategy_hull_gap, hulls[i][k] - hulls[i][k - 1]);
    }

    std::vector<double> bounds(m);
    for (size_t i = 0; i < m; ++i) bounds[i] = frontier.bound(i);
    uint64_t zero_dims = effective_dims(index, q.vector) - m;
    TauState tau(frontier.weights, bounds, zero_dims);

    double baseline_sum = 0.0, f_tilde_sum = 0.0;
    size_t live = 0;
    for (size_t i = 0; i < m; ++i) {
        baseline_sum += frontier.weights[i] * bounds[i];
        f_tilde_sum += f_tilde.component(frontier.weights[i], bounds[i]);
        if (!frontier.exhausted(i)) ++live;
    }

    auto strategy = make_strategy(options.strategy, frontier, strategy_score, hulls);
    BoundaryTracker tracker(hulls);

    GatherMetrics& metrics = result.metrics;
    uint64_t boundary_total = 0;
    {
        TauResult r = tau.compute();
        metrics.ms_at_boundary = r.infeasible ? 0.0 : r.ms;
        metrics.f_tilde_at_boundary = f_tilde_sum;
    }
    // Boundary snapshots feed the epsilon bound only once the position has
    // survived a stop test; a boundary where the stop fires is not the start
    // of a chosen segment.
    bool pending_boundary = false;
    double pending_ms = 0.0, pending_f_tilde = 0.0;

    std::vector<char> in_pool(index.size(), 0);
    const double eff = effective_theta(q.theta);

    while (true) {
        bool stop;
        if (options.stop == StopKind::Baseline) {
            stop = baseline_sum < eff;
        } else {
            TauResult r = tau.compute();
            stop = r.infeasible || r.ms < eff;
        }
        if (!stop && pending_boundary) {
            metrics.ms_at_boundary = pending_ms;
            metrics.f_tilde_at_boundary = pending_f_tilde;
            pending_boundary = false;
        }
        if (stop) break;
        if (live == 0) {
            metrics.stopped_by_exhaustion = true;
            break;
        }

        size_t i = strategy->next(frontier);
        double old_bound = frontier.bound(i);
        const Posting& p = frontier.advance(i);
        if (!in_pool[p.ref]) {
            in_pool[p.ref] = 1;
            result.pool.push_back(p.ref);
        }
        if (options.record_path) result.path.push_back(i);

        double new_bound = frontier.bound(i);
        if (frontier.exhausted(i)) --live;
        tau.update(i, new_bound);
        baseline_sum += frontier.weights[i] * (new_bound - old_bound);
        f_tilde_sum += f_tilde.component(frontier.weights[i], new_bound) -
                       f_tilde.component(frontier.weights[i], old_bound);
        strategy->advanced(frontier, i);
        tracker.advanced(i, frontier.pos[i]);
        if (tracker.at_boundary()) {
            boundary_total = frontier.total;
            TauResult r = tau.compute();
            pending_ms = r.infeasible ? 0.0 : r.ms;
            pending_f_tilde = f_tilde_sum;
            pending_boundary = true;
        }
    }

    metrics.access_cost = frontier.total;
    metrics.candidate_count = result.pool.size();
    metrics.last_gap = frontier.total - boundary_total;
    metrics.epsilon_upper =
        epsilon_bound(metrics.ms_at_boundary, metrics.f_tilde_at_boundary, tau_tilde);
    return result;
}

namespace {

void fill_stats_from_gather(QueryStats& stats, const InvertedIndex& index,
                            const GatherResult& gathered) {
    stats.access_cost = gathered.metrics.access_cost;
    stats.candidate_count = gathered.metrics.candidate_count;
    stats.last_gap = gathered.metrics.last_gap;
    stats.epsilon_upper = gathered.metrics.epsilon_upper;
    stats.candidates.reserve(gathered.pool.size());
    for (uint64_t ref : gathered.pool) stats.candidates.push_back(index.vector(ref).vector.id());
    std::sort(stats.candidates.begin(), stats.candidates.end());
}

void sort_matches(std::vector<Match>& matches) {
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

}  // namespace

std::vector<Match> run_query(const InvertedIndex& index, const SparseVector& query, double theta,
                             const QueryOptions& options, QueryStats* stats) {
    auto started = std::chrono::steady_clock::now();
    Query q = Query::make(normalize(query), theta);

    GatherOptions gopts;
    gopts.strategy = options.strategy;
    gopts.stop = options.stop;
    gopts.tau_tilde = options.tau_tilde;
    GatherResult gathered = gather(index, q, gopts);

    VerifyContext ctx(q.vector, effective_dims(index, q.vector));
    std::vector<uint64_t> pool = gathered.pool;
    std::sort(pool.begin(), pool.end());

    std::vector<Match> matches;
    uint64_t verification_accesses = 0;
    for (uint64_t ref : pool) {
        const StoredVector& sv = index.vector(ref);
        VerifyOutcome outcome = verify_candidate(sv, ctx, theta);
        verification_accesses += outcome.accesses;
        if (outcome.accept) matches.push_back({ref, sv.vector.id(), exact_cosine(sv, ctx)});
    }
    sort_matches(matches);

    if (stats) {
        fill_stats_from_gather(*stats, index, gathered);
        stats->verification_accesses = verification_accesses;
        stats->result_count = matches.size();
        if (options.opt_budget > 0) {
            try {
                OptCost opt = brute_force_opt(index, q, options.stop, options.opt_budget);
                stats->opt_cost = static_cast<int64_t>(opt.opt);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::InstanceTooLarge) throw;
                stats->opt_cost = -1;
            }
        }
        stats->wall_time_micros = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                                  started)
                .count());
    }
    return matches;
}

std::vector<Match> run_topk(const InvertedIndex& index, const SparseVector& query, size_t k,
                            const TopKOptions& options, QueryStats* stats) {
    auto started = std::chrono::steady_clock::now();
    if (k == 0) throw Error(ErrorCode::BadArgument, "k must be at least 1");
    SparseVector unit = normalize(query);
    // Theta only anchors the Query shell; the moving threshold below drives
    // the stop.
    Query q = Query::make(unit, 1.0);

    Frontier frontier = Frontier::open(index, q);
    const size_t m = frontier.size();
    std::vector<std::vector<uint64_t>> hulls(m);
    DecomposableScore score = options.tau_tilde > 0.0
                                  ? DecomposableScore::capped_cosine(options.tau_tilde)
                                  : DecomposableScore::inner_product();
    for (size_t i = 0; i < m; ++i) {
        const HullIndex* h = index.hull(frontier.dims[i]);
        if (!h) {
            hulls[i] = {0};
        } else if (score.kind == DecomposableScore::Kind::CappedCosine) {
            hulls[i] = project_hull(*frontier.lists[i], *h, frontier.weights[i],
                                    options.tau_tilde);
        } else {
            hulls[i] = h->vertices;
        }
    }

    std::vector<double> bounds(m);
    for (size_t i = 0; i < m; ++i) bounds[i] = frontier.bound(i);
    uint64_t zero_dims = effective_dims(index, unit) - m;
    TauState tau(frontier.weights, bounds, zero_dims);
    auto strategy = make_strategy(options.strategy, frontier, score, hulls);

    VerifyContext ctx(unit, effective_dims(index, unit));
    std::vector<char> in_pool(index.size(), 0);
    std::vector<Match> pool;
    uint64_t verification_accesses = 0;
    // k-th best exact score among gathered candidates; -inf until k gathered
    // so the stop cannot fire early.
    std::priority_queue<double, std::vector<double>, std::greater<>> best;

    size_t live = 0;
    for (size_t i = 0; i < m; ++i)
        if (!frontier.exhausted(i)) ++live;

    while (true) {
        double theta_k = best.size() >= k ? best.top()
                                          : -std::numeric_limits<double>::infinity();
        TauResult r = tau.compute();
        double ms = r.infeasible ? 0.0 : r.ms;
        if (ms < theta_k - kThetaRelSlack) break;
        if (live == 0) break;

        size_t i = strategy->next(frontier);
        const Posting& p = frontier.advance(i);
        if (frontier.exhausted(i)) --live;
        tau.update(i, frontier.bound(i));
        strategy->advanced(frontier, i);
        if (!in_pool[p.ref]) {
            in_pool[p.ref] = 1;
            const StoredVector& sv = index.vector(p.ref);
            double s = exact_cosine(sv, ctx);
            verification_accesses += sv.vector.nnz();
            pool.push_back({p.ref, sv.vector.id(), s});
            if (best.size() < k) {
                best.push(s);
            } else if (s > best.top()) {
                best.pop();
                best.push(s);
            }
        }
    }

    if (stats) {
        stats->access_cost = frontier.total;
        stats->candidate_count = pool.size();
        stats->verification_accesses = verification_accesses;
        stats->candidates.reserve(pool.size());
        for (const Match& match : pool) stats->candidates.push_back(match.id);
        std::sort(stats->candidates.begin(), stats->candidates.end());
    }
    if (pool.size() < k) {
        // Exhausted gathering with fewer than k candidates: every remaining
        // vector shares no support dim with the query and scores 0.
        for (uint64_t ref = 0; ref < index.size(); ++ref) {
            if (in_pool[ref]) continue;
            const StoredVector& sv = index.vector(ref);
            pool.push_back({ref, sv.vector.id(), exact_cosine(sv, ctx)});
        }
    }
    sort_matches(pool);
    if (pool.size() > k) pool.resize(k);
    if (stats) {
        stats->result_count = pool.size();
        stats->wall_time_micros = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                                  started)
                .count());
    }
    return pool;
}

std::vector<Match> linear_scan(const InvertedIndex& index, const SparseVector& query,
                               double theta) {
    SparseVector unit = normalize(query);
    VerifyContext ctx(unit, effective_dims(index, unit));
    std::vector<Match> matches;
    for (uint64_t ref = 0; ref < index.size(); ++ref) {
        const StoredVector& sv = index.vector(ref);
        double score = exact_cosine(sv, ctx);
        if (meets_threshold(score, theta)) matches.push_back({ref, sv.vector.id(), score});
    }
    sort_matches(matches);
    return matches;
}

OptCost brute_force_opt(const InvertedIndex& index, const Query& q, StopKind stop,
                        uint64_t max_positions) {
    Frontier frontier = Frontier::open(index, q);
    const size_t m = frontier.size();
    uint64_t positions = 1;
    for (size_t i = 0; i < m; ++i) {
        uint64_t radix = frontier.list_size(i) + 1;
        if (positions > max_positions / radix)
            throw Error(ErrorCode::InstanceTooLarge,
                        "cursor lattice exceeds " + std::to_string(max_positions) + " positions");
        positions *= radix;
    }

    uint64_t zero_dims = effective_dims(index, q.vector) - m;
    const double eff = effective_theta(q.theta);
    std::vector<uint64_t> pos(m, 0);
    std::vector<double> bounds(m);
    OptCost best;
    best.opt = std::numeric_limits<uint64_t>::max();

    while (true) {
        uint64_t total = 0;
        bool interior = true;
        for (size_t i = 0; i < m; ++i) {
            total += pos[i];
            uint64_t size = frontier.list_size(i);
            if (pos[i] >= size) {
                bounds[i] = 0.0;
                if (size > 0) interior = false;
            } else {
                bounds[i] = pos[i] == 0 ? 1.0 : frontier.lists[i]->value_at(pos[i]);
            }
        }
        bool stops;
        if (stop == StopKind::Baseline) {
            double sum = 0.0;
            for (size_t i = 0; i < m; ++i) sum += frontier.weights[i] * bounds[i];
            stops = sum < eff;
        } else {
            TauResult r = solve_tau_direct(frontier.weights, bounds, zero_dims);
            stops = r.infeasible || r.ms < eff;
        }
        if (stops) {
            if (total < best.opt) {
                best.opt = total;
                best.interior = interior;
            } else if (total == best.opt && interior) {
                best.interior = true;
            }
        }
        // next lattice position (mixed radix)
        size_t i = 0;
        for (; i < m; ++i) {
            if (pos[i] < frontier.list_size(i)) {
                ++pos[i];
                break;
            }
            pos[i] = 0;
        }
        if (i == m) break;
    }
    if (best.opt == std::numeric_limits<uint64_t>::max()) {
        // The all-zero bounds position always satisfies both stops for any
        // theta > 0, so this is unreachable; keep a defined value anyway.
        best.opt = 0;
        for (size_t i = 0; i < m; ++i) best.opt += frontier.list_size(i);
        best.interior = false;
    }
    return best;
}

}  // namespace ctq
