// Acceptance gate: exercises the end-to-end guarantees of the library and
// prints one PASS/FAIL line per criterion. Exit code 0 only if every
// criterion passes. Heavy training-based criteria run last; progress is
// printed as each criterion finishes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfreg/checkpoint.hpp"
#include "rfreg/erf.hpp"
#include "rfreg/threading.hpp"
#include "rfreg/train.hpp"
#include "test_support.hpp"

using namespace rfreg;

namespace {

struct Criterion {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& title, bool pass, const std::string& detail) {
    g_results.push_back({id, title, pass, detail});
    std::printf("criterion %d: %s — %s (%s)\n", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
void criterion_decomp_counts() {
    long decomposed = decomp_param_count(128, 128, 3, 4, false);
    long dense = 128L * 128L * 3L * 3L;
    auto blk = decompose_layer(128, 128, 3, 4);
    bool ok = decomposed == 17408 && dense == 147456 &&
              static_cast<long>(blk.weight_count()) == decomposed;
    std::ostringstream d;
    d << "decomposed 128->128 k3 Z4 weights = " << decomposed << " (want 17408, built "
      << blk.weight_count() << "), dense = " << dense << " (want 147456)";
    record(1, "decomposed conv weight counts match the closed form exactly", ok, d.str());
}

// ---------------------------------------------------------------- criterion 2
void criterion_width_ratios() {
    ArchSpec s128, s64, s32;
    s64.base_channels = 64;
    s32.base_channels = 32;
    long p128 = summarize(build(s128)).total_params;
    long p64 = summarize(build(s64)).total_params;
    long p32 = summarize(build(s32)).total_params;
    double r64 = static_cast<double>(p64) / p128;
    double r32 = static_cast<double>(p32) / p128;
    bool ok = r64 >= 0.24 && r64 <= 0.28 && r32 >= 0.055 && r32 <= 0.075;
    std::ostringstream d;
    d << "p64/p128 = " << r64 << " in [0.24,0.28], p32/p128 = " << r32 << " in [0.055,0.075]";
    record(2, "width restriction shrinks parameters near-quadratically", ok, d.str());
}

// ---------------------------------------------------------------- criterion 3
void criterion_prune_schedule() {
    bool ok = true;
    std::ostringstream d;

    int E = 100;
    long total = 2000000, target = 400000, n_final = total - target;
    double gamma = prune_gamma(E);
    ok &= std::fabs(1.0 - std::pow(gamma, E) - 0.999) < 1e-9;
    ok &= schedule_pruned_count(0, total, target, E, gamma) == 0;
    ok &= schedule_pruned_count(E, total, target, E, gamma) == n_final;
    ok &= schedule_pruned_count(E + 50, total, target, E, gamma) == n_final;
    long prev_inc = -1;
    long prev = 0, first_inc = 0, last_inc = 0;
    bool monotone = true;
    for (int e = 1; e <= E; ++e) {
        long s = schedule_pruned_count(e, total, target, E, gamma);
        long inc = s - prev;
        if (inc < 0) monotone = false;
        if (prev_inc >= 0 && inc > prev_inc) monotone = false;
        if (e == 1) first_inc = inc;
        if (e == E) last_inc = inc;
        prev_inc = inc;
        prev = s;
    }
    ok &= monotone && first_inc > last_inc;
    d << "gamma = " << gamma << ", endpoints exact, increments " << first_inc << " -> " << last_inc
      << (monotone ? " non-increasing" : " NOT monotone");

    // End-to-end: a short pruned run must land on the target count exactly and
    // follow the schedule at every epoch.
    ExperimentConfig cfg;
    cfg.name = "accept_prune";
    cfg.report_dir = "acceptance_runs";
    cfg.arch.base_channels = 8;
    cfg.arch.num_blocks = 2;
    cfg.arch.rho = 3;
    cfg.arch.num_classes = 4;
    cfg.data.synth.num_classes = 4;
    cfg.data.synth.n_train_per_class = 8;
    cfg.data.synth.n_test_per_class = 4;
    cfg.data.synth.time_frames = 32;
    cfg.data.synth.n_mels = 32;
    cfg.optimizer.epochs = 8;
    cfg.optimizer.warmup_epochs = 2;
    cfg.optimizer.batch_size = 8;
    cfg.prune.enabled = true;
    cfg.prune.ramp_epochs = 6;

    Network probe = build(cfg.arch);
    PruneState ps;
    ps.target_nonzero = 0;
    init_prune_state(ps, probe);
    long mtotal = summarize(probe).total_params;
    long dense = mtotal - ps.total_prunable;
    cfg.prune.target_nonzero = dense + ps.total_prunable / 2;
    long prunable_target = cfg.prune.target_nonzero - dense;

    auto rec = run(cfg);
    double g2 = prune_gamma(cfg.prune.ramp_epochs);
    bool tracks = rec.epochs.size() == 8;
    for (const auto& es : rec.epochs) {
        long planned =
            schedule_pruned_count(es.epoch, ps.total_prunable, prunable_target, cfg.prune.ramp_epochs, g2);
        if (es.nonzero_params != mtotal - planned) tracks = false;
    }
    bool lands = rec.summary.nonzero_params == cfg.prune.target_nonzero;
    ok &= tracks && lands;
    d << "; trained run " << (tracks ? "tracks schedule" : "DEVIATES") << ", final nonzero "
      << rec.summary.nonzero_params << " (target " << cfg.prune.target_nonzero << ")";
    record(3, "pruning ramp endpoints, monotone increments, end-to-end count", ok, d.str());
}

// ---------------------------------------------------------------- criterion 4
void criterion_damping_identity() {
    bool ok = true;
    std::ostringstream d;

    DampingSpec freq;
    freq.enabled = true;
    freq.lambda = 0.1f;
    auto prof = build_damping_matrix(1, 3, freq);
    ok &= std::fabs(prof.at(0, 0) - 0.1f) < 1e-7 && std::fabs(prof.at(0, 1) - 1.0f) < 1e-7 &&
          std::fabs(prof.at(0, 2) - 0.1f) < 1e-7;
    d << "k=3 profile [" << prof.at(0, 0) << "," << prof.at(0, 1) << "," << prof.at(0, 2) << "]";

    // lambda = 1 must be a bitwise no-op.
    DampingSpec unit = freq;
    unit.lambda = 1.0f;
    auto ones = build_damping_matrix(3, 3, unit);
    for (float v : ones.values) ok &= v == 1.0f;
    ConvLayer l = make_conv(3, 4, 3, 3, {1, 1, 1, 1});
    auto x = make_tensor({2, 3, 9, 9});
    std::mt19937_64 rng(41);
    testsup::fill_normal(*l.weight, rng);
    testsup::fill_normal(*l.bias, rng);
    testsup::fill_normal(*x, rng);
    auto ya = conv2d(nullptr, x, l);
    auto yb = damped_conv2d(nullptr, x, l, ones);
    bool bitwise = ya->numel() == yb->numel() &&
                   std::memcmp(ya->data(), yb->data(), ya->numel() * sizeof(float)) == 0;
    ok &= bitwise;
    d << "; lambda=1 conv " << (bitwise ? "bitwise identical" : "DIFFERS");

    // Damping must never change the parameter count.
    bool counts = true;
    for (int rho : {0, 7, 12}) {
        ArchSpec a, b;
        a.base_channels = b.base_channels = 16;
        a.rho = b.rho = rho;
        b.damping.enabled = true;
        if (summarize(build(a)).total_params != summarize(build(b)).total_params) counts = false;
    }
    ok &= counts;
    d << "; param counts " << (counts ? "unchanged for rho {0,7,12}" : "CHANGED");
    record(4, "damping profile shape, lambda=1 identity, count invariance", ok, d.str());
}

// ---------------------------------------------------------------- criterion 5
void criterion_gradients() {
    const double tol = 1e-3;
    double worst = 0.0;
    std::size_t total_checked = 0;
    bool ok = true;
    auto note = [&](const testsup::GradCheckResult& r) {
        worst = std::max(worst, r.max_rel_err);
        total_checked += r.checked;
        if (r.max_rel_err > tol) ok = false;
    };
    std::mt19937_64 rng(7);

    // plain conv, three geometries incl. stride and no padding
    struct ConvCase { int n, ci, t, f, co, k, s, p; };
    for (auto [n, ci, t, f, co, k, s, p] :
         std::vector<ConvCase>{{1, 2, 6, 7, 3, 3, 1, 1}, {2, 3, 8, 6, 4, 3, 2, 1}, {1, 1, 5, 5, 2, 1, 1, 0}}) {
        ConvLayer l = make_conv(ci, co, k, k, {s, s, p, p});
        auto x = make_tensor({n, ci, t, f});
        testsup::fill_normal(*l.weight, rng);
        testsup::fill_normal(*l.bias, rng);
        testsup::fill_normal(*x, rng);
        note(testsup::check_gradients([&](Tape* tp) { return conv2d(tp, x, l); },
                                      {l.weight, l.bias, x}, 11));
    }

    // damped conv: frequency, time, and both axes
    for (DampAxis axis : {DampAxis::frequency, DampAxis::time, DampAxis::both}) {
        DampingSpec spec;
        spec.enabled = true;
        spec.lambda = 0.1f;
        spec.axis = axis;
        auto C = build_damping_matrix(3, 3, spec);
        ConvLayer l = make_conv(2, 3, 3, 3, {1, 1, 1, 1});
        auto x = make_tensor({2, 2, 6, 6});
        testsup::fill_normal(*l.weight, rng);
        testsup::fill_normal(*l.bias, rng);
        testsup::fill_normal(*x, rng);
        note(testsup::check_gradients([&](Tape* tp) { return damped_conv2d(tp, x, l, C); },
                                      {l.weight, l.bias, x}, 13));
    }

    // decomposed conv
    struct DecCase { int ci, co, k, z; };
    for (auto [ci, co, k, z] : std::vector<DecCase>{{4, 8, 3, 2}, {6, 6, 3, 3}, {8, 8, 3, 4}}) {
        auto blk = decompose_layer(ci, co, k, z, {1, 1, 1, 1});
        auto x = make_tensor({1, ci, 6, 6});
        testsup::fill_normal(*blk.reduce.weight, rng, 0.4f);
        testsup::fill_normal(*blk.core.weight, rng, 0.4f);
        testsup::fill_normal(*blk.expand.weight, rng, 0.4f);
        testsup::fill_normal(*x, rng);
        note(testsup::check_gradients([&](Tape* tp) { return decomposed_forward(tp, x, blk); },
                                      {blk.reduce.weight, blk.core.weight, blk.expand.weight, x}, 17));
    }

    // batchnorm (train mode)
    for (int c : {2, 3, 5}) {
        BatchNorm bn = make_batchnorm(c);
        auto x = make_tensor({2, c, 4, 5});
        testsup::fill_normal(*bn.gamma, rng, 0.3f);
        for (std::size_t i = 0; i < bn.gamma->numel(); ++i) bn.gamma->at(i) += 1.0f;
        testsup::fill_normal(*bn.beta, rng, 0.3f);
        testsup::fill_normal(*x, rng);
        note(testsup::check_gradients([&](Tape* tp) { return batchnorm2d(tp, x, bn, true); },
                                      {bn.gamma, bn.beta, x}, 19));
    }

    // linear classifier head
    struct LinCase { int n, c, k; };
    for (auto [n, c, k] : std::vector<LinCase>{{2, 5, 3}, {1, 7, 4}, {3, 2, 6}}) {
        auto x = make_tensor({n, c});
        auto w = make_tensor({k, c});
        auto b = make_tensor({k});
        testsup::fill_normal(*x, rng);
        testsup::fill_normal(*w, rng);
        testsup::fill_normal(*b, rng);
        note(testsup::check_gradients([&](Tape* tp) { return linear(tp, x, w, b); }, {w, b, x}, 23));
    }

    // pooling: average is smooth; max needs well-separated inputs so the
    // argmax cannot flip inside the finite-difference step
    struct PoolCase { int n, c, t, k, s; };
    for (auto [n, c, t, k, s] : std::vector<PoolCase>{{1, 2, 6, 2, 2}, {2, 1, 8, 2, 2}, {1, 3, 9, 3, 3}}) {
        auto xa = make_tensor({n, c, t, t});
        testsup::fill_normal(*xa, rng);
        note(testsup::check_gradients([&](Tape* tp) { return avg_pool2d(tp, xa, k, s); }, {xa}, 29));

        auto xm = make_tensor({n, c, t, t});
        std::vector<std::size_t> order(xm->numel());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t j = 0; j < order.size(); ++j)
            xm->at(order[j]) = -2.0f + 0.05f * static_cast<float>(j);
        note(testsup::check_gradients([&](Tape* tp) { return max_pool2d(tp, xm, k, s); }, {xm}, 31));
    }

    // softmax cross-entropy loss
    struct CeCase { int n, k; };
    for (auto [n, k] : std::vector<CeCase>{{2, 4}, {3, 5}, {1, 2}}) {
        auto logits = make_tensor({n, k});
        testsup::fill_normal(*logits, rng);
        std::vector<int> labels(n);
        std::uniform_int_distribution<int> dl(0, k - 1);
        for (auto& y : labels) y = dl(rng);
        note(testsup::check_gradients(
            [&](Tape* tp) { return softmax_cross_entropy(tp, logits, labels); }, {logits}, 37));
    }

    std::ostringstream d;
    d << "max rel err " << worst << " over " << total_checked << " coordinates, tolerance " << tol;
    record(5, "finite differences confirm every operator gradient", ok, d.str());
}

// ---------------------------------------------------------------- criterion 6
void criterion_rf_agreement() {
    bool ok = true;
    std::ostringstream d;

    std::mt19937_64 rng(53);
    std::uniform_int_distribution<int> drho(0, 12), dblocks(1, 3), dbase(3, 6);
    int agree = 0;
    for (int trial = 0; trial < 20; ++trial) {
        ArchSpec spec;
        spec.base_channels = dbase(rng);
        spec.num_blocks = dblocks(rng);
        spec.rho = drho(rng);
        Network net = build(spec);
        auto geoms = net.geometry();
        auto rf = max_rf(geoms);
        auto [st, sf] = testsup::linear_support_extent(geoms);
        if (st == rf.rf_t && sf == rf.rf_f) ++agree;
        else ok = false;
    }
    d << agree << "/20 random architectures: gradient support == analytic rf";

    // rho must move the rf strictly upward across its whole range, and the
    // range must straddle [75, 150]
    ArchSpec spec;
    spec.base_channels = 4;
    int prev = 0, lo = 1 << 30, hi = 0;
    bool increasing = true;
    for (int rho = 0; rho <= kRhoMax; ++rho) {
        spec.rho = rho;
        auto rf = max_rf(build(spec).geometry());
        if (rho > 0 && rf.rf_f <= prev) increasing = false;
        prev = rf.rf_f;
        lo = std::min(lo, rf.rf_f);
        hi = std::max(hi, rf.rf_f);
    }
    ok &= increasing && lo <= 75 && hi >= 150;
    d << "; rho 0..12 rf " << (increasing ? "strictly increasing" : "NOT increasing") << ", range [" << lo
      << "," << hi << "] straddles [75,150]";
    record(6, "analytic receptive field equals measured gradient support", ok, d.str());
}

// Shared base for the training-driven criteria.
ExperimentConfig accept_train_cfg() {
    ExperimentConfig cfg;
    cfg.report_dir = "acceptance_runs";
    cfg.arch.base_channels = 16;
    cfg.arch.num_blocks = 6;
    cfg.arch.rho = 7;
    cfg.arch.num_classes = 4;
    cfg.data.synth.num_classes = 4;
    cfg.data.synth.n_train_per_class = 24;
    cfg.data.synth.n_test_per_class = 16;
    cfg.data.synth.time_frames = 32;
    cfg.data.synth.n_mels = 32;
    cfg.data.synth.difficulty = 0.5f;
    cfg.optimizer.lr = 0.02f;
    cfg.optimizer.momentum = 0.9f;
    cfg.optimizer.weight_decay = 5e-4f;
    cfg.optimizer.warmup_epochs = 2;
    cfg.optimizer.batch_size = 16;
    cfg.optimizer.epochs = 30;
    return cfg;
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism() {
    set_num_threads(1);
    auto cfg = accept_train_cfg();
    cfg.name = "accept_det";
    cfg.arch.base_channels = 8;
    cfg.arch.num_blocks = 2;
    cfg.arch.rho = 3;
    cfg.data.synth.n_train_per_class = 8;
    cfg.data.synth.n_test_per_class = 4;
    cfg.optimizer.epochs = 3;
    auto r1 = run(cfg);
    std::string rec1 = slurp(r1.record_path), ck1 = slurp(r1.checkpoint_path);
    auto r2 = run(cfg);
    bool ok = !rec1.empty() && !ck1.empty() && rec1 == slurp(r2.record_path) &&
              ck1 == slurp(r2.checkpoint_path);
    set_num_threads(0);
    std::ostringstream d;
    d << "single-thread rerun: record " << rec1.size() << " B and checkpoint " << ck1.size() << " B "
      << (ok ? "bitwise identical" : "DIFFER");
    record(9, "strict determinism reproduces record and checkpoint bitwise", ok, d.str());
}

// ---------------------------------------------------------------- criterion 7
void criterion_erf_shrinks() {
    auto t0 = std::chrono::steady_clock::now();
    int wins = 0;
    std::ostringstream d;
    d << "frequency erf width damped vs plain:";
    for (int pair = 0; pair < 10; ++pair) {
        auto cfg = accept_train_cfg();
        cfg.optimizer.epochs = 20;
        cfg.seed = 100 + pair;
        cfg.data.seed = 700 + pair;  // both variants of a pair see the same data

        int widths[2] = {0, 0};
        int side = 0;
        for (int v = 0; v < 2; ++v) {
            ExperimentConfig vc = apply_variant(cfg, v == 0 ? "plain" : "damped");
            vc.name = std::string("accept_erf_") + (v == 0 ? "plain" : "damped") + "_" +
                      std::to_string(pair);
            auto rec = run(vc);
            Network net = build(vc.arch);
            restore_network(net, load_checkpoint(rec.checkpoint_path), nullptr);
            if (side == 0) side = max_rf(net.geometry()).rf_t + 8;
            auto x = make_tensor({2, vc.arch.in_channels, side, side});
            std::mt19937_64 rng(900 + pair);
            testsup::fill_normal(*x, rng);
            widths[v] = measure_erf(net, x).width_f;
        }
        if (widths[1] <= widths[0]) ++wins;
        d << " " << widths[1] << "<=" << widths[0] << (widths[1] <= widths[0] ? "" : "!");
    }
    bool ok = wins >= 8;
    d << "; " << wins << "/10 pairs shrink (need >= 8), " << static_cast<int>(elapsed_s(t0)) << " s";
    record(7, "training with damping shrinks the measured frequency erf", ok, d.str());
}

// ---------------------------------------------------------------- criterion 8
void criterion_accuracy_ordering() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream d;

    // Part 1: damping vs plain, mean over rho 3..12 x 3 seeds on shared data.
    auto cfg = accept_train_cfg();
    cfg.name = "accept_sweep";
    cfg.sweep_rhos = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    cfg.sweep_variants = {"plain", "damped"};
    cfg.sweep_seeds = {1, 2, 3};
    auto cells = sweep(cfg);
    double sum_plain = 0, sum_damped = 0;
    int n_plain = 0, n_damped = 0;
    bool all_ok = true;
    for (const auto& c : cells) {
        if (!c.ok) { all_ok = false; continue; }
        if (c.variant == "plain") { sum_plain += c.final_accuracy; ++n_plain; }
        else { sum_damped += c.final_accuracy; ++n_damped; }
    }
    double mean_plain = n_plain ? sum_plain / n_plain : 0.0;
    double mean_damped = n_damped ? sum_damped / n_damped : 0.0;
    bool part1 = all_ok && n_plain == 30 && n_damped == 30 && mean_damped >= mean_plain;
    ok &= part1;
    d << "damped mean " << mean_damped << " vs plain " << mean_plain << " over rho 3..12 x 3 seeds";

    // Part 2: complexity-reduction strategies at a larger base width. The
    // gradually pruned wide model must beat the decomposed one, which must
    // beat plain width reduction.
    auto base2 = accept_train_cfg();
    base2.arch.base_channels = 128;
    base2.arch.num_blocks = 7;
    base2.data.synth.n_train_per_class = 16;
    base2.data.synth.difficulty = 0.7f;
    base2.optimizer.epochs = 18;
    base2.prune.target_nonzero = 400000;
    base2.prune.ramp_epochs = 12;
    base2.arch.decomp.Z = 4;

    const char* arms[3] = {"pruned", "decomp", "w64"};
    double means[3] = {0, 0, 0};
    long nonzeros[3] = {0, 0, 0};
    bool part2_ok = true;
    for (int a = 0; a < 3; ++a) {
        for (std::uint64_t seed : {1, 2, 3}) {
            ExperimentConfig vc = base2;
            if (a == 0) vc.prune.enabled = true;
            if (a == 1) vc.arch.decomp.enabled = true;
            if (a == 2) vc.arch.base_channels = 64;
            vc.seed = seed;
            vc.data.seed = 800 + seed;  // arms share data per seed
            vc.name = std::string("accept_arm_") + arms[a] + "_s" + std::to_string(seed);
            try {
                auto rec = run(vc);
                means[a] += rec.final_accuracy / 3.0;
                nonzeros[a] = rec.summary.nonzero_params;
            } catch (const std::exception& ex) {
                part2_ok = false;
                d << "; arm " << arms[a] << " failed: " << ex.what();
            }
        }
    }
    bool ordered = means[0] >= means[1] && means[1] >= means[2];
    bool budget = nonzeros[0] >= 250000 && nonzeros[0] <= 500000;
    ok &= part2_ok && ordered && budget;
    d << "; pruned " << means[0] << " (nonzero " << nonzeros[0] << ") >= decomposed " << means[1]
      << " (nonzero " << nonzeros[1] << ") >= width-64 " << means[2] << " (nonzero " << nonzeros[2]
      << "): " << (ordered ? "ordered" : "OUT OF ORDER");
    double secs = elapsed_s(t0);
    bool in_budget = secs < 4.0 * 3600.0;
    ok &= in_budget;
    d << "; wall " << static_cast<int>(secs) << " s (< 4 h: " << (in_budget ? "yes" : "NO") << ")";
    record(8, "damping and complexity-reduction accuracy ordering", ok, d.str());
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select a subset of criteria by number, e.g.
    // `acceptance 1 2 5`; with no arguments all nine run.
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    auto want = [&](int id) {
        return wanted.empty() || std::find(wanted.begin(), wanted.end(), id) != wanted.end();
    };

    auto t0 = std::chrono::steady_clock::now();
    if (want(1)) criterion_decomp_counts();
    if (want(2)) criterion_width_ratios();
    if (want(3)) criterion_prune_schedule();
    if (want(4)) criterion_damping_identity();
    if (want(5)) criterion_gradients();
    if (want(6)) criterion_rf_agreement();
    if (want(9)) criterion_determinism();
    if (want(7)) criterion_erf_shrinks();
    if (want(8)) criterion_accuracy_ordering();

    std::sort(g_results.begin(), g_results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    bool all = true;
    std::printf("\n==== acceptance summary (%d s) ====\n",
                static_cast<int>(elapsed_s(t0)));
    for (const auto& c : g_results) {
        all &= c.pass;
        std::printf("criterion %d: %s — %s\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str());
    }
    std::printf("overall: %s\n", all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}
