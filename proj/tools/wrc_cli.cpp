// wrc: command-line surface over the weighted reverse-convolution library.
//
// Exit codes: 0 success (and PASS for oracle-check), 2 validation/format/
// dimension errors, 3 numerical failures, 1 anything else.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wrc/wrc.hpp"

namespace {

struct WeightOpts {
    double w_const = 1.0;
    std::string w_file;
    double wlam_const = 0.1;
    std::string wlam_file;
    std::string predictor_w_file;
    std::string predictor_wlam_file;
    std::string weight_param = "log1p";
    double weight_bias = 0.0;
    std::string x0_policy = "bilinear";
    double eps = wrc::kFixedEps;
    bool eps_given = false;
};

void add_weight_flags(CLI::App* cmd, WeightOpts& o) {
    cmd->add_option("--w-const", o.w_const,
                    "constant data-fidelity weight |W|^2 (default 1)");
    cmd->add_option("--w-file", o.w_file, "data-fidelity weight field (WRCT)");
    cmd->add_option("--wlam-const", o.wlam_const,
                    "constant regularizer weight |W_lam|^2 (default 0.1)");
    cmd->add_option("--wlam-file", o.wlam_file, "regularizer weight field (WRCT)");
    cmd->add_option("--predictor-w", o.predictor_w_file,
                    "depthwise kernel predicting |W|^2 from the observation (WRCT)");
    cmd->add_option("--predictor-wlam", o.predictor_wlam_file,
                    "depthwise kernel predicting |W_lam|^2 from the prior (WRCT)");
    cmd->add_option("--weight-param", o.weight_param,
                    "predictor positivity map: none | softplus | log1p")
        ->check(CLI::IsMember({"none", "softplus", "log1p"}));
    cmd->add_option("--weight-bias", o.weight_bias,
                    "learnable-bias value feeding the epsilon guard");
    cmd->add_option("--x0", o.x0_policy, "prior: zero | bilinear | <file.wrct>");
    cmd->add_option("--eps", o.eps, "epsilon guard added to |W_lam|^2")
        ->check(CLI::NonNegativeNumber);
}

wrc::WeightParamMode parse_param_mode(const std::string& s) {
    if (s == "none") return wrc::WeightParamMode::None;
    if (s == "softplus") return wrc::WeightParamMode::Softplus;
    return wrc::WeightParamMode::Log1p;
}

wrc::FeatureMap make_x0(const std::string& policy, const wrc::FeatureMap& y,
                        std::size_t s) {
    if (policy == "zero") {
        return wrc::FeatureMap(y.channels(), y.height() * s, y.width() * s);
    }
    if (policy == "bilinear") return wrc::default_x0(y, s);
    return wrc::read_tensor(policy);
}

wrc::WrcProblem build_problem(const std::string& y_path, const std::string& k_path,
                              std::size_t s, const WeightOpts& o) {
    wrc::FeatureMap y = wrc::read_tensor(y_path);
    wrc::Kernel k = wrc::read_kernel(k_path);
    wrc::FeatureMap x0 = make_x0(o.x0_policy, y, s);

    double eps = o.eps;
    wrc::WeightField wd = wrc::WeightField::constant(
        y.channels(), y.height(), y.width(), o.w_const, wrc::WeightRole::DataFidelity);
    wrc::WeightField wr = wrc::WeightField::constant(
        x0.channels(), x0.height(), x0.width(), o.wlam_const,
        wrc::WeightRole::Regularizer);
    if (!o.predictor_w_file.empty() || !o.predictor_wlam_file.empty()) {
        if (o.predictor_w_file.empty() || o.predictor_wlam_file.empty()) {
            throw wrc::ValidationError(
                "--predictor-w and --predictor-wlam must be given together");
        }
        wrc::WeightPredictor pred;
        pred.kind = wrc::PredictorKind::Convolution;
        pred.conv_w = wrc::read_kernel(o.predictor_w_file);
        pred.conv_wlam = wrc::read_kernel(o.predictor_wlam_file);
        pred.param = wrc::WeightParam{parse_param_mode(o.weight_param), o.weight_bias};
        auto [pw, pr] = wrc::predict_weights(pred, y, x0);
        wd = std::move(pw);
        wr = std::move(pr);
        if (!o.eps_given) eps = wrc::default_eps(o.weight_bias);
    } else {
        if (!o.w_file.empty()) {
            wd = wrc::read_weight_field(o.w_file, wrc::WeightRole::DataFidelity);
        }
        if (!o.wlam_file.empty()) {
            wr = wrc::read_weight_field(o.wlam_file, wrc::WeightRole::Regularizer);
        }
    }
    return wrc::WrcProblem{std::move(y), wrc::ForwardSpec{std::move(k), s},
                           std::move(wd), std::move(wr), std::move(x0), eps};
}

double max_rel_err(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    }
    return m;
}

double grad_max_norm(const wrc::WrcProblem& p, const wrc::FeatureMap& x) {
    // gradient of the effective objective, epsilon folded into the regularizer
    wrc::WrcProblem pe = p;
    if (p.eps != 0.0) {
        std::vector<double> wr = p.w_reg.data();
        for (auto& v : wr) v += p.eps;
        pe.w_reg = wrc::WeightField(p.w_reg.channels(), p.w_reg.height(),
                                    p.w_reg.width(), std::move(wr),
                                    wrc::WeightRole::Regularizer);
        pe.eps = 0.0;
    }
    wrc::FeatureMap g = wrc::objective_gradient(pe, x);
    double m = 0.0;
    for (double v : g.data()) m = std::max(m, std::abs(v));
    return m;
}

struct OracleCaseResult {
    double rel_err;
    double grad_norm;
    bool pass;
};

OracleCaseResult oracle_check_problem(const wrc::WrcProblem& p, bool corrupt) {
    wrc::FeatureMap x = wrc::wrc_solve(p);
    if (corrupt) {
        // negative-control hook: perturb the solution before comparison
        for (auto& v : x.data()) v += 1e-3;
    }
    OracleCaseResult r{0.0, 0.0, true};
    for (std::size_t c = 0; c < x.channels(); ++c) {
        Eigen::VectorXd xd = wrc::dense_solve(wrc::assemble(p, c));
        r.rel_err = std::max(r.rel_err,
                             max_rel_err(x.channel(c), xd.data(), xd.size()));
    }
    double xmax = 0.0;
    for (double v : x.data()) xmax = std::max(xmax, std::abs(v));
    r.grad_norm = grad_max_norm(p, x);
    r.pass = r.rel_err < 1e-6 && r.grad_norm < 1e-6 * (1.0 + xmax);
    return r;
}

int run(int argc, char** argv) {
    CLI::App app{"weighted reverse convolution toolkit"};
    app.require_subcommand(1);
    std::size_t threads = 1;
    app.add_option("--threads", threads, "worker threads (modules are serial; must be 1)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1}));

    // ---- forward ----
    auto* fwd = app.add_subcommand("forward", "apply the degradation operator");
    std::string f_in, f_k, f_out;
    std::size_t f_s = 1;
    bool f_spectral = false;
    fwd->add_option("-x,--input", f_in, "input tensor (WRCT)")->required();
    fwd->add_option("-k,--kernel", f_k, "kernel (WRCT)")->required();
    fwd->add_option("-o,--output", f_out, "output tensor (WRCT)")->required();
    fwd->add_option("-s,--scale", f_s, "decimation stride")->check(CLI::PositiveNumber);
    fwd->add_flag("--spectral", f_spectral, "use the FFT path instead of the spatial path");

    // ---- solve ----
    auto* slv = app.add_subcommand("solve", "solve the weighted inverse problem");
    std::string s_y, s_k, s_out;
    std::size_t s_s = 1;
    bool s_stat = false;
    WeightOpts s_w;
    slv->add_option("-y,--observation", s_y, "observation tensor (WRCT)")->required();
    slv->add_option("-k,--kernel", s_k, "kernel (WRCT)")->required();
    slv->add_option("-o,--output", s_out, "solution tensor (WRCT)")->required();
    slv->add_option("-s,--scale", s_s, "decimation stride")->check(CLI::PositiveNumber);
    add_weight_flags(slv, s_w);
    auto* s_eps_opt = slv->get_option("--eps");
    slv->add_flag("--check-stationarity", s_stat,
                  "also print the objective gradient max-norm at the solution");

    // ---- oracle-check ----
    auto* orc = app.add_subcommand("oracle-check",
                                   "compare the FFT solver against the dense oracle");
    std::string o_y, o_k;
    std::size_t o_s = 1;
    std::size_t o_suite = 0;
    std::uint64_t o_seed = 1;
    bool o_corrupt = false;
    WeightOpts o_w;
    orc->add_option("-y,--observation", o_y, "observation tensor (WRCT)");
    orc->add_option("-k,--kernel", o_k, "kernel (WRCT)");
    orc->add_option("-s,--scale", o_s, "decimation stride")->check(CLI::PositiveNumber);
    orc->add_option("--suite", o_suite,
                    "run N generated fixed-seed cases across s in {1,2,3}");
    orc->add_option("--seed", o_seed, "seed for --suite generation");
    orc->add_flag("--corrupt-solver", o_corrupt,
                  "negative control: perturb the solver output before checking")
        ->group("");  // hidden test hook
    add_weight_flags(orc, o_w);
    auto* o_eps_opt = orc->get_option("--eps");

    // ---- bccb ----
    auto* bcc = app.add_subcommand("bccb", "nearest-BCCB analysis of attention slices");
    std::string b_in, b_out;
    std::vector<std::size_t> b_grid;
    bool b_avg = false;
    bcc->add_option("-x,--input", b_in,
                    "tensor of C square slices, each (h*w) x (h*w) (WRCT)")
        ->required();
    bcc->add_option("-o,--output", b_out, "generator tensor output (WRCT)")->required();
    bcc->add_option("--grid", b_grid, "token grid h w")->expected(2)->required();
    bcc->add_flag("--average", b_avg, "average slices entrywise before projecting");

    // ---- bench ----
    auto* ben = app.add_subcommand("bench", "timing sweep with correctness gates");
    std::vector<std::size_t> n_sizes{16, 32, 64};
    std::size_t n_s = 2, n_c = 1, n_k = 3, n_rep = 5;
    std::uint64_t n_seed = 1;
    bool n_nodense = false, n_fit = false;
    ben->add_option("--sizes", n_sizes, "square sizes H=W to sweep");
    ben->add_option("-s,--scale", n_s, "decimation stride")->check(CLI::PositiveNumber);
    ben->add_option("--channels", n_c, "channel count")->check(CLI::PositiveNumber);
    ben->add_option("--kernel-size", n_k, "square kernel size")->check(CLI::PositiveNumber);
    ben->add_option("--repeats", n_rep, "timed repetitions per case");
    ben->add_option("--seed", n_seed, "fixture seed");
    ben->add_flag("--no-dense", n_nodense, "skip the dense path");
    ben->add_flag("--fit", n_fit, "print log-log slope fit per path");

    CLI11_PARSE(app, argc, argv);

    if (fwd->parsed()) {
        wrc::FeatureMap x = wrc::read_tensor(f_in);
        wrc::Kernel k = wrc::read_kernel(f_k);
        wrc::ForwardSpec spec{std::move(k), f_s};
        wrc::FeatureMap y =
            f_spectral ? wrc::forward_spectral(x, spec) : wrc::forward_spatial(x, spec);
        wrc::write_tensor(y, f_out);
        std::cout << "forward: " << x.channels() << "x" << x.height() << "x" << x.width()
                  << " -> " << y.channels() << "x" << y.height() << "x" << y.width()
                  << " (s=" << f_s << ")\n";
        return 0;
    }

    if (slv->parsed()) {
        s_w.eps_given = s_eps_opt->count() > 0;
        wrc::WrcProblem p = build_problem(s_y, s_k, s_s, s_w);
        wrc::FeatureMap x = wrc::wrc_solve(p);
        wrc::write_tensor(x, s_out);
        std::cout << "solve: wrote " << x.channels() << "x" << x.height() << "x"
                  << x.width() << " (s=" << s_s << ", eps=" << p.eps << ")\n";
        if (s_stat) {
            std::cout << "stationarity: grad_max_norm=" << grad_max_norm(p, x) << "\n";
        }
        return 0;
    }

    if (orc->parsed()) {
        bool all_pass = true;
        if (o_suite > 0) {
            const std::size_t hw[] = {8, 12, 6, 8};
            for (std::size_t i = 0; i < o_suite; ++i) {
                wrc::FixtureSpec f;
                f.seed = o_seed + i;
                f.s = 1 + i % 3;
                const std::size_t base = hw[i % 4];
                f.H = f.W = base % f.s == 0 ? base : base * f.s;
                if (f.H % f.s != 0) f.H = f.W = 6 * f.s;
                f.kernel_size = 1 + 2 * (i % 3);
                wrc::WrcProblem p = wrc::make_random_problem(f);
                OracleCaseResult r = oracle_check_problem(p, o_corrupt);
                std::cout << "oracle-check case=" << i << " s=" << f.s
                          << " rel_err=" << r.rel_err << " grad_norm=" << r.grad_norm
                          << " " << (r.pass ? "PASS" : "FAIL") << "\n";
                all_pass = all_pass && r.pass;
            }
        } else {
            if (o_y.empty() || o_k.empty()) {
                throw wrc::ValidationError(
                    "oracle-check: provide -y and -k, or --suite N");
            }
            o_w.eps_given = o_eps_opt->count() > 0;
            wrc::WrcProblem p = build_problem(o_y, o_k, o_s, o_w);
            OracleCaseResult r = oracle_check_problem(p, o_corrupt);
            std::cout << "oracle-check rel_err=" << r.rel_err
                      << " grad_norm=" << r.grad_norm << " "
                      << (r.pass ? "PASS" : "FAIL") << "\n";
            all_pass = r.pass;
        }
        return all_pass ? 0 : 3;
    }

    if (bcc->parsed()) {
        wrc::FeatureMap t = wrc::read_tensor(b_in);
        const std::size_t h = b_grid[0], w = b_grid[1], n = h * w;
        if (t.height() != n || t.width() != n) {
            throw wrc::DimensionError("bccb: slices must be (h*w) x (h*w)");
        }
        auto slice = [&](std::size_t c) {
            wrc::AttentionMatrix m{h, w, {}};
            m.data.assign(t.channel(c), t.channel(c) + n * n);
            return m;
        };
        if (b_avg) {
            std::vector<wrc::AttentionMatrix> mats;
            for (std::size_t c = 0; c < t.channels(); ++c) mats.push_back(slice(c));
            wrc::BccbResidual r = wrc::layer_report(mats);
            std::cout << "bccb slice=mean rel_residual=" << r.rel_residual << "\n";
            wrc::write_tensor(wrc::FeatureMap(1, h, w, std::move(r.gen.gen)), b_out);
        } else {
            wrc::FeatureMap gens(t.channels(), h, w);
            for (std::size_t c = 0; c < t.channels(); ++c) {
                wrc::BccbResidual r = wrc::bccb_residual(slice(c));
                std::cout << "bccb slice=" << c << " rel_residual=" << r.rel_residual
                          << "\n";
                std::copy(r.gen.gen.begin(), r.gen.gen.end(), gens.channel(c));
            }
            wrc::write_tensor(gens, b_out);
        }
        return 0;
    }

    if (ben->parsed()) {
        std::vector<std::pair<std::size_t, std::int64_t>> fft_pts, dense_pts;
        for (std::size_t hw : n_sizes) {
            wrc::BenchCase c;
            c.name = "sweep" + std::to_string(hw);
            c.channels = n_c;
            c.H = c.W = hw;
            c.s = n_s;
            c.kernel_size = n_k;
            c.repeats = n_rep;
            c.seed = n_seed;
            c.include_dense = !n_nodense && hw * hw <= wrc::kDenseCapacity;
            wrc::BenchResult r = wrc::run_bench(c);
            for (const auto& line : wrc::format_bench_lines(r)) {
                std::cout << line << "\n";
            }
            fft_pts.emplace_back(hw * hw, r.fft.median_ns);
            if (c.include_dense) dense_pts.emplace_back(hw * hw, r.dense.median_ns);
        }
        if (n_fit && fft_pts.size() >= 2) {
            std::cout << "bench fit path=fft slope=" << wrc::loglog_slope(fft_pts) << "\n";
            if (dense_pts.size() >= 2) {
                std::cout << "bench fit path=dense slope=" << wrc::loglog_slope(dense_pts)
                          << "\n";
            }
        }
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wrc::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const wrc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
