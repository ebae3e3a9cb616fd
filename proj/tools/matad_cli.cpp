// Command-line front end: deterministic, scriptable reports over the
// library's checks and demo programs.
//
//   matad dot-test   --seed 7 --size 4
//   matad gradcheck  --program ffn --seed 1
//   matad gradcheck  --input A.mat --pipeline trace-exp
//   matad matfunc    --function exp --input A.mat [--direction E.mat]
//   matad ffn-demo   --seed 1 --batch 8
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 parse error (flags
// or files), 3 shape mismatch, 4 field mismatch, 5 singular matrix,
// 6 not positive definite, 7 domain violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matad/demo.hpp"
#include "matad/gradcheck.hpp"
#include "matad/matio.hpp"

namespace {

using namespace matad;

int exit_code(ErrKind kind) {
    switch (kind) {
        case ErrKind::ParseError: return 2;
        case ErrKind::ShapeMismatch: return 3;
        case ErrKind::FieldMismatch: return 4;
        case ErrKind::Singular: return 5;
        case ErrKind::NotSPD: return 6;
        case ErrKind::DomainViolation: return 7;
    }
    return 1;
}

struct Output {
    std::string format = "text";  // or "machine"
    std::string report_file;      // machine-format copy when nonempty

    void emit(const CheckReport& report) const {
        std::cout << (format == "machine" ? to_machine(report) : to_text(report));
        if (!report_file.empty()) {
            std::ofstream out(report_file);
            if (!out)
                throw FieldError(ErrKind::ParseError, "cannot open '" + report_file + "'");
            out << to_machine(report);
        }
    }
};

MatrixFunction function_by_name(const std::string& name) {
    if (name == "exp") return MatrixFunction::exp();
    if (name == "log1p") return MatrixFunction::log1p();
    if (name == "sin") return MatrixFunction::sin();
    if (name == "cos") return MatrixFunction::cos();
    throw FieldError(ErrKind::ParseError, "unknown function '" + name + "'");
}

/// Chain applied to one matrix leaf, ending in a real scalar.
Program pipeline_by_name(const std::string& name, const Mat& a) {
    Program program;
    ValueRef v = ValueRef::leaf(0);
    if (name == "trace") {
        v = program.push(Op::trace(), {v});
    } else if (name == "trace-inverse") {
        v = program.push(Op::inverse(), {v});
        v = program.push(Op::trace(), {v});
    } else if (name == "trace-exp") {
        v = program.push(Op::matfunc(MatrixFunction::exp()), {v});
        v = program.push(Op::trace(), {v});
    } else {
        throw FieldError(ErrKind::ParseError, "unknown pipeline '" + name + "'");
    }
    if (a.field() == Field::Complex) program.push(Op::re(), {v});
    return program;
}

int run_dot_test(std::uint64_t seed, std::size_t size, const FDConfig& cfg,
                 const Output& output) {
    std::vector<std::size_t> sizes = size > 0 ? std::vector<std::size_t>{size}
                                              : std::vector<std::size_t>{2, 3, 5, 8};
    // One instance per configured seed, offset by the base seed.
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s : cfg.seeds) seeds.push_back(seed * 7919 + s);
    CheckReport report = dot_test_suite(seeds, sizes);
    output.emit(report);
    return report.pass ? 0 : 1;
}

int run_gradcheck(const std::string& program_name, const std::string& input,
                  const std::string& pipeline, std::uint64_t seed, std::size_t size,
                  const FDConfig& cfg, const Output& output) {
    CheckReport report;
    if (!input.empty()) {
        Mat a = read_mat_file(input);
        report = gradcheck(pipeline_by_name(pipeline, a), {Leaf{"A", a}}, cfg);
    } else if (program_name == "ffn") {
        std::vector<std::size_t> widths{32, 16, 8};
        FFNParams params = FFNParams::seeded(widths, seed);
        Batch batch = Batch::seeded(32, 8, 1, seed);
        report = gradcheck(ffn_program(params, batch), ffn_leaves(params), cfg);
    } else if (program_name == "tr-aa") {
        std::size_t n = size > 0 ? size : 4;
        Mat a = random_mat(n, n, Field::Real, seed);
        Program program;
        ValueRef prod = program.push(Op::matmul(), {ValueRef::leaf(0), ValueRef::leaf(0)});
        program.push(Op::trace(), {prod});
        report = gradcheck(program, {Leaf{"A", a}}, cfg);
    } else {
        throw FieldError(ErrKind::ParseError, "unknown program '" + program_name + "'");
    }
    output.emit(report);
    return report.pass ? 0 : 1;
}

int run_matfunc(const std::string& function, const std::string& input,
                const std::string& direction, const std::string& value_out,
                const std::string& frechet_out, const std::string& mode) {
    MatrixFunction f = function_by_name(function);
    Mat a = read_mat_file(input);
    SeriesResult result = apply(f, a);

    std::ostream& info = value_out.empty() ? std::cerr : std::cout;
    info << "function: " << f.name() << '\n';
    info << "terms_used: " << result.terms_used << '\n';
    info << "truncation_residual: " << format_double(result.truncation_residual) << '\n';

    if (value_out.empty()) {
        write_mat(std::cout, result.value);
    } else {
        write_mat_file(value_out, result.value);
    }

    if (!direction.empty()) {
        Mat e = read_mat_file(direction);
        Mat d = mode == "series" ? frechet_series(f, a, e) : frechet_block(f, a, e);
        if (frechet_out.empty()) {
            write_mat(std::cout, d);
        } else {
            write_mat_file(frechet_out, d);
        }
    }
    return 0;
}

int run_ffn_demo(std::uint64_t seed, std::vector<std::size_t> widths, std::size_t batch_size,
                 const std::string& inputs_file, const std::string& targets_file,
                 const FDConfig& cfg, const Output& output) {
    if (widths.empty()) widths = {32, 16, 8};
    FFNParams params = FFNParams::seeded(widths, seed);
    const std::size_t in = widths.front(), out_dim = widths.back();

    CheckReport report;
    report.name = "ffn-demo";

    // Data comes from matrix files when given, otherwise from the seed.
    Batch batch = Batch::seeded(in, out_dim, std::max<std::size_t>(batch_size, 1), seed);
    if (!inputs_file.empty() != !targets_file.empty())
        throw FieldError(ErrKind::ParseError, "--inputs and --targets go together");
    if (!inputs_file.empty()) {
        batch = Batch{read_mat_file(inputs_file), read_mat_file(targets_file)};
        batch_size = batch.size();
    }
    double loss = ffn_loss(params, batch);
    report.add_case(CheckCase{"loss " + format_double(loss), 0.0, 0.0, true});

    report.merge(gradcheck(ffn_program(params, batch), ffn_leaves(params), cfg));

    // Hand-written backward versus the tape engine.
    FFNGradients manual = ffn_backward_manual(params, batch);
    GradientReport engine = backprop(record(ffn_program(params, batch), ffn_leaves(params)));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto check = [&](const std::string& tag, const Mat& a, const Mat& b) {
            double abs_err = frobenius_norm(a - b);
            double rel = abs_err / std::max(frobenius_norm(a), 1e-300);
            report.add_case(
                CheckCase{"manual-vs-engine " + tag, abs_err, rel, rel <= 1e-12});
        };
        check("A" + std::to_string(l + 1), engine.for_leaf("A" + std::to_string(l + 1)),
              manual.weight[l]);
        check("b" + std::to_string(l + 1), engine.for_leaf("b" + std::to_string(l + 1)),
              manual.bias[l]);
    }

    report.merge(rank1_check(
        params, batch.size() == 1 ? batch : Batch::seeded(in, out_dim, 1, seed + 1)));
    report.merge(batched_gradient_decomposition(
        params, batch.size() >= 2 ? batch
                                  : Batch::seeded(in, out_dim, batch_size >= 2 ? batch_size : 8,
                                                  seed + 2)));

    output.emit(report);
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matad: coordinate-free matrix derivatives with built-in verification"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 all checks passed, 1 check failed, 2 parse error,\n"
        "3 shape mismatch, 4 field mismatch, 5 singular, 6 not SPD,\n"
        "7 domain violation.");

    std::uint64_t seed = 1;
    Output output;
    FDConfig cfg;
    app.add_option("--seed", seed, "Base seed for generated instances")->envname("MATAD_SEED");
    app.add_option("--report", output.format, "Report format on stdout: text or machine")
        ->check(CLI::IsMember({"text", "machine"}));
    app.add_option("--out", output.report_file, "Also write a machine-format report file");
    app.add_option("--atol", cfg.atol, "Absolute tolerance for gradient checks");
    app.add_option("--rtol", cfg.rtol, "Relative tolerance for gradient checks");
    app.add_option("--step", cfg.step, "Finite-difference step (0 selects automatically)");

    std::size_t size = 0;
    auto* dot = app.add_subcommand("dot-test", "Adjoint identity for every primitive");
    dot->fallthrough();
    dot->add_option("--size", size, "Matrix size (default: cycle 2,3,5,8)");

    std::string program_name = "ffn", input, pipeline = "trace";
    auto* gc = app.add_subcommand("gradcheck", "Backprop gradients versus finite differences");
    gc->fallthrough();
    gc->add_option("--program", program_name, "Built-in program: ffn or tr-aa");
    gc->add_option("--input", input, "Matrix file checked through --pipeline");
    gc->add_option("--pipeline", pipeline, "Pipeline for --input: trace, trace-inverse, trace-exp");
    gc->add_option("--size", size, "Size for generated built-in inputs");

    std::string function = "exp", direction, value_out, frechet_out, mode = "block";
    auto* mf = app.add_subcommand("matfunc", "Evaluate f(A) and its directional derivative");
    mf->fallthrough();
    mf->add_option("--function", function, "exp, log1p, sin or cos");
    mf->add_option("--input", input, "Matrix file with A")->required();
    mf->add_option("--direction", direction, "Matrix file with the direction E");
    mf->add_option("--output", value_out, "Where to write f(A) (default: stdout)");
    mf->add_option("--frechet-output", frechet_out, "Where to write the derivative");
    mf->add_option("--mode", mode, "Derivative route: block or series")
        ->check(CLI::IsMember({"block", "series"}));

    std::vector<std::size_t> widths;
    std::size_t batch_size = 1;
    std::string inputs_file, targets_file;
    auto* demo = app.add_subcommand("ffn-demo", "Feed-forward demo: loss, backward, rank-1, batching");
    demo->fallthrough();
    demo->add_option("--widths", widths, "Layer widths, e.g. --widths 32 16 8");
    demo->add_option("--batch", batch_size, "Batch size (columns)");
    demo->add_option("--inputs", inputs_file, "Matrix file with input columns");
    demo->add_option("--targets", targets_file, "Matrix file with target columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(dot)) return run_dot_test(seed, size, cfg, output);
        if (app.got_subcommand(gc))
            return run_gradcheck(program_name, input, pipeline, seed, size, cfg, output);
        if (app.got_subcommand(mf))
            return run_matfunc(function, input, direction, value_out, frechet_out, mode);
        if (app.got_subcommand(demo))
            return run_ffn_demo(seed, widths, batch_size, inputs_file, targets_file, cfg, output);
    } catch (const matad::FieldError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
