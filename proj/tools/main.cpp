// Command-line front end: one-shot decoding, reference verification sweeps,
// and operation-count measurement campaigns.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphdec/sphdec.hpp"

namespace {

// Dimension lists: "12", "2,4,8", "2..6" (inclusive), or "10:10:60"
// (start:step:stop, inclusive).
std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    auto parse_one = [](const std::string& s) {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size() || v == 0) throw sphdec::argument_error("bad dimension: " + s);
        return static_cast<std::size_t>(v);
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const std::size_t a = parse_one(text.substr(0, dots));
        const std::size_t b = parse_one(text.substr(dots + 2));
        if (b < a) throw sphdec::argument_error("bad dimension range: " + text);
        for (std::size_t n = a; n <= b; ++n) dims.push_back(n);
        return dims;
    }
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        const std::size_t start = parse_one(text.substr(0, c1));
        const std::size_t stride = parse_one(text.substr(c1 + 1, c2 - c1 - 1));
        const std::size_t stop = parse_one(text.substr(c2 + 1));
        for (std::size_t n = start; n <= stop; n += stride) dims.push_back(n);
        if (dims.empty()) throw sphdec::argument_error("empty dimension range: " + text);
        return dims;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(parse_one(item));
    if (dims.empty()) throw sphdec::argument_error("no dimensions in: " + text);
    return dims;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
    std::vector<std::pair<int, int>> pairs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw sphdec::argument_error("pair must look like 3:7");
        pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    }
    return pairs;
}

sphdec::matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sphdec::io_error("cannot open " + path);
    return sphdec::read_matrix(in);
}

int run_decode(const std::string& matrix_file, bool h_form, int algorithm,
               const std::vector<double>& r_in, long long u_min, long long u_max) {
    using namespace sphdec;
    const matrix input = read_matrix_file(matrix_file);

    lower_triangular_pair pair;
    std::vector<double> r = r_in;
    double perp_sq = 0.0;
    if (h_form) {
        if (!is_lower_triangular(input) || !has_positive_diagonal(input))
            throw argument_error("--h-form input must be lower triangular with positive diagonal");
        pair = lower_triangular_pair{invert_lower_triangular(input), input};
    } else if (is_lower_triangular(input) && has_positive_diagonal(input)) {
        pair = pair_from_lower_triangular(input);
    } else {
        // Rotate the input into the canonical frame of the triangularized
        // basis: with basis = g * Q^T, the frame coordinates of r are
        // rho = r * Q = r * basis^T * h^T, and the component of r
        // orthogonal to the basis span contributes a constant offset.
        pair = lower_triangularize(input);
        if (r.size() != input.cols()) throw argument_error("decode: input length differs from basis columns");
        const std::size_t n = input.rows();
        std::vector<double> dots(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < input.cols(); ++k) dots[i] += r[k] * input(i, k);
        std::vector<double> rho(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j; i < n; ++i) rho[j] += dots[i] * pair.h(i, j);
        double r2 = 0.0, rho2 = 0.0;
        for (double x : r) r2 += x * x;
        for (double x : rho) rho2 += x * x;
        perp_sq = std::max(0.0, r2 - rho2);
        r = std::move(rho);
    }

    const decoder_config cfg = decoder_config::from_algorithm(algorithm, u_min, u_max);
    const decode_result res = decode(cfg, pair, r);

    std::cout << "u_hat=";
    for (std::size_t j = 0; j < res.coefficients.size(); ++j) {
        if (j) std::cout << ' ';
        std::cout << res.coefficients[j];
    }
    std::cout << " dist2=" << format_scalar(res.squared_distance + perp_sq)
              << " flops=" << res.ops.flops << " intops=" << res.ops.intops << '\n';
    return 0;
}

int run_verify(const std::vector<std::size_t>& dims, std::size_t trials, std::uint64_t seed) {
    using namespace sphdec;
    verify_outcome total = verify_lattice_algorithms(dims, trials, seed);
    std::vector<finite_case> cases;
    for (std::size_t n : dims)
        for (std::size_t points : {std::size_t{2}, std::size_t{4}}) {
            if (std::pow(double(points), double(n)) > 1e6) continue;
            cases.push_back(finite_case{n, points, trials});
        }
    total.merge(verify_finite_algorithms(cases, seed));
    if (total.skipped)
        std::cout << "skipped " << total.skipped << " instances (reference search too large)\n";
    std::cout << "passed " << (total.checks - total.failures) << "/" << total.checks << '\n';
    if (total.failures) {
        std::cerr << "first failure: " << total.first_failure << '\n';
        return 1;
    }
    return 0;
}

std::string raw_csv_path(const std::string& out) {
    const std::string tail = ".csv";
    if (out.size() > tail.size() && out.compare(out.size() - tail.size(), tail.size(), tail) == 0)
        return out.substr(0, out.size() - tail.size()) + ".raw.csv";
    return out + ".raw.csv";
}

int run_experiment_cmd(const sphdec::experiment_spec& spec, const std::string& out_path) {
    using namespace sphdec;
    const gain_report report = run_experiment(spec);
    {
        std::ofstream out(out_path);
        if (!out) throw io_error("cannot write " + out_path);
        write_gain_csv(out, report);
    }
    {
        std::ofstream raw(raw_csv_path(out_path));
        if (!raw) throw io_error("cannot write " + raw_csv_path(out_path));
        write_raw_csv(raw, report);
    }
    for (const gain_cell& c : report.cells)
        std::cout << "n=" << c.n << " pair=" << c.algo_old << ":" << c.algo_new
                  << " flop_gain=" << format_scalar(c.flop_gain)
                  << " intop_gain=" << format_scalar(c.intop_gain) << '\n';
    std::cout << "wrote " << out_path << " and " << raw_csv_path(out_path) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closest-point search in lattices and finite constellations"};
    app.require_subcommand(1);

    // decode
    std::string matrix_file;
    bool h_form = false;
    int algorithm = 3;
    std::vector<double> r_values;
    long long u_min = 0, u_max = 0;
    CLI::App* dec = app.add_subcommand("decode", "Decode one input vector");
    dec->add_option("--matrix-file", matrix_file, "Basis file (\"rows cols\" header, then rows)")
        ->required();
    dec->add_flag("--h-form", h_form, "Treat the file as the inverse basis");
    dec->add_option("--algorithm", algorithm, "Engine variant 1..8")->required();
    dec->add_option("--r", r_values, "Input vector components")->required()->expected(-1);
    dec->add_option("--umin", u_min, "Lower end of the finite range (variants 2,4,6,8)");
    dec->add_option("--umax", u_max, "Upper end of the finite range (variants 2,4,6,8)");

    // verify
    std::string dims_text = "2..6";
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    CLI::App* ver = app.add_subcommand("verify", "Compare all engine variants against exhaustive search");
    ver->add_option("--dims", dims_text, "Dimensions: n, a,b,c, a..b, or start:step:stop");
    ver->add_option("--trials", trials, "Instances per dimension");
    ver->add_option("--seed", seed, "Master seed");

    // experiment
    std::string family = "lattice";
    std::string exp_dims = "10:10:60";
    std::string reduce = "none";
    double lll_delta = 0.75;
    std::size_t constellation = 2;
    double snr_db = 0.0;
    std::size_t matrices = 20;
    std::size_t vectors = 0;
    std::string pairs_text;
    std::uint64_t exp_seed = 1;
    std::string out_path;
    bool allow_slow = false;
    CLI::App* exp = app.add_subcommand("experiment", "Measure operation-count gains");
    exp->add_option("--family", family, "lattice or finite")
        ->check(CLI::IsMember({"lattice", "finite"}));
    exp->add_option("--dims", exp_dims, "Dimensions: n, a,b,c, a..b, or start:step:stop");
    exp->add_option("--reduce", reduce, "none or lll")->check(CLI::IsMember({"none", "lll"}));
    exp->add_option("--lll-delta", lll_delta, "Reduction parameter in (1/4, 1]");
    exp->add_option("--L", constellation, "Constellation points (finite family)");
    exp->add_option("--snr-db", snr_db, "Eb/N0 in dB (finite family)");
    exp->add_option("--matrices", matrices, "Bases per dimension (M)");
    exp->add_option("--vectors", vectors, "Inputs per basis (N); 0 = schedule");
    exp->add_option("--pairs", pairs_text, "Algorithm pairs, e.g. 1:5,3:7");
    exp->add_option("--seed", exp_seed, "Master seed");
    exp->add_option("--out", out_path, "Gain table CSV path")->required();
    exp->add_flag("--allow-slow", allow_slow, "Permit unreduced lattice runs above n = 40");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dec->parsed()) return run_decode(matrix_file, h_form, algorithm, r_values, u_min, u_max);
        if (ver->parsed()) return run_verify(parse_dims(dims_text), trials, seed);
        if (exp->parsed()) {
            sphdec::experiment_spec spec;
            spec.family = family == "lattice" ? sphdec::instance_family::lattice
                                              : sphdec::instance_family::finite;
            spec.dims = parse_dims(exp_dims);
            spec.matrices = matrices;
            spec.vectors = vectors;
            spec.constellation = constellation;
            spec.snr_db = snr_db;
            spec.lll = reduce == "lll";
            spec.lll_delta = lll_delta;
            spec.pairs = pairs_text.empty() ? std::vector<std::pair<int, int>>{}
                                            : parse_pairs(pairs_text);
            spec.seed = exp_seed;
            spec.allow_slow = allow_slow;
            return run_experiment_cmd(spec, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
