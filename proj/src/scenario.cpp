#include "weakval/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "weakval/errors.hpp"
#include "weakval/tolerances.hpp"

namespace weakval {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// 17 significant digits round-trips every double, which is what makes the
// reports byte-reproducible across runs.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& message) { throw validation_error(message); }

// ---------------------------------------------------------------------------
// JSON field access with errors that name the offending field.

std::string joined(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

void require_known_keys(const json& obj, const std::string& section,
                        std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) fail("unknown field \"" + joined(section, item.key()) + "\"");
    }
}

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& obj, const std::string& section,
                           const std::string& key) {
    const json* v = find(obj, key);
    if (v == nullptr) fail("missing section \"" + joined(section, key) + "\"");
    if (!v->is_object()) fail("\"" + joined(section, key) + "\" must be an object");
    return *v;
}

double get_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail("\"" + joined(section, key) + "\" must be a number");
    return v->get<double>();
}

long get_integer(const json& obj, const std::string& section, const std::string& key,
                 long fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) {
        fail("\"" + joined(section, key) + "\" must be an integer");
    }
    return v->get<long>();
}

std::string get_string(const json& obj, const std::string& section,
                       const std::string& key, const std::string& fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail("\"" + joined(section, key) + "\" must be a string");
    return v->get<std::string>();
}

std::vector<double> read_real_vector(const json& v, const std::string& where,
                                     Eigen::Index dim) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
        fail("\"" + where + "\" must be an array of " + std::to_string(dim) +
             " numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number()) fail("\"" + where + "\" must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// State amplitudes: {"re": [...], "im": [...]} with "im" optional.
Eigen::VectorXcd read_state_amplitudes(const json& obj, const std::string& where,
                                       Eigen::Index dim) {
    if (!obj.is_object()) fail("\"" + where + "\" must be an object with re/im arrays");
    require_known_keys(obj, where, {"re", "im"});
    const json* re = find(obj, "re");
    if (re == nullptr) fail("\"" + where + ".re\" is required");
    const std::vector<double> re_v = read_real_vector(*re, where + ".re", dim);
    std::vector<double> im_v(dim, 0.0);
    if (const json* im = find(obj, "im")) {
        im_v = read_real_vector(*im, where + ".im", dim);
    }
    Eigen::VectorXcd amps(dim);
    for (Eigen::Index i = 0; i < dim; ++i) amps(i) = Complex(re_v[i], im_v[i]);
    return amps;
}

Eigen::MatrixXd read_real_matrix(const json& v, const std::string& where,
                                 Eigen::Index dim) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
        fail("\"" + where + "\" must be a " + std::to_string(dim) + "x" +
             std::to_string(dim) + " nested array");
    }
    Eigen::MatrixXd out(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const std::vector<double> row =
            read_real_vector(v[static_cast<std::size_t>(r)],
                             where + "[" + std::to_string(r) + "]", dim);
        for (Eigen::Index c = 0; c < dim; ++c) out(r, c) = row[static_cast<std::size_t>(c)];
    }
    return out;
}

// Matrix: {"re": [[...]], "im": [[...]]} with "im" optional.
Eigen::MatrixXcd read_matrix(const json& obj, const std::string& where,
                             Eigen::Index dim) {
    if (!obj.is_object()) fail("\"" + where + "\" must be an object with re/im arrays");
    require_known_keys(obj, where, {"re", "im"});
    const json* re = find(obj, "re");
    if (re == nullptr) fail("\"" + where + ".re\" is required");
    Eigen::MatrixXcd m = read_real_matrix(*re, where + ".re", dim).cast<Complex>();
    if (const json* im = find(obj, "im")) {
        m += Complex(0.0, 1.0) * read_real_matrix(*im, where + ".im", dim);
    }
    return m;
}

Observable read_observable(const json& obj, const std::string& where,
                           Eigen::Index dim) {
    const Eigen::MatrixXcd m = read_matrix(obj, where, dim);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol::construction * scale) {
        fail("\"" + where + "\" is not Hermitian (max deviation " + fmt(dev) + ")");
    }
    return Observable(m);
}

StateVector read_state(const json& obj, const std::string& where, Eigen::Index dim,
                       std::vector<std::string>& warnings) {
    Eigen::VectorXcd amps = read_state_amplitudes(obj, where, dim);
    const double norm = amps.norm();
    if (norm < 1e-12) fail("\"" + where + "\" has zero norm");
    if (std::abs(norm - 1.0) > 1e-6) {
        warnings.push_back(where + ": renormalized input state (|norm - 1| = " +
                           fmt(std::abs(norm - 1.0)) + ")");
    }
    return StateVector::normalized(std::move(amps));
}

std::vector<double> read_sweep_list(const json& v, const std::string& where) {
    if (!v.is_array()) fail("\"" + where + "\" must be an array of numbers");
    if (v.empty()) fail("\"" + where + "\" must be non-empty");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number()) fail("\"" + where + "\" must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid alignment for boxcar couplings.

struct GridChoice {
    TimeGrid grid;
    bool refined;
};

// Returns the requested grid unless the boxcar window edges miss its nodes,
// in which case the step is shrunk to epsilon/(2m) and the sample count
// grown so the half-width is preserved.
GridChoice boxcar_aligned_grid(double t0, double half_width, int n, double epsilon) {
    const double step = 2.0 * half_width / (n - 1);
    const double ratio = 0.5 * epsilon / step;
    const long m = std::lround(ratio);
    if (m >= 1 && std::abs(ratio - static_cast<double>(m)) <=
                      tol::grid_alignment * std::max(1.0, ratio)) {
        return GridChoice{TimeGrid(t0, half_width, n), false};
    }
    const long m2 = std::max(1L, static_cast<long>(std::ceil(ratio - 1e-9)));
    const double step2 = 0.5 * epsilon / static_cast<double>(m2);
    const long half_n =
        std::max(m2, static_cast<long>(std::ceil(half_width / step2 - 1e-9)));
    const double new_half_width = static_cast<double>(half_n) * step2;
    const int n2 = static_cast<int>(2 * half_n + 1);
    return GridChoice{TimeGrid(t0, new_half_width, n2), true};
}

void check_envelope_fits(const CouplingProfile& c, double half_width) {
    if (c.kind == CouplingKind::boxcar && 0.5 * c.width > half_width) {
        fail("\"coupling.epsilon\": boxcar window wider than the sampling window");
    }
    if (c.kind == CouplingKind::gaussian && half_width < 6.0 * c.width) {
        fail("\"coupling.epsilon\": sampling window must cover six standard "
             "deviations of the gaussian envelope");
    }
}

// ---------------------------------------------------------------------------
// Report assembly (all strings first, files second).

std::string series_csv_text(const PpsScenario& s, const TimeGrid& grid,
                            const WeakValueSeries& series) {
    std::string out = "t,re_Aw,im_Aw,re_Aw_dot,im_Aw_dot,re_weak_energy,im_weak_energy\n";
    for (int k = 0; k < grid.n(); ++k) {
        const double tau = grid.offset(k);
        const Complex aw = series.values[static_cast<std::size_t>(k)];
        const Complex dot = weak_value_derivative(s, tau);
        const Complex energy = weak_energy(s, tau);
        out += fmt(grid.time(k));
        out += ',';
        out += fmt(aw.real());
        out += ',';
        out += fmt(aw.imag());
        out += ',';
        out += fmt(dot.real());
        out += ',';
        out += fmt(dot.imag());
        out += ',';
        out += fmt(energy.real());
        out += ',';
        out += fmt(energy.imag());
        out += '\n';
    }
    return out;
}

void append_residuals(std::string& out, const SymmetryReport& report,
                      const char* indent) {
    out += indent;
    out += "\"residuals\": {\n";
    out += indent;
    out += "  \"re_even\": " + fmt(report.re_even_residual) + ",\n";
    out += indent;
    out += "  \"re_odd\": " + fmt(report.re_odd_residual) + ",\n";
    out += indent;
    out += "  \"im_even\": " + fmt(report.im_even_residual) + ",\n";
    out += indent;
    out += "  \"im_odd\": " + fmt(report.im_odd_residual) + ",\n";
    out += indent;
    out += "  \"pt\": " + fmt(report.pt_residual) + ",\n";
    out += indent;
    out += "  \"anti_pt\": " + fmt(report.anti_pt_residual) + "\n";
    out += indent;
    out += "},\n";
}

std::string symmetry_json_text(const SymmetryReport& report, const Complex* translation,
                               Picture picture, const TimeGrid* grid, bool refined) {
    std::string out = "{\n";
    out += "  \"tolerance\": " + fmt(report.tolerance) + ",\n";
    out += "  \"verdict\": \"" + std::string(to_string(report.verdict)) + "\",\n";
    append_residuals(out, report, "  ");
    out += "  \"predicted_vanishing\": \"" +
           std::string(to_string(report.predicted_vanishing)) + "\"";
    if (translation != nullptr) {
        out += ",\n  \"translation\": {\n";
        out += "    \"picture\": \"" + std::string(to_string(picture)) + "\",\n";
        out += "    \"re\": " + fmt(translation->real()) + ",\n";
        out += "    \"im\": " + fmt(translation->imag()) + ",\n";
        out += "    \"abs_re\": " + fmt(std::abs(translation->real())) + ",\n";
        out += "    \"abs_im\": " + fmt(std::abs(translation->imag())) + "\n";
        out += "  }";
    }
    if (grid != nullptr) {
        out += ",\n  \"grid\": {\n";
        out += "    \"t0\": " + fmt(grid->center()) + ",\n";
        out += "    \"half_width\": " + fmt(grid->half_width()) + ",\n";
        out += "    \"n\": " + std::to_string(grid->n()) + ",\n";
        out += "    \"step\": " + fmt(grid->step()) + ",\n";
        out += std::string("    \"refined\": ") + (refined ? "true" : "false") + "\n";
        out += "  }";
    }
    out += "\n}\n";
    return out;
}

struct MomentQuad {
    double mean_q;
    double mean_p;
    double var_q;
    double var_p;
};

void append_quad(std::string& out, const char* name, const MomentQuad& q,
                 const char* indent, bool trailing_comma) {
    out += indent;
    out += "\"" + std::string(name) + "\": {\n";
    out += indent;
    out += "  \"mean_q\": " + fmt(q.mean_q) + ",\n";
    out += indent;
    out += "  \"mean_p\": " + fmt(q.mean_p) + ",\n";
    out += indent;
    out += "  \"var_q\": " + fmt(q.var_q) + ",\n";
    out += indent;
    out += "  \"var_p\": " + fmt(q.var_p) + "\n";
    out += indent;
    out += trailing_comma ? "},\n" : "}\n";
}

std::string ratio_or_null(double numerator, double denominator) {
    if (denominator < 1e-13) return "null";
    return fmt(numerator / denominator);
}

struct PointerSample {
    double gamma0;
    double probability;
    MomentQuad oracle;
    MomentQuad predicted;
    MomentQuad residual;  // mean residuals /gamma0, variance residuals /initial var
};

PointerSample evaluate_pointer_sample(const PpsScenario& s, double gamma0,
                                      const PointerState& pointer,
                                      const PointerMomentReport& init, Complex aw0) {
    const PostSelectedPointer exact = exact_pointer(s, gamma0, pointer);
    const PointerMomentReport om = pointer_moments(exact.state);
    PointerSample sample{};
    sample.gamma0 = gamma0;
    sample.probability = exact.probability;
    sample.oracle = MomentQuad{om.mean_q, om.mean_p, om.var_q, om.var_p};
    sample.predicted = MomentQuad{
        predict_mean(pointer, PointerAxis::position, gamma0, aw0),
        predict_mean(pointer, PointerAxis::momentum, gamma0, aw0),
        predict_variance(pointer, PointerAxis::position, gamma0, aw0),
        predict_variance(pointer, PointerAxis::momentum, gamma0, aw0)};
    sample.residual = MomentQuad{
        std::abs(sample.oracle.mean_q - sample.predicted.mean_q) / gamma0,
        std::abs(sample.oracle.mean_p - sample.predicted.mean_p) / gamma0,
        std::abs(sample.oracle.var_q - sample.predicted.var_q) / init.var_q,
        std::abs(sample.oracle.var_p - sample.predicted.var_p) / init.var_p};
    return sample;
}

std::string pointer_json_text(const RunConfig& config, Complex aw0,
                              const PointerMomentReport& init,
                              const std::vector<PointerSample>& samples) {
    std::string out = "{\n";
    out += "  \"hbar\": " + fmt(config.scenario.hbar) + ",\n";
    out += "  \"picture\": \"" + std::string(to_string(config.coupling.picture)) +
           "\",\n";
    out += "  \"aw0\": {\n";
    out += "    \"re\": " + fmt(aw0.real()) + ",\n";
    out += "    \"im\": " + fmt(aw0.imag()) + "\n";
    out += "  },\n";
    append_quad(out, "initial",
                MomentQuad{init.mean_q, init.mean_p, init.var_q, init.var_p}, "  ",
                true);
    out += "  \"samples\": [\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const PointerSample& s = samples[i];
        out += "    {\n";
        out += "      \"gamma0\": " + fmt(s.gamma0) + ",\n";
        out += "      \"probability\": " + fmt(s.probability) + ",\n";
        append_quad(out, "oracle", s.oracle, "      ", true);
        append_quad(out, "predicted", s.predicted, "      ", true);
        append_quad(out, "relative_residuals", s.residual, "      ", false);
        out += i + 1 < samples.size() ? "    },\n" : "    }\n";
    }
    out += "  ],\n";
    // First-order formulas leave an O(gamma0^2) relative residual, so halving
    // gamma0 should divide each residual by about four.
    out += "  \"residual_ratio\": {\n";
    out += "    \"mean_q\": " +
           ratio_or_null(samples[0].residual.mean_q, samples[1].residual.mean_q) +
           ",\n";
    out += "    \"mean_p\": " +
           ratio_or_null(samples[0].residual.mean_p, samples[1].residual.mean_p) +
           ",\n";
    out += "    \"var_q\": " +
           ratio_or_null(samples[0].residual.var_q, samples[1].residual.var_q) + ",\n";
    out += "    \"var_p\": " +
           ratio_or_null(samples[0].residual.var_p, samples[1].residual.var_p) + "\n";
    out += "  }\n";
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// File plumbing.

void write_file(const fs::path& path, const std::string& text,
                std::vector<fs::path>& written) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot open \"" + path.string() + "\" for writing");
    out << text;
    out.flush();
    if (!out) fail("failed while writing \"" + path.string() + "\"");
    written.push_back(path);
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail("cannot create output directory \"" + dir.string() + "\"");
    return dir;
}

void remove_all_quietly(const std::vector<fs::path>& written) {
    for (const fs::path& p : written) {
        std::error_code ec;
        fs::remove(p, ec);
    }
}

PointerState build_pointer(const RunConfig& config) {
    return gaussian_pointer(config.pointer.center_q, config.pointer.center_p,
                            config.pointer.var_q, config.pointer.grid_min,
                            config.pointer.grid_step, config.pointer.grid_n,
                            config.pointer.mass, config.scenario.hbar);
}

PpsScenario scaled_scenario(const PpsScenario& base, double factor) {
    return PpsScenario::make(base.pre_state, base.post_state,
                             Observable(factor * base.pre_hamiltonian.matrix()),
                             Observable(factor * base.post_hamiltonian.matrix()),
                             base.observable, base.pre_offset, base.post_offset,
                             base.hbar, base.overlap_floor);
}

}  // namespace

// ---------------------------------------------------------------------------
// parse_scenario

RunConfig parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open scenario file \"" + path + "\"");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        fail("scenario file \"" + path + "\" is not valid JSON: " + e.what());
    }
    if (!root.is_object()) fail("scenario file must contain a JSON object");
    require_known_keys(root, "", {"system", "timing", "coupling", "pointer", "run"});

    std::vector<std::string> warnings;

    // system
    const json& system = require_object(root, "", "system");
    require_known_keys(system, "system",
                       {"dim", "pre", "post", "H_i", "H_f", "A", "hbar", "omega",
                        "overlap_floor"});
    const long dim_l = get_integer(system, "system", "dim", -1);
    if (dim_l < 2 || dim_l > 64) fail("\"system.dim\" must be an integer in [2, 64]");
    const Eigen::Index dim = static_cast<Eigen::Index>(dim_l);

    const json* pre_j = find(system, "pre");
    const json* post_j = find(system, "post");
    const json* a_j = find(system, "A");
    if (pre_j == nullptr) fail("\"system.pre\" is required");
    if (post_j == nullptr) fail("\"system.post\" is required");
    if (a_j == nullptr) fail("\"system.A\" is required");

    StateVector pre = read_state(*pre_j, "system.pre", dim, warnings);
    StateVector post = read_state(*post_j, "system.post", dim, warnings);
    Observable a = read_observable(*a_j, "system.A", dim);

    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(dim, dim);
    Observable h_i = find(system, "H_i")
                         ? read_observable(*find(system, "H_i"), "system.H_i", dim)
                         : Observable(zero);
    Observable h_f = find(system, "H_f")
                         ? read_observable(*find(system, "H_f"), "system.H_f", dim)
                         : Observable(zero);

    const double hbar = get_number(system, "system", "hbar", 1.0);
    if (!(hbar > 0.0)) fail("\"system.hbar\" must be positive");
    const double system_omega = get_number(system, "system", "omega", 1.0);
    if (system_omega == 0.0) fail("\"system.omega\" must be nonzero");
    const double overlap_floor =
        get_number(system, "system", "overlap_floor", tol::default_overlap_floor);
    if (!(overlap_floor > 0.0)) fail("\"system.overlap_floor\" must be positive");

    // timing
    double t0 = 0.0, dt_i = 0.0, dt_f = 0.0, half_width = 1.0;
    long n = 1001;
    if (const json* timing = find(root, "timing")) {
        if (!timing->is_object()) fail("\"timing\" must be an object");
        require_known_keys(*timing, "timing", {"t0", "dt_i", "dt_f", "half_width", "n"});
        t0 = get_number(*timing, "timing", "t0", 0.0);
        dt_i = get_number(*timing, "timing", "dt_i", 0.0);
        dt_f = get_number(*timing, "timing", "dt_f", 0.0);
        half_width = get_number(*timing, "timing", "half_width", 1.0);
        n = get_integer(*timing, "timing", "n", 1001);
    }
    if (dt_i < 0.0) fail("\"timing.dt_i\" must be >= 0");
    if (dt_f < 0.0) fail("\"timing.dt_f\" must be >= 0");
    if (!(half_width > 0.0)) fail("\"timing.half_width\" must be positive");
    if (n < 3 || n > 100000000) fail("\"timing.n\" must be an integer in [3, 1e8]");
    if (n % 2 == 0) fail("\"timing.n\" must be odd so the grid has a center sample");

    // coupling
    std::string kind_s = "impulse";
    double gamma0 = 0.01, epsilon = 0.0;
    std::string picture_s = "momentum";
    bool epsilon_given = false;
    if (const json* coupling = find(root, "coupling")) {
        if (!coupling->is_object()) fail("\"coupling\" must be an object");
        require_known_keys(*coupling, "coupling",
                           {"kind", "gamma0", "epsilon", "picture"});
        kind_s = get_string(*coupling, "coupling", "kind", "impulse");
        gamma0 = get_number(*coupling, "coupling", "gamma0", 0.01);
        if (find(*coupling, "epsilon")) {
            epsilon = get_number(*coupling, "coupling", "epsilon", 0.0);
            epsilon_given = true;
        }
        picture_s = get_string(*coupling, "coupling", "picture", "momentum");
    }
    Picture picture;
    if (picture_s == "momentum") {
        picture = Picture::momentum_coupling;
    } else if (picture_s == "position") {
        picture = Picture::position_coupling;
    } else {
        fail("\"coupling.picture\" must be \"momentum\" or \"position\"");
    }
    if (gamma0 == 0.0) fail("\"coupling.gamma0\" must be nonzero");

    CouplingKind kind;
    if (kind_s == "boxcar") {
        kind = CouplingKind::boxcar;
    } else if (kind_s == "gaussian") {
        kind = CouplingKind::gaussian;
    } else if (kind_s == "impulse") {
        kind = CouplingKind::impulse;
    } else {
        fail("\"coupling.kind\" must be \"boxcar\", \"gaussian\", or \"impulse\"");
    }
    if (kind != CouplingKind::impulse) {
        if (!epsilon_given) fail("\"coupling.epsilon\" is required for this kind");
        if (!(epsilon > 0.0)) fail("\"coupling.epsilon\" must be positive");
    } else if (epsilon_given) {
        fail("\"coupling.epsilon\" is not meaningful for impulse couplings");
    }

    // pointer
    double var_q = 1.0, center_q = 0.0, center_p = 0.0, mass = 1.0;
    bool explicit_grid = false;
    double grid_min = 0.0, grid_step = 0.0;
    long grid_n = 4096;
    if (const json* pointer = find(root, "pointer")) {
        if (!pointer->is_object()) fail("\"pointer\" must be an object");
        require_known_keys(*pointer, "pointer",
                           {"var_q", "center_q", "center_p", "mass", "grid"});
        var_q = get_number(*pointer, "pointer", "var_q", 1.0);
        center_q = get_number(*pointer, "pointer", "center_q", 0.0);
        center_p = get_number(*pointer, "pointer", "center_p", 0.0);
        mass = get_number(*pointer, "pointer", "mass", 1.0);
        if (const json* grid = find(*pointer, "grid")) {
            if (!grid->is_object()) fail("\"pointer.grid\" must be an object");
            require_known_keys(*grid, "pointer.grid", {"min", "step", "n"});
            const json* min_j = find(*grid, "min");
            const json* step_j = find(*grid, "step");
            if (min_j == nullptr || step_j == nullptr) {
                fail("\"pointer.grid\" requires min, step, and n");
            }
            grid_min = get_number(*grid, "pointer.grid", "min", 0.0);
            grid_step = get_number(*grid, "pointer.grid", "step", 0.0);
            grid_n = get_integer(*grid, "pointer.grid", "n", -1);
            explicit_grid = true;
        }
    }
    if (!(var_q > 0.0)) fail("\"pointer.var_q\" must be positive");
    if (!(mass > 0.0)) fail("\"pointer.mass\" must be positive");
    if (explicit_grid) {
        if (!(grid_step > 0.0)) fail("\"pointer.grid.step\" must be positive");
        if (grid_n < 16 || grid_n > 1 << 24) {
            fail("\"pointer.grid.n\" must be an integer in [16, 2^24]");
        }
    } else {
        // Default grid: 12 sigma on both sides, 4096 samples.
        const double sigma = std::sqrt(var_q);
        grid_min = center_q - 12.0 * sigma;
        grid_step = 24.0 * sigma / static_cast<double>(grid_n - 1);
    }

    // run
    bool out_series = true, out_symmetry = true, out_pointer = true;
    double tolerance = tol::default_symmetry;
    std::vector<double> sweep_gamma0, sweep_epsilon, sweep_omega;
    ClosedFormSpec closed_form;
    if (const json* runj = find(root, "run")) {
        if (!runj->is_object()) fail("\"run\" must be an object");
        require_known_keys(*runj, "run",
                           {"outputs", "sweeps", "tolerance", "closed_form"});
        if (const json* outputs = find(*runj, "outputs")) {
            if (!outputs->is_array()) fail("\"run.outputs\" must be an array");
            out_series = out_symmetry = out_pointer = false;
            for (const json& o : *outputs) {
                if (!o.is_string()) fail("\"run.outputs\" must contain strings");
                const std::string name = o.get<std::string>();
                if (name == "series") {
                    out_series = true;
                } else if (name == "symmetry") {
                    out_symmetry = true;
                } else if (name == "pointer") {
                    out_pointer = true;
                } else {
                    fail("\"run.outputs\" entry \"" + name +
                         "\" is not one of series/symmetry/pointer");
                }
            }
            if (!out_series && !out_symmetry && !out_pointer) {
                fail("\"run.outputs\" must request at least one report");
            }
        }
        tolerance = get_number(*runj, "run", "tolerance", tol::default_symmetry);
        if (!(tolerance > 0.0)) fail("\"run.tolerance\" must be positive");
        if (const json* sweeps = find(*runj, "sweeps")) {
            if (!sweeps->is_object()) fail("\"run.sweeps\" must be an object");
            require_known_keys(*sweeps, "run.sweeps", {"gamma0", "epsilon", "omega"});
            if (const json* g = find(*sweeps, "gamma0")) {
                sweep_gamma0 = read_sweep_list(*g, "run.sweeps.gamma0");
            }
            if (const json* e = find(*sweeps, "epsilon")) {
                sweep_epsilon = read_sweep_list(*e, "run.sweeps.epsilon");
            }
            if (const json* w = find(*sweeps, "omega")) {
                sweep_omega = read_sweep_list(*w, "run.sweeps.omega");
            }
        }
        if (const json* cf = find(*runj, "closed_form")) {
            if (!cf->is_object()) fail("\"run.closed_form\" must be an object");
            require_known_keys(*cf, "run.closed_form", {"example"});
            const std::string example =
                get_string(*cf, "run.closed_form", "example", "");
            if (example == "pt") {
                closed_form = ClosedFormSpec{true, SymmetryExample::pt};
            } else if (example == "anti_pt") {
                closed_form = ClosedFormSpec{true, SymmetryExample::anti_pt};
            } else {
                fail("\"run.closed_form.example\" must be \"pt\" or \"anti_pt\"");
            }
        }
    }

    PpsScenario scenario =
        PpsScenario::make(std::move(pre), std::move(post), std::move(h_i),
                          std::move(h_f), std::move(a), dt_i, dt_f, hbar,
                          overlap_floor);

    GridChoice choice = kind == CouplingKind::boxcar
                            ? boxcar_aligned_grid(t0, half_width, static_cast<int>(n),
                                                  epsilon)
                            : GridChoice{TimeGrid(t0, half_width,
                                                  static_cast<int>(n)),
                                         false};
    CouplingProfile coupling =
        kind == CouplingKind::boxcar
            ? CouplingProfile::boxcar(gamma0, t0, epsilon, picture)
            : (kind == CouplingKind::gaussian
                   ? CouplingProfile::gaussian(gamma0, t0, epsilon, picture)
                   : CouplingProfile::impulse(gamma0, t0, picture));
    check_envelope_fits(coupling, choice.grid.half_width());

    return RunConfig{std::move(scenario),
                     choice.grid,
                     coupling,
                     PointerConfig{var_q, center_q, center_p, mass, grid_min,
                                   grid_step, static_cast<int>(grid_n)},
                     system_omega,
                     tolerance,
                     out_series,
                     out_symmetry,
                     out_pointer,
                     std::move(sweep_gamma0),
                     std::move(sweep_epsilon),
                     std::move(sweep_omega),
                     closed_form,
                     choice.refined,
                     std::move(warnings)};
}

// ---------------------------------------------------------------------------
// run

void run(const RunConfig& config, const std::string& out_dir) {
    const fs::path dir = prepare_out_dir(out_dir);
    const WeakValueSeries series = weak_value_series(config.scenario, config.grid);

    std::string series_text, symmetry_text, pointer_text;
    if (config.out_series) {
        series_text = series_csv_text(config.scenario, config.grid, series);
    }
    if (config.out_symmetry) {
        const SymmetryReport report = classify(series, config.tolerance);
        const Complex translation = pointer_translation(series, config.coupling);
        symmetry_text =
            symmetry_json_text(report, &translation, config.coupling.picture,
                               &config.grid, config.grid_refined);
    }
    if (config.out_pointer) {
        const Complex aw0 =
            series.values[static_cast<std::size_t>(config.grid.center_index())];
        const PointerState pointer = build_pointer(config);
        const PointerMomentReport init = pointer_moments(pointer);
        const double gamma0 = config.coupling.strength;
        std::vector<PointerSample> samples;
        samples.push_back(
            evaluate_pointer_sample(config.scenario, gamma0, pointer, init, aw0));
        samples.push_back(
            evaluate_pointer_sample(config.scenario, 0.5 * gamma0, pointer, init, aw0));
        pointer_text = pointer_json_text(config, aw0, init, samples);
    }

    std::vector<fs::path> written;
    try {
        if (config.out_series) write_file(dir / "series.csv", series_text, written);
        if (config.out_symmetry) {
            write_file(dir / "symmetry.json", symmetry_text, written);
        }
        if (config.out_pointer) {
            write_file(dir / "pointer.json", pointer_text, written);
        }
    } catch (...) {
        remove_all_quietly(written);
        throw;
    }
}

// ---------------------------------------------------------------------------
// sweep

namespace {

struct SweepRow {
    double value;
    Complex translation;
    bool has_closed_form;
    Complex closed_form;
    double oracle_shift;
    double first_order_residual;
};

const char* param_name(SweepParam p) {
    switch (p) {
        case SweepParam::gamma0:
            return "gamma0";
        case SweepParam::epsilon:
            return "epsilon";
        case SweepParam::omega:
            return "omega";
    }
    return "?";
}

SweepRow evaluate_sweep_point(const RunConfig& config, SweepParam param, double value,
                              const PointerState& pointer,
                              const PointerMomentReport& init) {
    PpsScenario scenario = config.scenario;
    CouplingProfile coupling = config.coupling;
    TimeGrid grid = config.grid;
    double omega = config.system_omega;

    switch (param) {
        case SweepParam::gamma0:
            if (value == 0.0) fail("sweep value for gamma0 must be nonzero");
            coupling.strength = value;
            break;
        case SweepParam::epsilon: {
            if (!(value > 0.0)) fail("sweep value for epsilon must be positive");
            coupling.width = value;
            if (coupling.kind == CouplingKind::boxcar) {
                grid = boxcar_aligned_grid(grid.center(), grid.half_width(), grid.n(),
                                           value)
                           .grid;
            }
            check_envelope_fits(coupling, grid.half_width());
            break;
        }
        case SweepParam::omega: {
            if (value == 0.0) fail("sweep value for omega must be nonzero");
            scenario = scaled_scenario(config.scenario, value / config.system_omega);
            omega = value;
            break;
        }
    }

    const WeakValueSeries series = weak_value_series(scenario, grid);
    SweepRow row{};
    row.value = value;
    row.translation = pointer_translation(series, coupling);
    row.has_closed_form =
        config.closed_form.declared && coupling.kind == CouplingKind::boxcar;
    if (row.has_closed_form) {
        row.closed_form = closed_form_translation(config.closed_form.example,
                                                  coupling.strength, omega,
                                                  coupling.width);
    }

    // The moment oracle applies the full coupling strength impulsively, so
    // its first-order prediction uses the center weak value.
    const Complex aw0 = weak_value(scenario, 0.0);
    const PointerAxis axis = coupling.picture == Picture::momentum_coupling
                                 ? PointerAxis::position
                                 : PointerAxis::momentum;
    const PostSelectedPointer exact = exact_pointer(scenario, coupling.strength, pointer);
    const PointerMomentReport om = pointer_moments(exact.state);
    const double oracle_mean =
        axis == PointerAxis::position ? om.mean_q : om.mean_p;
    const double initial_mean =
        axis == PointerAxis::position ? init.mean_q : init.mean_p;
    const double predicted = predict_mean(pointer, axis, coupling.strength, aw0);
    row.oracle_shift = oracle_mean - initial_mean;
    row.first_order_residual =
        std::abs(oracle_mean - predicted) / std::abs(coupling.strength);
    return row;
}

}  // namespace

void sweep(const RunConfig& config, SweepParam param, std::vector<double> values,
           const std::string& out_dir) {
    if (values.empty()) {
        switch (param) {
            case SweepParam::gamma0:
                values = config.sweep_gamma0;
                break;
            case SweepParam::epsilon:
                values = config.sweep_epsilon;
                break;
            case SweepParam::omega:
                values = config.sweep_omega;
                break;
        }
    }
    if (values.empty()) {
        fail(std::string("no sweep values for \"") + param_name(param) +
             "\": pass --values or declare run.sweeps." + param_name(param));
    }
    if (param == SweepParam::epsilon &&
        config.coupling.kind == CouplingKind::impulse) {
        fail("epsilon sweeps require a boxcar or gaussian coupling");
    }

    const fs::path dir = prepare_out_dir(out_dir);
    const PointerState pointer = build_pointer(config);
    const PointerMomentReport init = pointer_moments(pointer);

    std::vector<SweepRow> rows(values.size());
    std::vector<std::exception_ptr> failures(values.size());
    const unsigned workers = std::max(
        1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                               static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < values.size(); i += workers) {
                try {
                    rows[i] = evaluate_sweep_point(config, param, values[i], pointer,
                                                   init);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : failures) {
        if (e) std::rethrow_exception(e);
    }

    std::string text =
        "param,value,re_translation,im_translation,re_closed_form,im_closed_form,"
        "oracle_shift,first_order_residual\n";
    for (const SweepRow& row : rows) {
        text += param_name(param);
        text += ',';
        text += fmt(row.value);
        text += ',';
        text += fmt(row.translation.real());
        text += ',';
        text += fmt(row.translation.imag());
        text += ',';
        if (row.has_closed_form) {
            text += fmt(row.closed_form.real());
            text += ',';
            text += fmt(row.closed_form.imag());
        } else {
            text += ',';
        }
        text += ',';
        text += fmt(row.oracle_shift);
        text += ',';
        text += fmt(row.first_order_residual);
        text += '\n';
    }

    std::vector<fs::path> written;
    try {
        write_file(dir / "sweep.csv", text, written);
    } catch (...) {
        remove_all_quietly(written);
        throw;
    }
}

// ---------------------------------------------------------------------------
// classify_csv

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end != nullptr && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
    if (end == begin || end == nullptr || *end != '\0') {
        fail("series CSV line " + std::to_string(line_no) + ": cannot parse number \"" +
             cell + "\"");
    }
    return v;
}

}  // namespace

void classify_csv(const std::string& csv_path, double t0, double tolerance,
                  const std::string& out_dir) {
    if (!(tolerance > 0.0)) fail("tolerance must be positive");
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) fail("cannot open series CSV \"" + csv_path + "\"");

    std::string line;
    if (!std::getline(in, line)) fail("series CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "t" || header[1] != "re_Aw" ||
        header[2] != "im_Aw") {
        fail("series CSV header must start with t,re_Aw,im_Aw");
    }

    std::vector<double> times;
    std::vector<Complex> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() < 3) {
            fail("series CSV line " + std::to_string(line_no) +
                 ": expected at least 3 columns");
        }
        times.push_back(parse_cell(cells[0], line_no));
        const double re = parse_cell(cells[1], line_no);
        const double im = parse_cell(cells[2], line_no);
        values.push_back(Complex(re, im));
    }

    const std::size_t n = times.size();
    if (n < 3) fail("series CSV must contain at least 3 samples");
    if (n % 2 == 0) fail("series CSV must contain an odd number of samples");

    const double span = times.back() - times.front();
    if (!(span > 0.0)) fail("series CSV time column must be increasing");
    const double step = span / static_cast<double>(n - 1);
    const double time_tol = 1e-9 * std::max(1.0, std::abs(times.front()) +
                                                     std::abs(times.back()));
    for (std::size_t k = 1; k < n; ++k) {
        if (std::abs(times[k] - times[k - 1] - step) > time_tol) {
            fail("series CSV time column is not uniformly spaced (row " +
                 std::to_string(k + 2) + ")");
        }
    }
    if (std::abs(times[(n - 1) / 2] - t0) > time_tol) {
        fail("series CSV is not centered on --t0: center sample at t = " +
             fmt(times[(n - 1) / 2]));
    }
    if (std::abs(times.front() + times.back() - 2.0 * t0) > time_tol) {
        fail("series CSV time column is not symmetric about --t0");
    }

    const TimeGrid grid(t0, 0.5 * span, static_cast<int>(n));
    const WeakValueSeries series(grid, std::move(values));
    const SymmetryReport report = classify(series, tolerance);

    const fs::path dir = prepare_out_dir(out_dir);
    const std::string text = symmetry_json_text(report, nullptr,
                                                Picture::momentum_coupling, nullptr,
                                                false);
    std::vector<fs::path> written;
    try {
        write_file(dir / "symmetry.json", text, written);
    } catch (...) {
        remove_all_quietly(written);
        throw;
    }
}

}  // namespace weakval
